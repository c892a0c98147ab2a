//! Environments map motor commands to sensory effects.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::coverage::SensoryPoint;
use crate::error::{Error, Result};

/// Joint angles in degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MotorCommand(pub Vec<f64>);

impl MotorCommand {
    pub fn new(angles: Vec<f64>) -> Self {
        Self(angles)
    }

    pub fn angles(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// Product of closed intervals `[a_j, b_j]`, in degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MotorSpace(Vec<(f64, f64)>);

impl MotorSpace {
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::Config("motor space needs at least one axis".into()));
        }
        for (j, &(a, b)) in intervals.iter().enumerate() {
            if !(a.is_finite() && b.is_finite() && a <= b) {
                return Err(Error::Config(format!(
                    "motor interval {j} is invalid: [{a}, {b}]"
                )));
            }
        }
        Ok(Self(intervals))
    }

    /// `dim` copies of `[lo, hi]`.
    pub fn uniform(lo: f64, hi: f64, dim: usize) -> Result<Self> {
        Self::new(vec![(lo, hi); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.0
    }

    pub fn contains(&self, x: &MotorCommand) -> bool {
        self.check(x).is_ok()
    }

    pub fn check(&self, x: &MotorCommand) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: x.dim(),
            });
        }
        for (joint, (&angle, &(lo, hi))) in x.angles().iter().zip(&self.0).enumerate() {
            if !(angle >= lo && angle <= hi) {
                return Err(Error::Domain {
                    joint,
                    angle,
                    lo,
                    hi,
                });
            }
        }
        Ok(())
    }
}

/// Each coordinate independently uniform on its interval.
pub fn sample_uniform_command<R: Rng + ?Sized>(space: &MotorSpace, rng: &mut R) -> MotorCommand {
    MotorCommand(
        space
            .intervals()
            .iter()
            .map(|&(a, b)| rng.gen_range(a..=b))
            .collect(),
    )
}

/// A deterministic, stateless map from the motor space to the sensory space.
///
/// Strategies only ever see the effects returned by [`evaluate`](Self::evaluate),
/// never the environment itself.
pub trait Environment: Send + Sync {
    fn motor_space(&self) -> &MotorSpace;

    fn sensory_dim(&self) -> usize;

    fn evaluate(&self, x: &MotorCommand) -> Result<SensoryPoint>;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ArmSpec {
    pub joint_count: usize,
    /// Meters.
    pub segment_length: f64,
    /// Symmetric joint bound, degrees.
    pub joint_limit: f64,
}

impl Default for ArmSpec {
    fn default() -> Self {
        Self {
            joint_count: 20,
            segment_length: 0.05,
            joint_limit: 150.0,
        }
    }
}

impl ArmSpec {
    pub fn validate(&self) -> Result<()> {
        if self.joint_count == 0 {
            return Err(Error::Config("arm needs at least one joint".into()));
        }
        if !(self.segment_length.is_finite() && self.segment_length > 0.0) {
            return Err(Error::Config(format!(
                "segment_length must be positive, got {}",
                self.segment_length
            )));
        }
        if !(self.joint_limit > 0.0 && self.joint_limit <= 180.0) {
            return Err(Error::Config(format!(
                "joint_limit must lie in (0, 180], got {}",
                self.joint_limit
            )));
        }
        Ok(())
    }

    /// Total arm length; no effect lies farther from the base.
    pub fn reach(&self) -> f64 {
        self.joint_count as f64 * self.segment_length
    }

    pub fn motor_space(&self) -> Result<MotorSpace> {
        MotorSpace::uniform(-self.joint_limit, self.joint_limit, self.joint_count)
    }
}

/// End-effector position of a planar open chain with relative joint angles.
///
/// Joint `j` rotates link `j` relative to link `j - 1`; the base sits at the
/// origin and the zero posture points along +x.
pub fn forward_kinematics(arm: &ArmSpec, x: &MotorCommand) -> Result<SensoryPoint> {
    if x.dim() != arm.joint_count {
        return Err(Error::Dimension {
            expected: arm.joint_count,
            got: x.dim(),
        });
    }
    let limit = arm.joint_limit;
    let mut heading = 0.0_f64;
    let (mut px, mut py) = (0.0_f64, 0.0_f64);
    for (joint, &angle) in x.angles().iter().enumerate() {
        if !(angle >= -limit && angle <= limit) {
            return Err(Error::Domain {
                joint,
                angle,
                lo: -limit,
                hi: limit,
            });
        }
        heading += angle;
        let (s, c) = heading.to_radians().sin_cos();
        px += arm.segment_length * c;
        py += arm.segment_length * s;
    }
    Ok(SensoryPoint::new(vec![px, py]))
}

/// Idealized planar arm: no noise, no dynamics, no posture memory.
#[derive(Debug, Clone)]
pub struct PlanarArm {
    spec: ArmSpec,
    space: MotorSpace,
}

impl PlanarArm {
    pub fn new(spec: ArmSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Self {
            space: spec.motor_space()?,
            spec,
        })
    }

    pub fn spec(&self) -> &ArmSpec {
        &self.spec
    }
}

impl Environment for PlanarArm {
    fn motor_space(&self) -> &MotorSpace {
        &self.space
    }

    fn sensory_dim(&self) -> usize {
        2
    }

    fn evaluate(&self, x: &MotorCommand) -> Result<SensoryPoint> {
        forward_kinematics(&self.spec, x)
    }
}
