//! Exploration strategies and the observation store they share.
//!
//! Every strategy proposes its next motor command from the same global store
//! of `(command, effect)` pairs, so goal babbling can build on whatever motor
//! babbling discovered and vice versa.

mod kdtree;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::coverage::{Bounds, SensoryPoint};
use crate::environment::{sample_uniform_command, MotorCommand, MotorSpace};
use crate::error::{Error, Result};

pub use kdtree::KdTree;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub command: MotorCommand,
    pub effect: SensoryPoint,
}

/// Append-only log of observations with a nearest-neighbour index over effects.
#[derive(Debug, Clone)]
pub struct ObservationStore {
    records: Vec<Observation>,
    index: KdTree,
}

impl ObservationStore {
    pub fn new(sensory_dim: usize) -> Self {
        Self {
            records: Vec::new(),
            index: KdTree::new(sensory_dim),
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn sensory_dim(&self) -> usize {
        self.index.dim()
    }

    pub fn records(&self) -> &[Observation] {
        &self.records
    }

    pub fn push(&mut self, obs: Observation) -> Result<()> {
        if obs.effect.dim() != self.index.dim() {
            return Err(Error::Dimension {
                expected: self.index.dim(),
                got: obs.effect.dim(),
            });
        }
        self.index.insert(obs.effect.coords());
        self.records.push(obs);
        Ok(())
    }

    /// Stored observation whose effect is closest to `goal`, earliest first on ties.
    pub fn nearest_observation(&self, goal: &SensoryPoint) -> Result<&Observation> {
        self.nearest_index(goal).map(|i| &self.records[i])
    }

    pub fn nearest_index(&self, goal: &SensoryPoint) -> Result<usize> {
        if goal.dim() != self.index.dim() {
            return Err(Error::Dimension {
                expected: self.index.dim(),
                got: goal.dim(),
            });
        }
        self.index
            .nearest(goal.coords())
            .map(|(i, _)| i)
            .ok_or(Error::EmptyStore)
    }
}

/// Uniform draw on `[max(a, x - d(b-a)), min(x + d(b-a), b)]` per joint.
pub fn perturb<R: Rng + ?Sized>(
    x: &MotorCommand,
    d: f64,
    space: &MotorSpace,
    rng: &mut R,
) -> MotorCommand {
    MotorCommand(
        x.angles()
            .iter()
            .zip(space.intervals())
            .map(|(&xj, &(a, b))| {
                let half = d * (b - a);
                let lo = a.max(xj - half);
                let hi = (xj + half).min(b);
                if lo >= hi {
                    lo
                } else {
                    rng.gen_range(lo..=hi)
                }
            })
            .collect(),
    )
}

/// A source of motor commands. Strategies see the shared store and their own
/// random stream, never the environment.
pub trait Strategy: Send + Sync {
    fn name(&self) -> &str;

    fn propose(&self, store: &ObservationStore, rng: &mut dyn RngCore) -> Result<MotorCommand>;
}

/// Random motor babbling.
#[derive(Debug, Clone)]
pub struct MotorBabbling {
    space: MotorSpace,
}

impl MotorBabbling {
    pub fn new(space: MotorSpace) -> Self {
        Self { space }
    }
}

pub fn rmb_propose<R: Rng + ?Sized>(space: &MotorSpace, rng: &mut R) -> MotorCommand {
    sample_uniform_command(space, rng)
}

impl Strategy for MotorBabbling {
    fn name(&self) -> &str {
        "rmb"
    }

    fn propose(&self, _store: &ObservationStore, rng: &mut dyn RngCore) -> Result<MotorCommand> {
        Ok(rmb_propose(&self.space, rng))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RgbConfig {
    /// Perturbation ratio in `[0, 1]`.
    pub d: f64,
    #[serde(default = "default_goal_bounds")]
    pub goal_bounds: Bounds,
}

fn default_goal_bounds() -> Bounds {
    Bounds::cube(-1.0, 1.0, 2)
}

impl RgbConfig {
    pub fn new(d: f64) -> Self {
        Self {
            d,
            goal_bounds: default_goal_bounds(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.d) {
            return Err(Error::Config(format!(
                "d must lie in [0, 1], got {}",
                self.d
            )));
        }
        if !self.goal_bounds.is_nondegenerate() {
            return Err(Error::Config("goal bounds are degenerate".into()));
        }
        Ok(())
    }
}

/// Random goal babbling: pick a goal uniformly, find the observation whose
/// effect is closest, and perturb its command. An empty store falls back to a
/// uniform motor sample.
pub fn rgb_propose<R: Rng + ?Sized>(
    store: &ObservationStore,
    cfg: &RgbConfig,
    space: &MotorSpace,
    rng: &mut R,
) -> Result<MotorCommand> {
    if store.is_empty() {
        return Ok(sample_uniform_command(space, rng));
    }
    let goal = SensoryPoint::new(cfg.goal_bounds.sample(rng));
    let nearest = store.nearest_observation(&goal)?;
    Ok(perturb(&nearest.command, cfg.d, space, rng))
}

#[derive(Debug, Clone)]
pub struct GoalBabbling {
    cfg: RgbConfig,
    space: MotorSpace,
    name: String,
}

impl GoalBabbling {
    pub fn new(cfg: RgbConfig, space: MotorSpace) -> Result<Self> {
        cfg.validate()?;
        let name = format!("rgb(d={})", cfg.d);
        Ok(Self { cfg, space, name })
    }

    pub fn config(&self) -> &RgbConfig {
        &self.cfg
    }
}

impl Strategy for GoalBabbling {
    fn name(&self) -> &str {
        &self.name
    }

    fn propose(&self, store: &ObservationStore, rng: &mut dyn RngCore) -> Result<MotorCommand> {
        if self.cfg.goal_bounds.dim() != store.sensory_dim() {
            return Err(Error::Dimension {
                expected: store.sensory_dim(),
                got: self.cfg.goal_bounds.dim(),
            });
        }
        rgb_propose(store, &self.cfg, &self.space, rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::SimRng;
    use rand::SeedableRng;

    fn obs(cmd: f64, y: [f64; 2]) -> Observation {
        Observation {
            command: MotorCommand::new(vec![cmd]),
            effect: SensoryPoint::new(y.to_vec()),
        }
    }

    #[test]
    fn nearest_picks_closest_effect() {
        let mut store = ObservationStore::new(2);
        store.push(obs(1.0, [0.0, 0.0])).unwrap();
        store.push(obs(2.0, [1.0, 0.0])).unwrap();
        let o = store
            .nearest_observation(&SensoryPoint::new(vec![0.9, 0.0]))
            .unwrap();
        assert_eq!(o.command.angles(), &[2.0]);
    }

    #[test]
    fn nearest_single_record_and_ties() {
        let mut store = ObservationStore::new(2);
        store.push(obs(7.0, [0.3, 0.3])).unwrap();
        let o = store
            .nearest_observation(&SensoryPoint::new(vec![-5.0, 4.0]))
            .unwrap();
        assert_eq!(o.command.angles(), &[7.0]);

        let mut store = ObservationStore::new(2);
        store.push(obs(1.0, [-0.5, 0.0])).unwrap();
        store.push(obs(2.0, [0.5, 0.0])).unwrap();
        let o = store
            .nearest_observation(&SensoryPoint::new(vec![0.0, 0.2]))
            .unwrap();
        assert_eq!(o.command.angles(), &[1.0]);
    }

    #[test]
    fn empty_store_errors() {
        let store = ObservationStore::new(2);
        assert!(matches!(
            store.nearest_observation(&SensoryPoint::new(vec![0.0, 0.0])),
            Err(Error::EmptyStore)
        ));
    }

    #[test]
    fn perturb_zero_is_identity() {
        let space = MotorSpace::uniform(-150.0, 150.0, 5).unwrap();
        let mut rng = SimRng::seed_from_u64(0);
        let x = MotorCommand::new(vec![-150.0, -3.25, 0.0, 17.5, 150.0]);
        assert_eq!(perturb(&x, 0.0, &space, &mut rng), x);
    }

    #[test]
    fn perturb_small_d_stays_within_fifteen_degrees() {
        let space = MotorSpace::uniform(-150.0, 150.0, 20).unwrap();
        let mut rng = SimRng::seed_from_u64(1);
        let x = sample_uniform_command(&space, &mut rng);
        for _ in 0..1000 {
            let y = perturb(&x, 0.05, &space, &mut rng);
            assert!(space.contains(&y));
            for (a, b) in x.angles().iter().zip(y.angles()) {
                assert!((a - b).abs() <= 15.0 + 1e-12);
            }
        }
    }

    #[test]
    fn perturb_clips_at_lower_bound() {
        let space = MotorSpace::uniform(-150.0, 150.0, 1).unwrap();
        let mut rng = SimRng::seed_from_u64(2);
        let x = MotorCommand::new(vec![-150.0]);
        for d in [0.01, 0.3, 1.0] {
            for _ in 0..1000 {
                let y = perturb(&x, d, &space, &mut rng).angles()[0];
                assert!((-150.0..=-150.0 + d * 300.0).contains(&y));
            }
        }
    }

    #[test]
    fn rgb_falls_back_to_motor_babbling_on_empty_store() {
        let space = MotorSpace::uniform(-150.0, 150.0, 20).unwrap();
        let store = ObservationStore::new(2);
        let mut a = SimRng::seed_from_u64(9);
        let mut b = SimRng::seed_from_u64(9);
        let x = rgb_propose(&store, &RgbConfig::new(0.05), &space, &mut a).unwrap();
        assert_eq!(x, sample_uniform_command(&space, &mut b));
    }

    #[test]
    fn rgb_with_zero_d_replays_single_record() {
        let space = MotorSpace::uniform(-150.0, 150.0, 1).unwrap();
        let mut store = ObservationStore::new(2);
        store.push(obs(42.0, [0.1, 0.2])).unwrap();
        let mut rng = SimRng::seed_from_u64(5);
        for _ in 0..100 {
            let x = rgb_propose(&store, &RgbConfig::new(0.0), &space, &mut rng).unwrap();
            assert_eq!(x.angles(), &[42.0]);
        }
    }

    #[test]
    fn rgb_config_validation() {
        assert!(RgbConfig::new(1.5).validate().is_err());
        assert!(RgbConfig::new(-0.1).validate().is_err());
        let mut cfg = RgbConfig::new(0.5);
        cfg.goal_bounds = Bounds::cube(0.0, 0.0, 2);
        assert!(cfg.validate().is_err());
    }
}
