use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::adapt::AdaptConfig;
use crate::coverage::{Bounds, CoverageConfig};
use crate::environment::{ArmSpec, MotorSpace};
use crate::error::{Error, Result};
use crate::strategies::{GoalBabbling, MotorBabbling, RgbConfig, Strategy};

/// One entry of the strategy roster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StrategySpec {
    Rmb,
    Rgb(RgbConfig),
}

impl StrategySpec {
    pub fn build(&self, space: &MotorSpace) -> Result<Box<dyn Strategy>> {
        Ok(match self {
            StrategySpec::Rmb => Box::new(MotorBabbling::new(space.clone())),
            StrategySpec::Rgb(cfg) => Box::new(GoalBabbling::new(cfg.clone(), space.clone())?),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SelectorSpec {
    Adapt(AdaptConfig),
    /// Always the roster entry at `strategy`.
    Pure {
        strategy: usize,
    },
    /// Motor babbling with probability `p`, goal babbling otherwise.
    Mixture {
        p: f64,
    },
}

impl Default for SelectorSpec {
    fn default() -> Self {
        SelectorSpec::Adapt(AdaptConfig::default())
    }
}

impl SelectorSpec {
    pub fn label(&self) -> &'static str {
        match self {
            SelectorSpec::Adapt(_) => "adapt",
            SelectorSpec::Pure { .. } => "pure",
            SelectorSpec::Mixture { .. } => "mixture",
        }
    }
}

fn default_roster() -> Vec<StrategySpec> {
    vec![StrategySpec::Rmb, StrategySpec::Rgb(RgbConfig::new(0.05))]
}

fn default_n_steps() -> usize {
    5000
}

fn default_tau() -> f64 {
    0.02
}

fn default_repetitions() -> usize {
    25
}

pub fn default_p_grid() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

/// A full experiment, loaded from a JSON document with these field names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub arm: ArmSpec,
    #[serde(default = "default_roster")]
    pub strategies: Vec<StrategySpec>,
    #[serde(default)]
    pub selector: SelectorSpec,
    #[serde(default = "default_n_steps")]
    pub n_steps: usize,
    /// Radius of the reported coverage measure.
    #[serde(default = "default_tau")]
    pub eval_tau: f64,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default)]
    pub master_seed: u64,
    /// Grid cell edge; `tau / 10` of each grid when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cell_size: Option<f64>,
    /// Coverage grid extent; the arm's reach inflated by `2.5 tau` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coverage_bounds: Option<Bounds>,
    #[serde(default = "default_p_grid")]
    pub p_grid: Vec<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            arm: ArmSpec::default(),
            strategies: default_roster(),
            selector: SelectorSpec::default(),
            n_steps: default_n_steps(),
            eval_tau: default_tau(),
            repetitions: default_repetitions(),
            master_seed: 0,
            cell_size: None,
            coverage_bounds: None,
            p_grid: default_p_grid(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.arm.validate()?;
        if self.n_steps == 0 {
            return Err(Error::Config("n_steps must be at least 1".into()));
        }
        if self.repetitions == 0 {
            return Err(Error::Config("repetitions must be at least 1".into()));
        }
        if !(self.eval_tau.is_finite() && self.eval_tau > 0.0) {
            return Err(Error::Config(format!(
                "eval_tau must be positive, got {}",
                self.eval_tau
            )));
        }
        if self.strategies.is_empty() {
            return Err(Error::Config("strategy roster is empty".into()));
        }
        for spec in &self.strategies {
            if let StrategySpec::Rgb(cfg) = spec {
                cfg.validate()?;
                if cfg.goal_bounds.dim() != 2 {
                    return Err(Error::Config(
                        "goal bounds must be two-dimensional for the arm".into(),
                    ));
                }
            }
        }
        match &self.selector {
            SelectorSpec::Adapt(cfg) => cfg.validate()?,
            SelectorSpec::Pure { strategy } => {
                if *strategy >= self.strategies.len() {
                    return Err(Error::Config(format!(
                        "pure selector names strategy {strategy} but the roster has {}",
                        self.strategies.len()
                    )));
                }
            }
            SelectorSpec::Mixture { p } => {
                if !(0.0..=1.0).contains(p) {
                    return Err(Error::Config(format!(
                        "mixture p must lie in [0, 1], got {p}"
                    )));
                }
                self.mixture_pair()?;
            }
        }
        if self.p_grid.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::Config("every p in p_grid must lie in [0, 1]".into()));
        }
        for tau in self.taus() {
            self.coverage_config(tau).validate()?;
        }
        Ok(())
    }

    /// Roster indices of the first motor-babbling and first goal-babbling entry.
    pub fn mixture_pair(&self) -> Result<(usize, usize)> {
        let rmb = self
            .strategies
            .iter()
            .position(|s| matches!(s, StrategySpec::Rmb));
        let rgb = self
            .strategies
            .iter()
            .position(|s| matches!(s, StrategySpec::Rgb(_)));
        match (rmb, rgb) {
            (Some(a), Some(b)) => Ok((a, b)),
            _ => Err(Error::Config(
                "a mixture needs one rmb and one rgb strategy in the roster".into(),
            )),
        }
    }

    /// Perturbation ratio of the first goal-babbling strategy, if any.
    pub fn rgb_d(&self) -> Option<f64> {
        self.strategies.iter().find_map(|s| match s {
            StrategySpec::Rgb(cfg) => Some(cfg.d),
            StrategySpec::Rmb => None,
        })
    }

    /// Copy with every goal-babbling strategy set to perturbation ratio `d`.
    pub fn with_rgb_d(&self, d: f64) -> Self {
        let mut out = self.clone();
        for s in &mut out.strategies {
            if let StrategySpec::Rgb(cfg) = s {
                cfg.d = d;
            }
        }
        out
    }

    pub fn with_selector(&self, selector: SelectorSpec) -> Self {
        let mut out = self.clone();
        out.selector = selector;
        out
    }

    fn taus(&self) -> Vec<f64> {
        match &self.selector {
            SelectorSpec::Adapt(cfg) => vec![self.eval_tau, cfg.tau],
            _ => vec![self.eval_tau],
        }
    }

    pub fn coverage_config(&self, tau: f64) -> CoverageConfig {
        let bounds = self.coverage_bounds.clone().unwrap_or_else(|| {
            let max_tau = self.taus().into_iter().fold(0.0, f64::max);
            let half = self.arm.reach() + 2.5 * max_tau;
            Bounds::cube(-half, half, 2)
        });
        CoverageConfig {
            tau,
            bounds,
            cell_size: self.cell_size.unwrap_or(tau / 10.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_the_arm_experiment() {
        let cfg = ExperimentConfig::from_json("{}").unwrap();
        assert_eq!(cfg.arm.joint_count, 20);
        assert_eq!(cfg.n_steps, 5000);
        assert_eq!(cfg.repetitions, 25);
        assert_eq!(cfg.eval_tau, 0.02);
        assert_eq!(cfg.p_grid.len(), 11);
        let cov = cfg.coverage_config(0.02);
        assert!((cov.bounds.intervals()[0].1 - 1.05).abs() < 1e-12);
        assert!((cov.cell_size - 0.002).abs() < 1e-15);
    }

    #[test]
    fn parses_explicit_document() {
        let text = r#"{
            "arm": {"joint_count": 20, "segment_length": 0.05, "joint_limit": 150},
            "strategies": [{"kind": "rmb"}, {"kind": "rgb", "d": 0.001}],
            "selector": {"kind": "mixture", "p": 0.3},
            "n_steps": 100,
            "eval_tau": 0.02,
            "repetitions": 2,
            "master_seed": 42
        }"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(cfg.selector, SelectorSpec::Mixture { p: 0.3 });
        assert_eq!(cfg.rgb_d(), Some(0.001));
        assert_eq!(cfg.mixture_pair().unwrap(), (0, 1));
        let again = ExperimentConfig::from_json(&cfg.to_json().unwrap()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn rejects_invalid_documents() {
        for text in [
            r#"{"n_steps": 0}"#,
            r#"{"repetitions": 0}"#,
            r#"{"eval_tau": -1}"#,
            r#"{"strategies": []}"#,
            r#"{"selector": {"kind": "pure", "strategy": 5}}"#,
            r#"{"selector": {"kind": "mixture", "p": 1.5}}"#,
            r#"{"selector": {"kind": "mixture", "p": 0.5}, "strategies": [{"kind": "rmb"}]}"#,
            r#"{"selector": {"kind": "adapt", "alpha": 0}}"#,
            r#"{"strategies": [{"kind": "rgb", "d": 2}]}"#,
            r#"{"cell_size": 0.5}"#,
            r#"{"p_grid": [0.5, 1.2]}"#,
            r#"{"arm": {"joint_count": 0}}"#,
        ] {
            assert!(ExperimentConfig::from_json(text).is_err(), "{text}");
        }
    }
}
