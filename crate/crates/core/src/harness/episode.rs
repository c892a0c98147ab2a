use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::adapt::{AdaptConfig, Explorer, StepLog};
use crate::coverage::CoverageGrid;
use crate::environment::{Environment, PlanarArm};
use crate::error::Result;
use crate::harness::config::{ExperimentConfig, SelectorSpec};
use crate::SimRng;

/// SplitMix64 finalizer: a bijective 64-bit avalanche mix.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of repetition `rep` of selector `selector` under `master`.
pub fn mix64(master: u64, selector: u64, rep: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ selector) ^ rep)
}

/// Independent selection and proposal streams derived from one episode seed.
pub fn episode_streams(seed: u64) -> (SimRng, SimRng) {
    let mut selection = SimRng::seed_from_u64(seed);
    selection.set_stream(0);
    let mut proposal = SimRng::seed_from_u64(seed);
    proposal.set_stream(1);
    (selection, proposal)
}

/// Behavioural trace of one episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config: ExperimentConfig,
    pub seed: u64,
    pub strategy_names: Vec<String>,
    pub steps: Vec<StepLog>,
    /// Coverage at `eval_tau` after the last step.
    pub final_coverage: f64,
}

impl RunRecord {
    pub fn chosen(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.chosen).collect()
    }
}

/// Runs one episode, handing every step to `on_step` as it happens, and
/// returns the final coverage at `eval_tau`.
pub fn drive_episode<F>(config: &ExperimentConfig, seed: u64, mut on_step: F) -> Result<f64>
where
    F: FnMut(&StepLog),
{
    config.validate()?;
    let arm = PlanarArm::new(config.arm)?;
    let space = arm.motor_space().clone();
    let strategies = config
        .strategies
        .iter()
        .map(|s| s.build(&space))
        .collect::<Result<Vec<_>>>()?;

    // Non-adaptive selectors still keep credits, at eval_tau, for the diversity curves.
    let adapt_cfg = match &config.selector {
        SelectorSpec::Adapt(cfg) => *cfg,
        _ => AdaptConfig {
            tau: config.eval_tau,
            ..AdaptConfig::default()
        },
    };
    let grid = CoverageGrid::new(config.coverage_config(adapt_cfg.tau))?;
    let mut eval_grid = if adapt_cfg.tau == config.eval_tau {
        None
    } else {
        Some(CoverageGrid::new(config.coverage_config(config.eval_tau))?)
    };
    let mut explorer = Explorer::new(Box::new(arm), strategies, grid, adapt_cfg)?;
    let (mut selection, mut proposal) = episode_streams(seed);
    let mixture = match config.selector {
        SelectorSpec::Mixture { .. } => Some(config.mixture_pair()?),
        _ => None,
    };

    for _ in 0..config.n_steps {
        let log = match config.selector {
            SelectorSpec::Adapt(_) => explorer.adapt_step(&mut selection, &mut proposal)?,
            SelectorSpec::Pure { strategy } => explorer.step_as(strategy, &mut proposal)?,
            SelectorSpec::Mixture { p } => {
                // Exactly one selection variate per step.
                let (rmb, rgb) = mixture.expect("mixture pair resolved above");
                let u: f64 = selection.gen();
                explorer.step_as(if u < p { rmb } else { rgb }, &mut proposal)?
            }
        };
        if let Some(g) = eval_grid.as_mut() {
            g.add_effect(&log.effect)?;
        }
        on_step(&log);
    }
    Ok(match &eval_grid {
        Some(g) => g.total_coverage(),
        None => explorer.grid().total_coverage(),
    })
}

pub fn run_episode(config: &ExperimentConfig, seed: u64) -> Result<RunRecord> {
    let mut steps = Vec::with_capacity(config.n_steps);
    let final_coverage = drive_episode(config, seed, |log| steps.push(log.clone()))?;
    Ok(RunRecord {
        config: config.clone(),
        seed,
        strategy_names: strategy_names(config),
        steps,
        final_coverage,
    })
}

pub fn strategy_names(config: &ExperimentConfig) -> Vec<String> {
    use crate::harness::config::StrategySpec;
    config
        .strategies
        .iter()
        .map(|s| match s {
            StrategySpec::Rmb => "rmb".to_string(),
            StrategySpec::Rgb(cfg) => format!("rgb(d={})", cfg.d),
        })
        .collect()
}
