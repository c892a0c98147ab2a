//! Diversity-proportional strategy selection.
//!
//! Each strategy keeps a short window of the effect diversities it produced.
//! With probability `alpha` the selector picks a strategy uniformly at random;
//! otherwise it picks one with probability proportional to its windowed mean
//! diversity. Untried strategies are padded with `k` fictitious entries worth
//! a full, non-overlapping ball, so every strategy gets tried early on.

use std::collections::VecDeque;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::coverage::{ball_volume, CoverageGrid, SensoryPoint};
use crate::environment::{Environment, MotorCommand};
use crate::error::{Error, Result};
use crate::strategies::{Observation, ObservationStore, Strategy};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdaptConfig {
    /// Probability of a uniform random choice, in `(0, 1]`.
    pub alpha: f64,
    pub window: usize,
    pub fictitious_count: usize,
    /// Radius used for effect diversity, meters.
    pub tau: f64,
}

impl Default for AdaptConfig {
    fn default() -> Self {
        Self {
            alpha: 0.1,
            window: 20,
            fictitious_count: 1,
            tau: 0.02,
        }
    }
}

impl AdaptConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::Config(format!(
                "alpha must lie in (0, 1], got {}",
                self.alpha
            )));
        }
        if self.window == 0 {
            return Err(Error::Config("window must be at least 1".into()));
        }
        if self.fictitious_count == 0 {
            return Err(Error::Config("fictitious_count must be at least 1".into()));
        }
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(Error::Config(format!(
                "tau must be positive, got {}",
                self.tau
            )));
        }
        Ok(())
    }
}

/// Recent diversity values attributed to one strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyCredit {
    pub strategy_id: usize,
    history: VecDeque<f64>,
    count: usize,
    fictitious_value: f64,
}

impl StrategyCredit {
    /// `fictitious_value` is the measure of one full ball, e.g. `πτ²` in the plane.
    pub fn new(strategy_id: usize, fictitious_value: f64) -> Self {
        Self {
            strategy_id,
            history: VecDeque::new(),
            count: 0,
            fictitious_value,
        }
    }

    /// Credit for a strategy in an `sensory_dim`-dimensional effect space.
    pub fn for_space(strategy_id: usize, cfg: &AdaptConfig, sensory_dim: usize) -> Self {
        Self::new(strategy_id, ball_volume(sensory_dim, cfg.tau))
    }

    /// Records a diversity value, keeping at most `window` of them.
    pub fn record(&mut self, diversity: f64, window: usize) {
        debug_assert!(diversity >= 0.0);
        self.history.push_back(diversity);
        while self.history.len() > window {
            self.history.pop_front();
        }
        self.count += 1;
    }

    /// Number of effects ever produced by this strategy.
    pub fn uses(&self) -> usize {
        self.count
    }

    pub fn history(&self) -> impl Iterator<Item = f64> + '_ {
        self.history.iter().copied()
    }

    pub fn fictitious_value(&self) -> f64 {
        self.fictitious_value
    }
}

/// Windowed mean diversity of a strategy.
///
/// With `n` real entries: if `n >= w` this is the mean of the last `w`;
/// otherwise `min(k, w - n)` fictitious full-ball entries are averaged in with
/// all `n` real ones.
pub fn strategy_diversity(credit: &StrategyCredit, cfg: &AdaptConfig) -> f64 {
    let w = cfg.window;
    let n = credit.count.min(w);
    let real_sum: f64 = credit.history.iter().rev().take(w).sum();
    if n >= w {
        return real_sum / w as f64;
    }
    let fict = cfg.fictitious_count.min(w - n);
    (real_sum + fict as f64 * credit.fictitious_value) / (fict + n) as f64
}

/// Probability of each strategy being selected given their diversities.
pub fn selection_probabilities(diversities: &[f64], alpha: f64) -> Vec<f64> {
    let q = diversities.len() as f64;
    let total: f64 = diversities.iter().sum();
    diversities
        .iter()
        .map(|&d| {
            let proportional = if total > 0.0 { d / total } else { 1.0 / q };
            alpha / q + (1.0 - alpha) * proportional
        })
        .collect()
}

/// Draws a strategy index from diversities. Returns `(index, was_random)`.
///
/// Consumes one variate for the `alpha` test and one more for the choice.
pub fn select_from_diversities<R: Rng + ?Sized>(
    diversities: &[f64],
    alpha: f64,
    rng: &mut R,
) -> Result<(usize, bool)> {
    let q = diversities.len();
    if q == 0 {
        return Err(Error::Config("no strategies to select from".into()));
    }
    if rng.gen::<f64>() < alpha {
        return Ok((rng.gen_range(0..q), true));
    }
    let total: f64 = diversities.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return Ok((rng.gen_range(0..q), false));
    }
    // Cumulative-weight inversion of a single uniform variate.
    let target = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    for (j, &d) in diversities.iter().enumerate() {
        acc += d;
        if target < acc {
            return Ok((j, false));
        }
    }
    // Rounding put the target past the last cumulative sum.
    let last = diversities.iter().rposition(|&d| d > 0.0).unwrap_or(q - 1);
    Ok((last, false))
}

pub fn select_strategy<R: Rng + ?Sized>(
    credits: &[StrategyCredit],
    cfg: &AdaptConfig,
    rng: &mut R,
) -> Result<(usize, bool)> {
    let divs: Vec<f64> = credits.iter().map(|c| strategy_diversity(c, cfg)).collect();
    select_from_diversities(&divs, cfg.alpha, rng)
}

/// One exploration step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepLog {
    pub t: usize,
    pub chosen: usize,
    pub was_random: bool,
    pub command: MotorCommand,
    pub effect: SensoryPoint,
    /// Coverage added by this step's effect, relative to every earlier effect.
    pub diversity: f64,
    pub cumulative_coverage: f64,
    /// Strategy diversities at selection time, before this step's update.
    pub per_strategy_diversity: Vec<f64>,
}

/// Owns everything one exploration episode mutates: the shared store, the
/// diversity grid and the per-strategy credits.
pub struct Explorer {
    env: Box<dyn Environment>,
    strategies: Vec<Box<dyn Strategy>>,
    store: ObservationStore,
    grid: CoverageGrid,
    credits: Vec<StrategyCredit>,
    cfg: AdaptConfig,
    t: usize,
}

impl Explorer {
    pub fn new(
        env: Box<dyn Environment>,
        strategies: Vec<Box<dyn Strategy>>,
        grid: CoverageGrid,
        cfg: AdaptConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        if strategies.is_empty() {
            return Err(Error::Config("at least one strategy is required".into()));
        }
        let s = env.sensory_dim();
        if grid.dim() != s {
            return Err(Error::Dimension {
                expected: s,
                got: grid.dim(),
            });
        }
        if (grid.tau() - cfg.tau).abs() > 1e-15 * cfg.tau {
            return Err(Error::Config(format!(
                "grid tau {} differs from selector tau {}",
                grid.tau(),
                cfg.tau
            )));
        }
        let credits = (0..strategies.len())
            .map(|j| StrategyCredit::for_space(j, &cfg, s))
            .collect();
        Ok(Self {
            env,
            strategies,
            store: ObservationStore::new(s),
            grid,
            credits,
            cfg,
            t: 0,
        })
    }

    pub fn config(&self) -> &AdaptConfig {
        &self.cfg
    }

    pub fn store(&self) -> &ObservationStore {
        &self.store
    }

    pub fn grid(&self) -> &CoverageGrid {
        &self.grid
    }

    pub fn credits(&self) -> &[StrategyCredit] {
        &self.credits
    }

    pub fn strategy_names(&self) -> Vec<String> {
        self.strategies
            .iter()
            .map(|s| s.name().to_string())
            .collect()
    }

    pub fn steps_taken(&self) -> usize {
        self.t
    }

    pub fn diversities(&self) -> Vec<f64> {
        self.credits
            .iter()
            .map(|c| strategy_diversity(c, &self.cfg))
            .collect()
    }

    /// Select with the adaptive rule, then run the chosen strategy.
    ///
    /// `selection` drives strategy choice only and `proposal` drives the
    /// strategies, so selectors that differ only in how they choose still see
    /// the same proposal stream.
    pub fn adapt_step(
        &mut self,
        selection: &mut dyn RngCore,
        proposal: &mut dyn RngCore,
    ) -> Result<StepLog> {
        let divs = self.diversities();
        let (chosen, was_random) = select_from_diversities(&divs, self.cfg.alpha, selection)?;
        self.step_with(chosen, was_random, divs, proposal)
    }

    /// Run strategy `chosen` for one step and book its diversity.
    pub fn step_as(&mut self, chosen: usize, proposal: &mut dyn RngCore) -> Result<StepLog> {
        let divs = self.diversities();
        self.step_with(chosen, false, divs, proposal)
    }

    fn step_with(
        &mut self,
        chosen: usize,
        was_random: bool,
        divs: Vec<f64>,
        proposal: &mut dyn RngCore,
    ) -> Result<StepLog> {
        let strategy = self.strategies.get(chosen).ok_or_else(|| {
            Error::Config(format!(
                "strategy index {chosen} out of range ({} strategies)",
                self.strategies.len()
            ))
        })?;
        let command = strategy.propose(&self.store, proposal)?;
        self.env.motor_space().check(&command)?;
        let effect = self.env.evaluate(&command)?;
        let diversity = self.grid.add_effect(&effect)?;
        self.credits[chosen].record(diversity, self.cfg.window);
        self.store.push(Observation {
            command: command.clone(),
            effect: effect.clone(),
        })?;
        let log = StepLog {
            t: self.t,
            chosen,
            was_random,
            command,
            effect,
            diversity,
            cumulative_coverage: self.grid.total_coverage(),
            per_strategy_diversity: divs,
        };
        self.t += 1;
        Ok(log)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coverage::{Bounds, CoverageConfig};
    use crate::environment::{ArmSpec, PlanarArm};
    use crate::strategies::{GoalBabbling, MotorBabbling, RgbConfig};
    use crate::SimRng;
    use rand::SeedableRng;
    use std::f64::consts::PI;

    fn credit_with(values: &[f64], fict: f64, w: usize) -> StrategyCredit {
        let mut c = StrategyCredit::new(0, fict);
        for &v in values {
            c.record(v, w);
        }
        c
    }

    #[test]
    fn unsampled_strategy_gets_full_ball() {
        let cfg = AdaptConfig::default();
        let c = StrategyCredit::for_space(0, &cfg, 2);
        assert!((strategy_diversity(&c, &cfg) - PI * 0.02 * 0.02).abs() < 1e-18);
    }

    #[test]
    fn fictitious_entry_is_averaged_in() {
        let cfg = AdaptConfig {
            window: 3,
            ..Default::default()
        };
        let fb = PI * 0.02 * 0.02;
        let c = credit_with(&[0.2, 0.4], fb, 3);
        assert!((strategy_diversity(&c, &cfg) - (fb + 0.2 + 0.4) / 3.0).abs() < 1e-15);
    }

    #[test]
    fn full_window_drops_fictitious_entry() {
        let cfg = AdaptConfig {
            window: 2,
            ..Default::default()
        };
        let c = credit_with(&[0.1, 0.3, 0.5], 1.0, 2);
        assert!((strategy_diversity(&c, &cfg) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn several_fictitious_entries_shrink_as_window_fills() {
        let cfg = AdaptConfig {
            window: 4,
            fictitious_count: 3,
            ..Default::default()
        };
        // n = 2 → min(3, 4 - 2) = 2 fictitious entries.
        let c = credit_with(&[0.0, 0.0], 1.0, 4);
        assert!((strategy_diversity(&c, &cfg) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn alpha_one_is_uniform() {
        let mut rng = SimRng::seed_from_u64(4);
        let mut counts = [0usize; 3];
        for _ in 0..30_000 {
            let (j, random) = select_from_diversities(&[100.0, 0.0, 0.0], 1.0, &mut rng).unwrap();
            assert!(random);
            counts[j] += 1;
        }
        for c in counts {
            assert!((c as f64 / 30_000.0 - 1.0 / 3.0).abs() < 0.015);
        }
    }

    #[test]
    fn single_strategy_always_chosen() {
        let mut rng = SimRng::seed_from_u64(4);
        for _ in 0..100 {
            assert_eq!(select_from_diversities(&[0.3], 0.1, &mut rng).unwrap().0, 0);
        }
        assert!(select_from_diversities(&[], 0.1, &mut rng).is_err());
    }

    #[test]
    fn zero_diversities_fall_back_to_uniform() {
        let p = selection_probabilities(&[0.0, 0.0], 0.1);
        assert_eq!(p, vec![0.5, 0.5]);
        let mut rng = SimRng::seed_from_u64(8);
        let mut first = 0;
        for _ in 0..20_000 {
            if select_from_diversities(&[0.0, 0.0], 0.0, &mut rng)
                .unwrap()
                .0
                == 0
            {
                first += 1;
            }
        }
        assert!((first as f64 / 20_000.0 - 0.5).abs() < 0.02);
    }

    #[test]
    fn zero_weight_is_never_chosen_without_random_choice() {
        let mut rng = SimRng::seed_from_u64(12);
        for _ in 0..10_000 {
            assert_eq!(
                select_from_diversities(&[0.0, 1.0, 0.0], 0.0, &mut rng)
                    .unwrap()
                    .0,
                1
            );
        }
    }

    #[test]
    fn config_validation() {
        assert!(AdaptConfig::default().validate().is_ok());
        for bad in [
            AdaptConfig {
                alpha: 0.0,
                ..Default::default()
            },
            AdaptConfig {
                alpha: 1.1,
                ..Default::default()
            },
            AdaptConfig {
                window: 0,
                ..Default::default()
            },
            AdaptConfig {
                fictitious_count: 0,
                ..Default::default()
            },
            AdaptConfig {
                tau: 0.0,
                ..Default::default()
            },
        ] {
            assert!(bad.validate().is_err());
        }
    }

    fn arm_explorer(cfg: AdaptConfig) -> Explorer {
        let arm = PlanarArm::new(ArmSpec::default()).unwrap();
        let space = arm.motor_space().clone();
        let grid =
            CoverageGrid::new(CoverageConfig::new(cfg.tau, Bounds::cube(-1.05, 1.05, 2))).unwrap();
        let strategies: Vec<Box<dyn Strategy>> = vec![
            Box::new(MotorBabbling::new(space.clone())),
            Box::new(GoalBabbling::new(RgbConfig::new(0.05), space).unwrap()),
        ];
        Explorer::new(Box::new(arm), strategies, grid, cfg).unwrap()
    }

    #[test]
    fn first_step_sees_equal_fictitious_diversities() {
        let mut ex = arm_explorer(AdaptConfig::default());
        let mut sel = SimRng::seed_from_u64(1);
        let mut prop = SimRng::seed_from_u64(2);
        let log = ex.adapt_step(&mut sel, &mut prop).unwrap();
        let fb = PI * 0.02 * 0.02;
        let divs = &log.per_strategy_diversity;
        assert_eq!(divs[0], divs[1]);
        assert!((divs[0] - fb).abs() < 1e-18);
        assert_eq!(log.t, 0);
    }

    #[test]
    fn step_diversity_matches_coverage_delta() {
        let mut ex = arm_explorer(AdaptConfig::default());
        let mut sel = SimRng::seed_from_u64(1);
        let mut prop = SimRng::seed_from_u64(2);
        let mut before = 0.0;
        let mut per_strategy = [0usize; 2];
        for t in 0..300 {
            let log = ex.adapt_step(&mut sel, &mut prop).unwrap();
            assert_eq!(log.t, t);
            assert!(log.diversity >= 0.0);
            assert!((log.cumulative_coverage - before - log.diversity).abs() < 1e-15);
            assert!(log.cumulative_coverage >= before);
            before = log.cumulative_coverage;
            per_strategy[log.chosen] += 1;
        }
        assert_eq!(ex.store().len(), 300);
        assert_eq!(ex.credits()[0].uses(), per_strategy[0]);
        assert_eq!(ex.credits()[1].uses(), per_strategy[1]);
    }

    #[test]
    fn mismatched_grid_tau_rejected() {
        let arm = PlanarArm::new(ArmSpec::default()).unwrap();
        let space = arm.motor_space().clone();
        let grid =
            CoverageGrid::new(CoverageConfig::new(0.03, Bounds::cube(-1.05, 1.05, 2))).unwrap();
        let r = Explorer::new(
            Box::new(arm),
            vec![Box::new(MotorBabbling::new(space)) as Box<dyn Strategy>],
            grid,
            AdaptConfig::default(),
        );
        assert!(r.is_err());
    }
}
