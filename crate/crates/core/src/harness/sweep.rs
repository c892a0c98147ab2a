use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adapt::AdaptConfig;
use crate::error::Result;
use crate::harness::config::{ExperimentConfig, SelectorSpec};
use crate::harness::episode::{drive_episode, mix64, strategy_names, RunRecord};

/// Half-width of the centred usage smoothing window.
pub const USAGE_HALF_WINDOW: usize = 50;

/// Final coverage of one episode, one CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub selector: String,
    pub p: Option<f64>,
    pub d: Option<f64>,
    pub repetition: usize,
    pub final_coverage: f64,
}

/// What a sweep keeps from each episode; the step logs themselves are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeSummary {
    pub final_coverage: f64,
    pub chosen: Vec<usize>,
    /// `[strategy][t]`, selection-time diversities.
    pub diversity: Vec<Vec<f64>>,
}

impl EpisodeSummary {
    pub fn from_record(rec: &RunRecord) -> Self {
        let q = rec.strategy_names.len();
        let mut diversity = vec![Vec::with_capacity(rec.steps.len()); q];
        for s in &rec.steps {
            for (j, &v) in s.per_strategy_diversity.iter().enumerate() {
                diversity[j].push(v);
            }
        }
        Self {
            final_coverage: rec.final_coverage,
            chosen: rec.chosen(),
            diversity,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectorSummary {
    pub selector: String,
    pub p: Option<f64>,
    pub d: Option<f64>,
    pub repetitions: usize,
    pub mean: f64,
    pub std: f64,
    /// Set when fewer than two repetitions make the standard deviation meaningless.
    pub std_degenerate: bool,
    /// `[strategy][t]`: smoothed selection fractions, averaged over repetitions.
    pub usage: Vec<Vec<f64>>,
    /// `[strategy][t]`: strategy diversities, averaged over repetitions.
    pub diversity: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub strategy_names: Vec<String>,
    pub runs: Vec<RunRow>,
    pub selectors: Vec<SelectorSummary>,
}

impl SummaryStats {
    pub fn extend(&mut self, other: SummaryStats) {
        if self.strategy_names.is_empty() {
            self.strategy_names = other.strategy_names;
        }
        self.runs.extend(other.runs);
        self.selectors.extend(other.selectors);
    }

    pub fn find(&self, selector: &str, p: Option<f64>, d: Option<f64>) -> Option<&SelectorSummary> {
        self.selectors
            .iter()
            .find(|s| s.selector == selector && s.p == p && s.d == d)
    }
}

/// Mean and sample standard deviation; `None` for the std below two samples.
pub fn mean_std(values: &[f64]) -> (f64, Option<f64>) {
    let n = values.len();
    if n == 0 {
        return (0.0, None);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, None);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, Some(var.sqrt()))
}

/// Fraction of steps in `[t - half, t + half]` (clipped to the run) that chose
/// each strategy. Returned as `[strategy][t]`.
pub fn usage_curves(chosen: &[usize], q: usize, half: usize) -> Vec<Vec<f64>> {
    let n = chosen.len();
    let mut prefix = vec![vec![0u32; n + 1]; q];
    for (t, &c) in chosen.iter().enumerate() {
        for (j, row) in prefix.iter_mut().enumerate() {
            row[t + 1] = row[t] + u32::from(c == j);
        }
    }
    let mut out = vec![Vec::with_capacity(n); q];
    for t in 0..n {
        let lo = t.saturating_sub(half);
        let hi = (t + half + 1).min(n);
        let width = (hi - lo) as f64;
        for j in 0..q {
            out[j].push((prefix[j][hi] - prefix[j][lo]) as f64 / width);
        }
    }
    out
}

fn average_curves(curves: &[Vec<Vec<f64>>]) -> Vec<Vec<f64>> {
    let Some(first) = curves.first() else {
        return Vec::new();
    };
    let k = curves.len() as f64;
    let mut acc: Vec<Vec<f64>> = first.iter().map(|c| vec![0.0; c.len()]).collect();
    for curve in curves {
        for (a, c) in acc.iter_mut().zip(curve) {
            for (x, v) in a.iter_mut().zip(c) {
                *x += v;
            }
        }
    }
    for a in &mut acc {
        for x in a.iter_mut() {
            *x /= k;
        }
    }
    acc
}

pub fn summarize(
    selector: &str,
    p: Option<f64>,
    d: Option<f64>,
    q: usize,
    episodes: &[EpisodeSummary],
) -> SelectorSummary {
    let finals: Vec<f64> = episodes.iter().map(|e| e.final_coverage).collect();
    let (mean, std) = mean_std(&finals);
    let usage: Vec<_> = episodes
        .iter()
        .map(|e| usage_curves(&e.chosen, q, USAGE_HALF_WINDOW))
        .collect();
    let diversity: Vec<_> = episodes.iter().map(|e| e.diversity.clone()).collect();
    SelectorSummary {
        selector: selector.to_string(),
        p,
        d,
        repetitions: episodes.len(),
        mean,
        std: std.unwrap_or(0.0),
        std_degenerate: std.is_none(),
        usage: average_curves(&usage),
        diversity: average_curves(&diversity),
    }
}

fn run_summary(config: &ExperimentConfig, seed: u64) -> Result<EpisodeSummary> {
    let q = config.strategies.len();
    let mut chosen = Vec::with_capacity(config.n_steps);
    let mut diversity = vec![Vec::with_capacity(config.n_steps); q];
    let final_coverage = drive_episode(config, seed, |log| {
        chosen.push(log.chosen);
        for (j, &v) in log.per_strategy_diversity.iter().enumerate() {
            diversity[j].push(v);
        }
    })?;
    Ok(EpisodeSummary {
        final_coverage,
        chosen,
        diversity,
    })
}

/// Runs `config.repetitions` episodes of each selector in `selectors`.
///
/// Selector `i` seeds repetition `r` with `mix64(master_seed, i, r)`. Episodes
/// run in parallel; results come back in a fixed order.
pub fn run_selectors(
    config: &ExperimentConfig,
    selectors: &[SelectorSpec],
) -> Result<SummaryStats> {
    let reps = config.repetitions;
    let configs: Vec<ExperimentConfig> = selectors
        .iter()
        .map(|s| config.with_selector(s.clone()))
        .collect();
    for c in &configs {
        c.validate()?;
    }
    let jobs: Vec<(usize, usize)> = (0..selectors.len())
        .flat_map(|i| (0..reps).map(move |r| (i, r)))
        .collect();
    let results: Vec<EpisodeSummary> = jobs
        .par_iter()
        .map(|&(i, r)| run_summary(&configs[i], mix64(config.master_seed, i as u64, r as u64)))
        .collect::<Result<_>>()?;

    let q = config.strategies.len();
    let d = config.rgb_d();
    let mut stats = SummaryStats {
        strategy_names: strategy_names(config),
        ..Default::default()
    };
    for (i, (sel, episodes)) in selectors.iter().zip(results.chunks(reps)).enumerate() {
        debug_assert_eq!(episodes.len(), reps, "selector {i}");
        let p = match sel {
            SelectorSpec::Mixture { p } => Some(*p),
            _ => None,
        };
        let label = sel.label();
        for (r, e) in episodes.iter().enumerate() {
            stats.runs.push(RunRow {
                selector: label.to_string(),
                p,
                d,
                repetition: r,
                final_coverage: e.final_coverage,
            });
        }
        stats.selectors.push(summarize(label, p, d, q, episodes));
    }
    Ok(stats)
}

/// Every fixed mixture in `p_grid`, then the adaptive selector.
pub fn sweep(
    config: &ExperimentConfig,
    p_grid: &[f64],
    adapt_cfg: AdaptConfig,
) -> Result<SummaryStats> {
    let mut selectors: Vec<SelectorSpec> = p_grid
        .iter()
        .map(|&p| SelectorSpec::Mixture { p })
        .collect();
    selectors.push(SelectorSpec::Adapt(adapt_cfg));
    run_selectors(config, &selectors)
}
