//! Coverage measure over effects: the Lebesgue measure of the union of
//! radius-`tau` balls centred on every observed effect.
//!
//! The measure is discretized on a regular occupancy grid. A cell counts as
//! covered once its centre lies within `tau` of some effect; cells are never
//! uncovered, so the total only grows and does not depend on insertion order.

use rand::Rng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::SimRng;

/// Upper bound on the number of grid cells a single coverage grid may allocate.
const MAX_CELLS: u128 = 1 << 32;

/// An effect in the sensory space, in meters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SensoryPoint(pub Vec<f64>);

impl SensoryPoint {
    pub fn new(coords: Vec<f64>) -> Self {
        Self(coords)
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn dist_sq(&self, other: &SensoryPoint) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }
}

impl From<Vec<f64>> for SensoryPoint {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// Axis-aligned hyperrectangle, one closed `[lo, hi]` interval per axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Bounds(pub Vec<(f64, f64)>);

impl Bounds {
    pub fn new(intervals: Vec<(f64, f64)>) -> Self {
        Self(intervals)
    }

    /// The same `[lo, hi]` interval on each of `dim` axes.
    pub fn cube(lo: f64, hi: f64, dim: usize) -> Self {
        Self(vec![(lo, hi); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.0
    }

    pub fn volume(&self) -> f64 {
        self.0.iter().map(|(lo, hi)| hi - lo).product()
    }

    /// At least one axis, every axis finite with `lo < hi`.
    pub fn is_nondegenerate(&self) -> bool {
        !self.0.is_empty()
            && self
                .0
                .iter()
                .all(|&(lo, hi)| lo.is_finite() && hi.is_finite() && lo < hi)
    }

    pub fn contains(&self, coords: &[f64]) -> bool {
        coords.len() == self.0.len()
            && coords
                .iter()
                .zip(&self.0)
                .all(|(&c, &(lo, hi))| c >= lo && c <= hi)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.0
            .iter()
            .map(|&(lo, hi)| rng.gen_range(lo..=hi))
            .collect()
    }
}

/// Volume of the `dim`-dimensional ball of radius `radius`.
pub fn ball_volume(dim: usize, radius: f64) -> f64 {
    // V_0 = 1, V_1 = 2, V_n = 2π/n · V_{n-2} for the unit ball.
    let mut unit = [1.0_f64, 2.0_f64];
    for n in 2..=dim {
        unit[n % 2] *= 2.0 * std::f64::consts::PI / n as f64;
    }
    unit[dim % 2] * radius.powi(dim as i32)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageConfig {
    pub tau: f64,
    pub bounds: Bounds,
    pub cell_size: f64,
}

impl CoverageConfig {
    /// Configuration with the default resolution `cell_size = tau / 10`.
    pub fn new(tau: f64, bounds: Bounds) -> Self {
        Self {
            tau,
            bounds,
            cell_size: tau / 10.0,
        }
    }

    pub fn with_cell_size(mut self, cell_size: f64) -> Self {
        self.cell_size = cell_size;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(Error::Config(format!(
                "tau must be positive, got {}",
                self.tau
            )));
        }
        if !(self.cell_size.is_finite() && self.cell_size > 0.0) {
            return Err(Error::Config(format!(
                "cell_size must be positive, got {}",
                self.cell_size
            )));
        }
        if self.cell_size > self.tau {
            return Err(Error::Config(format!(
                "cell_size {} exceeds tau {}",
                self.cell_size, self.tau
            )));
        }
        if !self.bounds.is_nondegenerate() {
            return Err(Error::Config(format!(
                "coverage bounds are degenerate: {:?}",
                self.bounds
            )));
        }
        Ok(())
    }
}

/// Occupancy grid accumulating the union of `tau`-balls around effects.
#[derive(Debug, Clone)]
pub struct CoverageGrid {
    config: CoverageConfig,
    dims: Vec<usize>,
    strides: Vec<usize>,
    bits: Vec<u64>,
    covered_cells: u64,
    cell_volume: f64,
}

/// Cells per axis. Ratios within rounding noise of an integer are not bumped up.
fn cells_along(lo: f64, hi: f64, cell: f64) -> usize {
    let ratio = (hi - lo) / cell;
    let rounded = ratio.round();
    if (ratio - rounded).abs() < 1e-9 * rounded.max(1.0) {
        rounded.max(1.0) as usize
    } else {
        ratio.ceil() as usize
    }
}

impl CoverageGrid {
    pub fn new(config: CoverageConfig) -> Result<Self> {
        config.validate()?;
        let h = config.cell_size;
        let dims: Vec<usize> = config
            .bounds
            .intervals()
            .iter()
            .map(|&(lo, hi)| cells_along(lo, hi, h))
            .collect();
        let total: u128 = dims.iter().map(|&n| n as u128).product();
        if total > MAX_CELLS {
            return Err(Error::Config(format!(
                "coverage grid would need {total} cells; raise cell_size or shrink bounds"
            )));
        }
        let mut strides = vec![1usize; dims.len()];
        for axis in (0..dims.len().saturating_sub(1)).rev() {
            strides[axis] = strides[axis + 1] * dims[axis + 1];
        }
        let words = (total as usize).div_ceil(64);
        let cell_volume = h.powi(dims.len() as i32);
        Ok(Self {
            config,
            dims,
            strides,
            bits: vec![0; words],
            covered_cells: 0,
            cell_volume,
        })
    }

    pub fn config(&self) -> &CoverageConfig {
        &self.config
    }

    pub fn tau(&self) -> f64 {
        self.config.tau
    }

    pub fn dim(&self) -> usize {
        self.dims.len()
    }

    /// Number of cells along each axis.
    pub fn shape(&self) -> &[usize] {
        &self.dims
    }

    pub fn covered_cells(&self) -> u64 {
        self.covered_cells
    }

    pub fn cell_volume(&self) -> f64 {
        self.cell_volume
    }

    pub fn total_coverage(&self) -> f64 {
        self.covered_cells as f64 * self.cell_volume
    }

    /// Marks every cell whose centre lies within `tau` of `y` and returns the
    /// newly covered measure, i.e. the diversity of `y` relative to all
    /// effects added before it.
    pub fn add_effect(&mut self, y: &SensoryPoint) -> Result<f64> {
        let new_cells = self.insert(y)?;
        Ok(new_cells as f64 * self.cell_volume)
    }

    /// Like [`add_effect`](Self::add_effect) but returns the count of newly
    /// covered cells.
    pub fn insert(&mut self, y: &SensoryPoint) -> Result<u64> {
        let s = self.dims.len();
        if y.dim() != s {
            return Err(Error::Dimension {
                expected: s,
                got: y.dim(),
            });
        }
        if !y.coords().iter().all(|c| c.is_finite()) || !self.config.bounds.contains(y.coords()) {
            return Err(Error::OutOfBounds {
                point: y.coords().to_vec(),
            });
        }

        let h = self.config.cell_size;
        let tau = self.config.tau;
        let tau_sq = tau * tau;

        // Per axis: candidate index range and the squared offset of each
        // candidate cell centre from y along that axis.
        let mut first = Vec::with_capacity(s);
        let mut offsets: Vec<Vec<f64>> = Vec::with_capacity(s);
        for (axis, (&c, &(lo, _))) in y
            .coords()
            .iter()
            .zip(self.config.bounds.intervals())
            .enumerate()
        {
            let n = self.dims[axis] as i64;
            let start = (((c - tau - lo) / h) - 0.5).ceil() as i64;
            let end = (((c + tau - lo) / h) - 0.5).floor() as i64;
            let start = start.max(0);
            let end = end.min(n - 1);
            if start > end {
                return Ok(0);
            }
            first.push(start as usize);
            offsets.push(
                (start..=end)
                    .map(|i| {
                        let centre = lo + (i as f64 + 0.5) * h;
                        (centre - c) * (centre - c)
                    })
                    .collect(),
            );
        }

        let mut added = 0u64;
        let mut cursor = vec![0usize; s];
        'cells: loop {
            let mut d2 = 0.0;
            let mut flat = 0usize;
            for axis in 0..s {
                d2 += offsets[axis][cursor[axis]];
                flat += (first[axis] + cursor[axis]) * self.strides[axis];
            }
            if d2 <= tau_sq {
                let (word, bit) = (flat / 64, flat % 64);
                let mask = 1u64 << bit;
                if self.bits[word] & mask == 0 {
                    self.bits[word] |= mask;
                    added += 1;
                }
            }
            // Odometer over the candidate box, last axis fastest.
            let mut axis = s;
            loop {
                if axis == 0 {
                    break 'cells;
                }
                axis -= 1;
                cursor[axis] += 1;
                if cursor[axis] < offsets[axis].len() {
                    break;
                }
                cursor[axis] = 0;
            }
        }
        self.covered_cells += added;
        Ok(added)
    }
}

/// Monte-Carlo estimate of the union-of-balls area, independent of the grid.
///
/// Returns `(estimate, stderr)` where the estimate is the fraction of uniform
/// samples in `bounds` lying within `tau` of some point, scaled by the bounds
/// volume.
pub fn mc_coverage_oracle(
    points: &[SensoryPoint],
    tau: f64,
    bounds: &Bounds,
    n_samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if !bounds.is_nondegenerate() {
        return Err(Error::Config("oracle bounds are empty".into()));
    }
    if n_samples == 0 {
        return Err(Error::Config("n_samples must be positive".into()));
    }
    if points.is_empty() {
        return Ok((0.0, 0.0));
    }
    let dim = bounds.dim();
    if let Some(p) = points.iter().find(|p| p.dim() != dim) {
        return Err(Error::Dimension {
            expected: dim,
            got: p.dim(),
        });
    }

    // Points sorted on the first axis; each sample only scans the slab
    // |x0 - p0| <= tau.
    let mut sorted: Vec<&[f64]> = points.iter().map(|p| p.coords()).collect();
    sorted.sort_by(|a, b| a[0].total_cmp(&b[0]));
    let keys: Vec<f64> = sorted.iter().map(|p| p[0]).collect();
    let tau_sq = tau * tau;

    let mut rng = SimRng::seed_from_u64(seed);
    let mut sample = vec![0.0; dim];
    let mut hits = 0usize;
    for _ in 0..n_samples {
        for (v, &(lo, hi)) in sample.iter_mut().zip(bounds.intervals()) {
            *v = rng.gen_range(lo..hi);
        }
        let from = keys.partition_point(|&k| k < sample[0] - tau);
        let covered = sorted[from..]
            .iter()
            .take_while(|p| p[0] <= sample[0] + tau)
            .any(|p| {
                p.iter()
                    .zip(&sample)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    <= tau_sq
            });
        if covered {
            hits += 1;
        }
    }
    let vol = bounds.volume();
    let p = hits as f64 / n_samples as f64;
    Ok((p * vol, vol * (p * (1.0 - p) / n_samples as f64).sqrt()))
}
