//! Monte Carlo estimation of the uniform distance between the law of the
//! standardized sample quantile and the standard normal.
//!
//! Each replication draws from its own stream keyed by
//! `(seed, cell, replication)`, and the replications are sorted before any
//! reduction, so results do not depend on the number of worker threads.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assoc_model::{least_squares, MovingAverageModel, PathScratch};
use crate::empirical::select_quantile;
use crate::error::{Error, Result};
use crate::normal_math;
use crate::rng::{stream_id, RandomStream};
use crate::theory::{make_quantile_spec, QuantileSpec};

/// Evaluation grid `lo, lo + step, ..., hi` for `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TGrid {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Default for TGrid {
    fn default() -> Self {
        Self { lo: -4.0, hi: 4.0, step: 0.01 }
    }
}

impl TGrid {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step <= 0.1) {
            return Err(Error::Config(format!("t-grid step must lie in (0, 0.1], got {}", self.step)));
        }
        if !(self.lo < self.hi && self.lo.is_finite() && self.hi.is_finite()) {
            return Err(Error::Config(format!("t-grid bounds [{}, {}] are invalid", self.lo, self.hi)));
        }
        Ok(())
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        let count = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize;
        (0..=count).map(move |i| self.lo + i as f64 * self.step)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub model: MovingAverageModel,
    pub p_levels: Vec<f64>,
    pub n_values: Vec<usize>,
    pub replications: usize,
    #[serde(default)]
    pub t_grid: TGrid,
    pub master_seed: u64,
}

pub const MIN_REPLICATIONS: usize = 100;

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replications < MIN_REPLICATIONS {
            return Err(Error::Config(format!(
                "replications must be at least {MIN_REPLICATIONS}, got {}",
                self.replications
            )));
        }
        if self.replications > u32::MAX as usize {
            return Err(Error::Config("replications exceed the stream index range".into()));
        }
        self.t_grid.validate()?;
        if self.n_values.is_empty() || self.p_levels.is_empty() {
            return Err(Error::Config("need at least one n and one p".into()));
        }
        if self.n_values.windows(2).any(|w| w[0] >= w[1]) || self.n_values[0] == 0 {
            return Err(Error::Config("n_values must be positive and strictly increasing".into()));
        }
        if let Some(p) = self.p_levels.iter().find(|p| !(**p > 0.0 && **p < 1.0)) {
            return Err(Error::Config(format!("quantile level {p} is outside (0, 1)")));
        }
        Ok(())
    }

    /// Cells in `(p, n)` row-major order; the position is the cell index.
    pub fn cells(&self) -> Vec<(f64, usize)> {
        self.p_levels
            .iter()
            .flat_map(|&p| self.n_values.iter().map(move |&n| (p, n)))
            .collect()
    }
}

/// One `(p, n)` cell of the distance table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerryEsseenEstimate {
    pub n: usize,
    pub p: f64,
    /// `max_t |G_hat(t) - Phi(t)|` over the t-grid.
    pub d_n: f64,
    pub argmax_t: f64,
    /// Same supremum taken over every jump of `G_hat` inside the grid range.
    pub d_n_jumps: f64,
    /// Largest binomial standard error `sqrt(G(1-G)/R)` over the grid.
    pub mc_se: f64,
    pub replications: usize,
    pub quantile: QuantileSpec,
}

/// `sqrt(n) (x_{n,p} - x_p) / a_p` for one simulated path.
pub fn standardized_statistic(
    model: &MovingAverageModel,
    spec: &QuantileSpec,
    n: usize,
    stream: &mut RandomStream,
) -> f64 {
    let mut scratch = PathScratch::default();
    statistic_with(model, spec, n, stream, &mut scratch)
}

fn statistic_with(
    model: &MovingAverageModel,
    spec: &QuantileSpec,
    n: usize,
    stream: &mut RandomStream,
    scratch: &mut PathScratch,
) -> f64 {
    let path = model.simulate_into(n, stream, scratch);
    let q = select_quantile(path, spec.p).expect("level validated by QuantileSpec");
    (n as f64).sqrt() * (q - spec.x_p) / spec.a_p
}

/// Draws the `R` standardized statistics of a cell, sorted ascending.
pub fn simulate_statistics(
    model: &MovingAverageModel,
    spec: &QuantileSpec,
    n: usize,
    replications: usize,
    seed: u64,
    cell: u32,
) -> Vec<f64> {
    let mut stats: Vec<f64> = (0..replications as u32)
        .into_par_iter()
        .map_init(PathScratch::default, |scratch, r| {
            let mut stream = RandomStream::new(seed, stream_id(cell, r));
            statistic_with(model, spec, n, &mut stream, scratch)
        })
        .collect();
    stats.sort_unstable_by(f64::total_cmp);
    stats
}

/// Empirical CDF of sorted statistics at `t`: fraction `<= t`.
#[inline]
fn ecdf_sorted(sorted: &[f64], t: f64) -> f64 {
    sorted.partition_point(|&v| v <= t) as f64 / sorted.len() as f64
}

/// Distance summary of sorted statistics against `Phi` over `grid`.
pub fn distance_from_sorted(sorted: &[f64], grid: &TGrid) -> (f64, f64, f64, f64) {
    let r = sorted.len() as f64;
    let (mut d, mut arg, mut se) = (0.0_f64, grid.lo, 0.0_f64);
    for t in grid.points() {
        let g = ecdf_sorted(sorted, t);
        let dev = (g - normal_math::cdf(t)).abs();
        if dev > d {
            d = dev;
            arg = t;
        }
        se = se.max((g * (1.0 - g) / r).sqrt());
    }
    (d, arg, jump_supremum(sorted, grid.lo, grid.hi), se)
}

/// `sup_{t in [lo, hi]} |G_hat(t) - Phi(t)|`, attained at `lo`, `hi`, or on
/// either side of a jump of `G_hat`.
fn jump_supremum(sorted: &[f64], lo: f64, hi: f64) -> f64 {
    let r = sorted.len() as f64;
    let mut d = (ecdf_sorted(sorted, lo) - normal_math::cdf(lo))
        .abs()
        .max((ecdf_sorted(sorted, hi) - normal_math::cdf(hi)).abs());
    let start = sorted.partition_point(|&v| v <= lo);
    let mut i = start;
    while i < sorted.len() && sorted[i] <= hi {
        let s = sorted[i];
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == s {
            j += 1;
        }
        let phi = normal_math::cdf(s);
        d = d.max((i as f64 / r - phi).abs()).max((j as f64 / r - phi).abs());
        i = j;
    }
    d
}

/// Estimates one cell. Deterministic in `(model, spec, n, R, grid, seed, cell)`.
pub fn estimate_distance(
    model: &MovingAverageModel,
    spec: &QuantileSpec,
    n: usize,
    replications: usize,
    grid: &TGrid,
    seed: u64,
    cell: u32,
) -> BerryEsseenEstimate {
    let sorted = simulate_statistics(model, spec, n, replications, seed, cell);
    let (d_n, argmax_t, d_n_jumps, mc_se) = distance_from_sorted(&sorted, grid);
    BerryEsseenEstimate { n, p: spec.p, d_n, argmax_t, d_n_jumps, mc_se, replications, quantile: *spec }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellFailure {
    pub p: f64,
    pub n: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOutcome {
    pub estimates: Vec<BerryEsseenEstimate>,
    pub failures: Vec<CellFailure>,
}

/// Runs every `(p, n)` cell of `config`. A failing cell is reported and the
/// remaining cells still run.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    config.validate()?;
    let mut outcome = ExperimentOutcome { estimates: Vec::new(), failures: Vec::new() };
    for (cell, (p, n)) in config.cells().into_iter().enumerate() {
        match make_quantile_spec(&config.model, p) {
            Ok(spec) => outcome.estimates.push(estimate_distance(
                &config.model,
                &spec,
                n,
                config.replications,
                &config.t_grid,
                config.master_seed,
                cell as u32,
            )),
            Err(e) => outcome.failures.push(CellFailure { p, n, message: e.to_string() }),
        }
    }
    Ok(outcome)
}

/// Least-squares fit of `log D_n` on `log n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// `(n, D_n)` pairs used.
    pub cells: Vec<(usize, f64)>,
}

pub fn fit_rate(estimates: &[BerryEsseenEstimate]) -> Result<RateFit> {
    let points: Vec<(usize, f64)> = estimates.iter().map(|e| (e.n, e.d_n)).collect();
    fit_rate_points(&points)
}

pub fn fit_rate_points(points: &[(usize, f64)]) -> Result<RateFit> {
    let mut ns: Vec<usize> = points.iter().map(|&(n, _)| n).collect();
    ns.sort_unstable();
    ns.dedup();
    if ns.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "rate fit needs at least 3 distinct n, got {}",
            ns.len()
        )));
    }
    if let Some(&(n, d)) = points.iter().find(|&&(_, d)| !(d > 0.0 && d.is_finite())) {
        return Err(Error::InsufficientData(format!("distance {d} at n = {n} has no logarithm")));
    }
    let xs: Vec<f64> = points.iter().map(|&(n, _)| (n as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, d)| d.ln()).collect();
    let (slope, intercept, r_squared) = least_squares(&xs, &ys);
    Ok(RateFit { slope, intercept, r_squared, cells: points.to_vec() })
}
