//! Randomized hyperparameter search for REvol.
//!
//! Each trial draws a [`RevolConfig`] uniformly from a [`SearchSpace`], runs a
//! few boundary sweeps and scores every sweep hull by its Jaccard index
//! against a dense Dirichlet benchmark region. Trials are ranked by mean
//! score.

use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::{jaccard, ForPolygon};
use crate::powerflow::PowerFlow;
use crate::revol::{self, RevolConfig};
use crate::rng;
use crate::sampling::{sample_dirichlet_two_stage, DirichletConfig};

const TUNE_STREAM: u64 = 0x7475_6e65;

/// Samples used for the benchmark region unless told otherwise.
pub const BENCHMARK_SAMPLES: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntRange {
    pub low: u64,
    pub high: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealRange {
    pub low: f64,
    pub high: f64,
}

impl IntRange {
    pub const fn new(low: u64, high: u64) -> Self {
        IntRange { low, high }
    }

    fn sample<R: Rng + ?Sized>(&self, r: &mut R) -> u64 {
        r.random_range(self.low..=self.high)
    }

    pub fn contains(&self, v: u64) -> bool {
        (self.low..=self.high).contains(&v)
    }
}

impl RealRange {
    pub const fn new(low: f64, high: f64) -> Self {
        RealRange { low, high }
    }

    fn sample<R: Rng + ?Sized>(&self, r: &mut R) -> f64 {
        if self.low == self.high {
            self.low
        } else {
            r.random_range(self.low..=self.high)
        }
    }

    pub fn contains(&self, v: f64) -> bool {
        (self.low..=self.high).contains(&v)
    }
}

/// Sampling range of every tunable hyperparameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub population_size: IntRange,
    pub elite_size: IntRange,
    pub max_epochs: IntRange,
    pub max_no_success_epochs: IntRange,
    pub t: RealRange,
    pub start_ttl: IntRange,
    pub gradient_weight: RealRange,
    pub success_weight: RealRange,
    pub target_success: RealRange,
    pub max_scatter_relative: RealRange,
}

impl Default for SearchSpace {
    /// Ranges that produced the default [`RevolConfig`].
    fn default() -> Self {
        SearchSpace {
            population_size: IntRange::new(20, 40),
            elite_size: IntRange::new(2, 5),
            max_epochs: IntRange::new(500, 20_000),
            max_no_success_epochs: IntRange::new(20, 20_000),
            t: RealRange::new(10.0, 20_000.0),
            start_ttl: IntRange::new(80, 20_000),
            gradient_weight: RealRange::new(0.0, 3.0),
            success_weight: RealRange::new(0.0, 3.0),
            target_success: RealRange::new(0.1, 0.4),
            max_scatter_relative: RealRange::new(0.2, 3.0),
        }
    }
}

impl SearchSpace {
    /// Caps the epoch budget for desk-scale searches.
    pub fn with_epoch_cap(mut self, cap: u64) -> Self {
        self.max_epochs.high = self.max_epochs.high.min(cap);
        self.max_epochs.low = self.max_epochs.low.min(self.max_epochs.high);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let ints = [
            ("population_size", self.population_size),
            ("elite_size", self.elite_size),
            ("max_epochs", self.max_epochs),
            ("max_no_success_epochs", self.max_no_success_epochs),
            ("start_ttl", self.start_ttl),
        ];
        for (name, r) in ints {
            if r.low > r.high {
                return Err(Error::InvalidConfig(format!("{name}: low > high")));
            }
        }
        let reals = [
            ("t", self.t),
            ("gradient_weight", self.gradient_weight),
            ("success_weight", self.success_weight),
            ("target_success", self.target_success),
            ("max_scatter_relative", self.max_scatter_relative),
        ];
        for (name, r) in reals {
            if !(r.low <= r.high) || !r.low.is_finite() || !r.high.is_finite() {
                return Err(Error::InvalidConfig(format!("{name}: empty or non-finite range")));
            }
        }
        if self.elite_size.high >= self.population_size.low {
            return Err(Error::InvalidConfig("elite_size may reach population_size".into()));
        }
        if self.elite_size.low == 0 || self.population_size.low < 2 {
            return Err(Error::InvalidConfig("elite and population must be non-trivial".into()));
        }
        if !(self.target_success.low > 0.0 && self.target_success.high < 1.0) {
            return Err(Error::InvalidConfig("target_success must lie in (0, 1)".into()));
        }
        Ok(())
    }

    pub fn contains(&self, c: &RevolConfig) -> bool {
        self.population_size.contains(c.population_size as u64)
            && self.elite_size.contains(c.elite_size as u64)
            && self.max_epochs.contains(c.max_epochs as u64)
            && self.max_no_success_epochs.contains(c.max_no_success_epochs as u64)
            && self.t.contains(c.t)
            && self.start_ttl.contains(c.start_ttl)
            && self.gradient_weight.contains(c.gradient_weight)
            && self.success_weight.contains(c.success_weight)
            && self.target_success.contains(c.target_success)
            && self.max_scatter_relative.contains(c.max_scatter_relative)
    }

    /// Draws one configuration. Fields outside the space come from `base`.
    pub fn sample<R: Rng + ?Sized>(&self, base: &RevolConfig, r: &mut R) -> RevolConfig {
        RevolConfig {
            population_size: self.population_size.sample(r) as usize,
            elite_size: self.elite_size.sample(r) as usize,
            max_epochs: self.max_epochs.sample(r) as usize,
            max_no_success_epochs: self.max_no_success_epochs.sample(r) as usize,
            t: self.t.sample(r),
            start_ttl: self.start_ttl.sample(r),
            gradient_weight: self.gradient_weight.sample(r),
            success_weight: self.success_weight.sample(r),
            target_success: self.target_success.sample(r),
            max_scatter_relative: self.max_scatter_relative.sample(r),
            ..base.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub config: RevolConfig,
    /// Jaccard index of each sweep; 0 where the sweep hull was degenerate.
    pub scores: Vec<f64>,
    pub mean: f64,
    pub std: f64,
    pub pf_calls: u64,
}

/// Mean and sample standard deviation (zero for a single value).
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Hull of a two-stage Dirichlet cloud of `n` samples.
pub fn build_benchmark(pf: &PowerFlow<'_>, seed: u64, n: usize, exec: Execution) -> Result<ForPolygon> {
    sample_dirichlet_two_stage(pf, &DirichletConfig::new(n, seed), exec)?.hull()
}

/// Scores every sweep of `cfg` against `benchmark`.
pub fn score_config(
    pf: &PowerFlow<'_>,
    cfg: &RevolConfig,
    runs: usize,
    benchmark: &ForPolygon,
    exec: Execution,
) -> Result<(Vec<f64>, u64)> {
    let sweeps = revol::sweep_runs(pf, cfg, runs, exec)?;
    let scores = sweeps
        .iter()
        .map(|s| s.hull().and_then(|h| jaccard(&h, benchmark)).unwrap_or(0.0))
        .collect();
    Ok((scores, sweeps.iter().map(|s| s.pf_calls).sum()))
}

/// Runs `trials` sampled configurations, best mean score first.
///
/// The ranking is a stable sort, so ties keep trial order.
#[allow(clippy::too_many_arguments)]
pub fn random_search(
    space: &SearchSpace,
    base: &RevolConfig,
    trials: usize,
    runs_per_trial: usize,
    pf: &PowerFlow<'_>,
    benchmark: &ForPolygon,
    seed: u64,
    exec: Execution,
) -> Result<Vec<TrialRecord>> {
    if trials == 0 || runs_per_trial == 0 {
        return Err(Error::InvalidConfig("trials and runs must be at least 1".into()));
    }
    space.validate()?;
    let mut records = exec.map_range(trials, |trial| {
        let mut r = rng::stream(seed, &[TUNE_STREAM, trial as u64]);
        let mut config = space.sample(base, &mut r);
        config.seed = rng::derive_key(seed, &[TUNE_STREAM, trial as u64, 1]);
        let (scores, pf_calls) = score_config(pf, &config, runs_per_trial, benchmark, exec)
            .unwrap_or_else(|_| (vec![0.0; runs_per_trial], 0));
        let (mean, std) = mean_std(&scores);
        TrialRecord {
            trial,
            config,
            scores,
            mean,
            std,
            pf_calls,
        }
    });
    records.sort_by(|a, b| b.mean.total_cmp(&a.mean));
    Ok(records)
}

pub const TRIAL_HEADER: [&str; 16] = [
    "rank",
    "trial",
    "population_size",
    "elite_size",
    "max_epochs",
    "max_no_success_epochs",
    "t",
    "start_ttl",
    "gradient_weight",
    "success_weight",
    "target_success",
    "max_scatter_relative",
    "seed",
    "mean_jaccard",
    "std_jaccard",
    "pf_calls",
];

pub fn write_trials_csv<W: Write>(records: &[TrialRecord], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(TRIAL_HEADER)?;
    for (rank, rec) in records.iter().enumerate() {
        let c = &rec.config;
        wr.write_record([
            (rank + 1).to_string(),
            rec.trial.to_string(),
            c.population_size.to_string(),
            c.elite_size.to_string(),
            c.max_epochs.to_string(),
            c.max_no_success_epochs.to_string(),
            c.t.to_string(),
            c.start_ttl.to_string(),
            c.gradient_weight.to_string(),
            c.success_weight.to_string(),
            c.target_success.to_string(),
            c.max_scatter_relative.to_string(),
            c.seed.to_string(),
            rec.mean.to_string(),
            rec.std.to_string(),
            rec.pf_calls.to_string(),
        ])?;
    }
    wr.flush()?;
    Ok(())
}
