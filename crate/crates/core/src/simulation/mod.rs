//! Seeded, worker-count-invariant Monte Carlo.
//!
//! Every replicate draws from its own ChaCha8 stream keyed by `(seed, index)`,
//! and the index space is cut into contiguous blocks, one per worker. Results
//! are gathered in index order, so outputs depend only on `(seed, reps)`.

pub mod coverage;
pub mod ks;
pub mod mc;
pub mod pivots;
pub mod records;
pub mod rng;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::record::ParetoParams;

pub use coverage::{estimate_coverage, estimate_coverage_given_tm, estimate_rejection_rate};
pub use ks::{ks_critical_1pct, ks_statistic, ks_test_1pct, KsOutcome};
pub use mc::{
    estimate_expectation_rm, run_replicates, simulate_cstar, simulate_estimator_accuracy,
    simulate_quantile_power_chisq, simulate_quantile_xm_exp, simulate_tm_histogram,
    simulate_w_quantiles, EstimatorAccuracy, TmHistogram,
};
pub use pivots::{validate_pivot, Pivot};
pub use records::{gen_records, gen_records_naive};
pub use rng::{replicate_rng, RNG_ALGORITHM};

/// Default safety cap on trial-by-trial sampling.
pub const DEFAULT_TRIAL_CAP: u64 = 1_000_000_000;

/// Parent law generating the observations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Parent {
    Pareto(ParetoParams),
    /// `μ + σ·Exp(1)` with `μ ≥ 0`, so observations stay positive.
    Exponential {
        mu: f64,
        sigma: f64,
    },
    /// Uniform on `(0, 1)`.
    Uniform,
}

impl Parent {
    pub fn exponential(mu: f64, sigma: f64) -> Result<Self> {
        if !(mu >= 0.0 && mu.is_finite() && sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Domain(format!(
                "exponential parent needs mu >= 0 and sigma > 0, got mu={mu}, sigma={sigma}"
            )));
        }
        Ok(Self::Exponential { mu, sigma })
    }

    /// `F^{-1}(v)`, written to stay accurate as `v → 0`.
    pub fn quantile_lower(&self, v: f64) -> f64 {
        match *self {
            Self::Pareto(p) => p.beta * (-(-v).ln_1p() / p.alpha).exp(),
            Self::Exponential { mu, sigma } => mu - sigma * (-v).ln_1p(),
            Self::Uniform => v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub seed: u64,
    pub reps: u64,
    pub workers: usize,
    pub parent: Parent,
    pub trial_cap: u64,
}

impl SimConfig {
    pub fn new(seed: u64, reps: u64, workers: usize, parent: Parent) -> Result<Self> {
        if reps == 0 {
            return Err(Error::Domain("reps must be at least 1".into()));
        }
        if workers == 0 {
            return Err(Error::Domain("workers must be at least 1".into()));
        }
        Ok(Self {
            seed,
            reps,
            workers,
            parent,
            trial_cap: DEFAULT_TRIAL_CAP,
        })
    }

    /// Unit Pareto parent, the natural choice for parameter-free statistics.
    pub fn standard(seed: u64, reps: u64, workers: usize) -> Result<Self> {
        Self::new(
            seed,
            reps,
            workers,
            Parent::Pareto(ParetoParams {
                beta: 1.0,
                alpha: 1.0,
            }),
        )
    }

    pub fn with_parent(mut self, parent: Parent) -> Self {
        self.parent = parent;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_reps(mut self, reps: u64) -> Self {
        self.reps = reps.max(1);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// False when the running mean moved by more than 1% over the last decade of replicates.
    pub tail_stable: bool,
    pub notes: Vec<String>,
}

impl Default for Diagnostics {
    fn default() -> Self {
        Self {
            tail_stable: true,
            notes: Vec::new(),
        }
    }
}

/// A Monte Carlo estimate with its standard error and provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalSummary {
    pub point: f64,
    pub std_error: f64,
    pub reps_used: u64,
    pub seed: u64,
    pub rng: String,
    pub diagnostics: Diagnostics,
}

impl EmpiricalSummary {
    pub(crate) fn new(point: f64, std_error: f64, cfg: &SimConfig) -> Self {
        Self {
            point,
            std_error,
            reps_used: cfg.reps,
            seed: cfg.seed,
            rng: RNG_ALGORITHM.to_string(),
            diagnostics: Diagnostics::default(),
        }
    }

    /// True when `target` lies within `k` standard errors of the estimate.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.point - target).abs() <= k * self.std_error
    }
}
