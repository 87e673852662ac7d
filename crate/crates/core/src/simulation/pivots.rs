use serde::{Deserialize, Serialize};

use crate::densities::{fw_cdf, g_cdf};
use crate::error::{Error, Result};
use crate::numerics::{chisq_cdf, QuadratureSpec};
use crate::record::{ParetoParams, RecordSample};
use crate::simulation::ks::{ks_test_1pct, KsOutcome};
use crate::simulation::mc::run_replicates;
use crate::simulation::records::gen_records;
use crate::simulation::{Parent, SimConfig};

/// Pivotal quantities with parameter-free laws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pivot {
    /// `2α·T1*(β) ~ χ²_{2m}`.
    T1Star,
    /// `2α·T2* ~ χ²_{2m−2}`.
    T2Star,
    /// `α(ln R_m − ln β) ~ g(·; m)`.
    RecordMin,
    /// `(ln R_m − ln β)/T2* ~ f_W(·; m, 2m−2)`.
    Ratio,
}

impl Pivot {
    pub const ALL: [Pivot; 4] = [Pivot::T1Star, Pivot::T2Star, Pivot::RecordMin, Pivot::Ratio];

    pub fn min_m(self) -> usize {
        match self {
            Pivot::T1Star | Pivot::RecordMin => 1,
            Pivot::T2Star | Pivot::Ratio => 2,
        }
    }

    pub fn value(self, s: &RecordSample, p: ParetoParams) -> Result<f64> {
        let u = s.r_m().ln() - p.beta.ln();
        Ok(match self {
            Pivot::T1Star => 2.0 * p.alpha * s.t_star_at(p.beta)?,
            Pivot::T2Star => 2.0 * p.alpha * s.t2_star(),
            Pivot::RecordMin => p.alpha * u,
            Pivot::Ratio => u / s.t2_star(),
        })
    }

    /// The reference cdf the pivot should follow for `m` records.
    pub fn cdf(self, x: f64, m: usize, spec: &QuadratureSpec) -> Result<f64> {
        if x <= 0.0 {
            return Ok(0.0);
        }
        match self {
            Pivot::T1Star => chisq_cdf(x, 2.0 * m as f64),
            Pivot::T2Star => chisq_cdf(x, 2.0 * (m - 1) as f64),
            Pivot::RecordMin => g_cdf(x, m),
            Pivot::Ratio => fw_cdf(x, m, 2 * m - 2, spec),
        }
    }
}

/// Simulates the pivot under `params` and runs a 1% KS test against its law.
pub fn validate_pivot(
    pivot: Pivot,
    m: usize,
    params: ParetoParams,
    cfg: &SimConfig,
) -> Result<KsOutcome> {
    if m < pivot.min_m() {
        return Err(Error::DegenerateSample(format!(
            "{pivot:?} pivot needs m >= {}",
            pivot.min_m()
        )));
    }
    let parent = Parent::Pareto(params);
    let mut values = run_replicates(cfg, |_, rng| {
        pivot.value(&gen_records(&parent, m, rng)?, params)
    })?;
    let spec = QuadratureSpec::default();
    ks_test_1pct(&mut values, |x| pivot.cdf(x, m, &spec))
}
