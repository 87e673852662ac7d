//! Statistics and critical values shared by the test procedures.

use std::sync::LazyLock;

use serde::{Deserialize, Serialize};

use crate::densities::RecordTimeLaw;
use crate::error::{check_gamma, Error, Result};
use crate::intervals::methods::chi_equal_level;
use crate::memo::Memo;
use crate::record::RecordSample;
use crate::simulation::{
    simulate_cstar, simulate_quantile_power_chisq, EmpiricalSummary, SimConfig,
};

/// Rows of the published table of simulated `γ`-quantiles of `X^m e^{−X/2}`,
/// `X ~ χ²_{2m}`.
pub const PUBLISHED_GAMMAS: [f64; 6] = [0.01, 0.02, 0.03, 0.04, 0.05, 0.1];

/// `PUBLISHED_CRITICAL[row][m − 1]` for `m = 1..=5`.
pub const PUBLISHED_CRITICAL: [[f64; 5]; 6] = [
    [0.0169, 0.0589, 0.3139, 2.2636, 20.7899],
    [0.0332, 0.1136, 0.6004, 4.3280, 39.7496],
    [0.0490, 0.1658, 0.8766, 6.2658, 57.6354],
    [0.0647, 0.2175, 1.1370, 8.1415, 74.3884],
    [0.0797, 0.2664, 1.3850, 9.9380, 90.4894],
    [0.1517, 0.4918, 2.5377, 18.0175, 163.4582],
];

/// Published cell for column `m` and level `gamma`, if tabulated.
pub fn published_critical(m: usize, gamma: f64) -> Option<f64> {
    let row = PUBLISHED_GAMMAS.iter().position(|&g| g == gamma)?;
    (1..=5).contains(&m).then(|| PUBLISHED_CRITICAL[row][m - 1])
}

/// `ln(z^p e^{−z/2})`.
pub fn ln_power_exp(z: f64, p: f64) -> f64 {
    if z == 0.0 {
        return f64::NEG_INFINITY;
    }
    p * z.ln() - z / 2.0
}

/// Exact `γ`-quantile of `X^p e^{−X/2}` with `X ~ χ²_df`.
///
/// `{x^p e^{−x/2} < c}` is the complement of an interval `[a, b]` around
/// `2p`, so `c` follows from the endpoints sharing the χ²_{2p+2} density
/// (proportional to `x^p e^{−x/2}`) and carrying χ²_df mass `1 − γ`.
pub fn exact_power_chisq_quantile(p: f64, df: f64, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    let (a, _) = chi_equal_level(2.0 * p + 2.0, df, gamma)?;
    Ok(ln_power_exp(a, p).exp())
}

/// Bit patterns of `(power, df, gamma)` with the seed and replicate count.
type PowerKey = (u64, u64, u64, u64, u64);

static SIMULATED_POWER: LazyLock<Memo<PowerKey>> = LazyLock::new(Memo::new);
static SIMULATED_CSTAR: LazyLock<Memo<(usize, u64, u64, u64)>> = LazyLock::new(Memo::new);

fn summary_from(v: &[f64], cfg: &SimConfig) -> EmpiricalSummary {
    EmpiricalSummary::new(v[0], v[1], cfg)
}

/// Simulated quantile of `X^p e^{−X/2}`, cached by `(p, df, γ, reps, seed)`.
pub fn simulated_power_chisq_quantile(
    p: f64,
    df: f64,
    gamma: f64,
    cfg: &SimConfig,
) -> Result<EmpiricalSummary> {
    let key = (
        p.to_bits(),
        df.to_bits(),
        gamma.to_bits(),
        cfg.reps,
        cfg.seed,
    );
    let v = SIMULATED_POWER.get_or_try(key, || {
        let s = simulate_quantile_power_chisq(p, df, gamma, cfg)?;
        Ok(vec![s.point, s.std_error])
    })?;
    Ok(summary_from(&v, cfg))
}

/// Simulated `C*`, cached by `(m, γ, reps, seed)`.
pub fn simulated_cstar(m: usize, gamma: f64, cfg: &SimConfig) -> Result<EmpiricalSummary> {
    let key = (m, gamma.to_bits(), cfg.reps, cfg.seed);
    let v = SIMULATED_CSTAR.get_or_try(key, || {
        let s = simulate_cstar(m, gamma, cfg)?;
        Ok(vec![s.point, s.std_error])
    })?;
    Ok(summary_from(&v, cfg))
}

/// `T0*`, the log-spacing sum at a hypothesized scale.
fn t0_star(s: &RecordSample, beta0: f64) -> f64 {
    let lb = beta0.ln();
    s.records()
        .iter()
        .map(|r| r.count as f64 * (r.value.ln() - lb))
        .sum()
}

/// The scale-test pivot `S' = T_m(ln R_m − ln β₀)·α̂_{M,0}` with
/// `α̂_{M,0} = m/T0*`.
///
/// Under `β = β₀` it is free of `(β₀, α)` and `S'/m ~ Beta(1, m − 1)`. The
/// likelihood ratio is `Λ = (1 − S'/m)^m`. When `r_m < β₀` the likelihood
/// vanishes under the null and `S'` is reported as its supremum `m`.
pub fn beta_glr_pivot(s: &RecordSample, beta0: f64) -> Result<f64> {
    let m = s.m() as f64;
    if s.r_m() < beta0 {
        return Ok(m);
    }
    let t0 = t0_star(s, beta0);
    if !(t0 > 0.0) {
        return Err(Error::DegenerateSample(format!(
            "T0* = {t0} at beta0 = {beta0}; the scale pivot needs m >= 2"
        )));
    }
    Ok(s.t_m() as f64 * (s.r_m().ln() - beta0.ln()) * m / t0)
}

/// `Λ` for the scale test computed two ways: `(T2*/T0*)^m` directly and
/// `(1 − S'/m)^m` through the pivot.
pub fn beta_glr_lambda(s: &RecordSample, beta0: f64) -> Result<(f64, f64)> {
    if s.r_m() < beta0 {
        return Ok((0.0, 0.0));
    }
    let m = s.m() as f64;
    let direct = (s.t2_star() / t0_star(s, beta0)).powf(m);
    let via = (1.0 - beta_glr_pivot(s, beta0)? / m).powf(m);
    Ok((direct, via))
}

/// `C* = m(1 − γ^{1/(m−1)})`, the exact `(1−γ)`-quantile of `S'`.
pub fn cstar_closed_form(m: usize, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if m < 2 {
        return Err(Error::DegenerateSample("C* needs m >= 2".into()));
    }
    Ok(m as f64 * (1.0 - gamma.powf(1.0 / (m - 1) as f64)))
}

/// The series `Σ_j P(S' > C* | T_m = j) P(T_m = j)` over its first terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CstarSeries {
    pub size: f64,
    pub terms: u64,
    /// `P(T_m < m + terms)`, the pmf mass the partial sum covers.
    pub pmf_mass: f64,
}

/// Partial sum of the conditional-size series for a given `C*`.
///
/// Given `T_m = j`, `j·α(ln R_m − ln β₀)` is standard exponential and
/// independent of `2αT2* ~ χ²_{2m−2}`, so each conditional probability equals
/// `(1 − C*/m)^{m−1}`.
pub fn cstar_series_size(m: usize, cstar: f64, terms: u64) -> Result<CstarSeries> {
    if m < 2 {
        return Err(Error::DegenerateSample("C* needs m >= 2".into()));
    }
    let mf = m as f64;
    let conditional = |_j: u64| (1.0 - cstar / mf).clamp(0.0, 1.0).powf(mf - 1.0);
    let mut size = 0.0;
    let mut mass = 0.0;
    for (j, p) in RecordTimeLaw::new(m)?.take(terms as usize) {
        size += conditional(j) * p;
        mass += p;
    }
    Ok(CstarSeries {
        size,
        terms,
        pmf_mass: mass,
    })
}
