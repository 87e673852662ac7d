use std::collections::HashMap;
use std::sync::{Arc, LazyLock, Mutex};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;
use rayon::ThreadPool;
use serde::{Deserialize, Serialize};

use crate::densities::g_record::neg_log_one_minus_exp;
use crate::error::{check_gamma, Error, Result};
use crate::hypothesis::functions::beta_glr_pivot;
use crate::record::ParetoParams;
use crate::simulation::records::{gen_records, record_time_censored};
use crate::simulation::{replicate_rng, EmpiricalSummary, Parent, SimConfig};

static POOLS: LazyLock<Mutex<HashMap<usize, Arc<ThreadPool>>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

fn pool(workers: usize) -> Result<Arc<ThreadPool>> {
    let mut pools = POOLS.lock().unwrap_or_else(|e| e.into_inner());
    if let Some(p) = pools.get(&workers) {
        return Ok(p.clone());
    }
    let p = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Domain(format!("cannot start {workers} workers: {e}")))?;
    let p = Arc::new(p);
    pools.insert(workers, p.clone());
    Ok(p)
}

/// Evaluates `f(index, rng)` for every replicate index, one contiguous block
/// per worker, and returns the results in index order.
pub fn run_replicates<T, F>(cfg: &SimConfig, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, &mut ChaCha8Rng) -> Result<T> + Sync,
{
    let workers = cfg.workers.max(1) as u64;
    let block = cfg.reps.div_ceil(workers);
    let blocks: Vec<(u64, u64)> = (0..workers)
        .map(|w| (w * block, ((w + 1) * block).min(cfg.reps)))
        .filter(|(lo, hi)| lo < hi)
        .collect();
    let run_block = |&(lo, hi): &(u64, u64)| -> Result<Vec<T>> {
        (lo..hi)
            .map(|i| f(i, &mut replicate_rng(cfg.seed, i)))
            .collect()
    };
    let parts: Vec<Result<Vec<T>>> = if blocks.len() <= 1 {
        blocks.iter().map(run_block).collect()
    } else {
        pool(cfg.workers)?.install(|| blocks.par_iter().map(run_block).collect())
    };
    let mut out = Vec::with_capacity(cfg.reps as usize);
    for part in parts {
        out.extend(part?);
    }
    Ok(out)
}

/// Empirical `p`-quantile (the `⌈np⌉`-th order statistic) with the asymptotic
/// standard error `√(p(1−p)/n)/f̂`, `f̂` from a centered difference of the
/// empirical quantile function.
pub(crate) fn quantile_summary(mut values: Vec<f64>, p: f64, cfg: &SimConfig) -> EmpiricalSummary {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    let at = |q: f64| -> f64 {
        let idx = ((n as f64 * q).ceil() as usize).clamp(1, n) - 1;
        values[idx]
    };
    let point = at(p);
    let delta = (p / 2.0)
        .min((1.0 - p) / 2.0)
        .min((n as f64).powf(-1.0 / 3.0));
    let spread = at(p + delta) - at(p - delta);
    let se = if spread > 0.0 {
        let density = 2.0 * delta / spread;
        (p * (1.0 - p) / n as f64).sqrt() / density
    } else {
        0.0
    };
    EmpiricalSummary::new(point, se, cfg)
}

/// Empirical `gamma`-quantile of `X^power e^{−X/2}` with `X ~ χ²_df`.
pub fn simulate_quantile_power_chisq(
    power: f64,
    df: f64,
    gamma: f64,
    cfg: &SimConfig,
) -> Result<EmpiricalSummary> {
    if gamma == 0.0 {
        // The statistic is positive with essential infimum zero.
        return Ok(EmpiricalSummary::new(0.0, 0.0, cfg));
    }
    check_gamma(gamma)?;
    let chi = Gamma::new(df / 2.0, 2.0).map_err(|e| Error::Domain(e.to_string()))?;
    let values = run_replicates(cfg, |_, rng| {
        let x: f64 = chi.sample(rng);
        Ok((power * x.ln() - 0.5 * x).exp())
    })?;
    Ok(quantile_summary(values, gamma, cfg))
}

/// Empirical `gamma`-quantile of `X^m e^{−X/2}` with `X ~ χ²_{2m}`.
pub fn simulate_quantile_xm_exp(m: usize, gamma: f64, cfg: &SimConfig) -> Result<EmpiricalSummary> {
    simulate_quantile_power_chisq(m as f64, 2.0 * m as f64, gamma, cfg)
}

/// Empirical `(1−gamma)`-quantile of the scale-test pivot under a unit null.
///
/// Under `β = β₀` the pivot depends on the data only through
/// `u_i = α(ln r_i − ln β₀)`, so unit-parameter Pareto records suffice.
pub fn simulate_cstar(m: usize, gamma: f64, cfg: &SimConfig) -> Result<EmpiricalSummary> {
    if m < 2 {
        return Err(Error::DegenerateSample("C* needs m >= 2".into()));
    }
    check_gamma(gamma)?;
    let unit = Parent::Pareto(ParetoParams {
        beta: 1.0,
        alpha: 1.0,
    });
    let values = run_replicates(cfg, |_, rng| {
        let s = gen_records(&unit, m, rng)?;
        beta_glr_pivot(&s, 1.0)
    })?;
    Ok(quantile_summary(values, 1.0 - gamma, cfg))
}

/// Relative move of the running mean between the first tenth of the
/// replicates and the full run; `None` for fewer than 10 replicates.
fn last_decade_drift(values: &[f64]) -> Option<f64> {
    let n = values.len();
    let early = n / 10;
    if early == 0 {
        return None;
    }
    let head: f64 = values[..early].iter().sum::<f64>() / early as f64;
    let full: f64 = values.iter().sum::<f64>() / n as f64;
    Some(((full - head) / full).abs())
}

/// Monte Carlo `E(R_m)`, refusing estimates whose running mean is unstable.
pub fn estimate_expectation_rm(
    params: ParetoParams,
    m: usize,
    cfg: &SimConfig,
) -> Result<EmpiricalSummary> {
    if m == 0 {
        return Err(Error::Domain("record count m must be at least 1".into()));
    }
    let parent = Parent::Pareto(params);
    let values = run_replicates(cfg, |_, rng| {
        // Only R_m is needed: F(R_m) is a product of m uniforms.
        let mut v = 1.0;
        for _ in 0..m {
            v *= 1.0 - rng.random::<f64>();
        }
        Ok(parent.quantile_lower(v))
    })?;
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    let mut summary = EmpiricalSummary::new(mean, (var / n).sqrt(), cfg);
    let drift = last_decade_drift(&values);
    let unstable = !mean.is_finite() || drift.is_some_and(|d| !(d <= 0.01));
    if let Some(d) = drift {
        summary.diagnostics.notes.push(format!(
            "running mean moved {:.4}% over the last decade",
            100.0 * d
        ));
    }
    if unstable {
        summary.diagnostics.tail_stable = false;
        return Err(Error::InstabilityDetected(format!(
            "E(R_m) estimate {mean} with running-mean drift {:?} over the last decade of {} replicates",
            drift, cfg.reps
        )));
    }
    Ok(summary)
}

/// Counts of `T_m = j` for `j = m..=jmax` from trial-by-trial parent draws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TmHistogram {
    pub m: usize,
    /// `counts[i]` is the number of replicates with `T_m = m + i`.
    pub counts: Vec<u64>,
    pub beyond: u64,
    pub reps: u64,
}

pub fn simulate_tm_histogram(m: usize, jmax: u64, cfg: &SimConfig) -> Result<TmHistogram> {
    if m == 0 || jmax < m as u64 {
        return Err(Error::Domain(format!(
            "need 1 <= m <= jmax, got m={m}, jmax={jmax}"
        )));
    }
    let parent = cfg.parent;
    let times = run_replicates(cfg, |_, rng| {
        Ok(record_time_censored(&parent, m, jmax, rng))
    })?;
    let mut counts = vec![0u64; (jmax - m as u64 + 1) as usize];
    let mut beyond = 0;
    for t in times {
        match t {
            Some(j) => counts[(j - m as u64) as usize] += 1,
            None => beyond += 1,
        }
    }
    Ok(TmHistogram {
        m,
        counts,
        beyond,
        reps: cfg.reps,
    })
}

/// Quantiles of `W = 2U/T` with `U = L(V)`, `V ~ Gamma(m, 1)`, `T ~ χ²_ν`,
/// sampled directly from that construction.
pub fn simulate_w_quantiles(
    m: usize,
    nu: usize,
    probs: &[f64],
    cfg: &SimConfig,
) -> Result<Vec<EmpiricalSummary>> {
    if m < 2 || nu == 0 {
        return Err(Error::Domain(format!(
            "W sampling needs m >= 2 and nu >= 1, got m={m}, nu={nu}"
        )));
    }
    for &p in probs {
        check_gamma(p)?;
    }
    let v_law = Gamma::new(m as f64, 1.0).map_err(|e| Error::Domain(e.to_string()))?;
    let t_law = Gamma::new(nu as f64 / 2.0, 2.0).map_err(|e| Error::Domain(e.to_string()))?;
    let values = run_replicates(cfg, |_, rng| {
        let v: f64 = v_law.sample(rng);
        let t: f64 = t_law.sample(rng);
        Ok(2.0 * neg_log_one_minus_exp(v) / t)
    })?;
    Ok(probs
        .iter()
        .map(|&p| quantile_summary(values.clone(), p, cfg))
        .collect())
}

/// Monte Carlo accuracy of the two shape estimators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorAccuracy {
    pub mse_mle: EmpiricalSummary,
    pub mse_unbiased: EmpiricalSummary,
    pub bias_mle: EmpiricalSummary,
}

pub fn simulate_estimator_accuracy(
    params: ParetoParams,
    m: usize,
    cfg: &SimConfig,
) -> Result<EstimatorAccuracy> {
    if m < 2 {
        return Err(Error::DegenerateSample(
            "shape estimators need m >= 2".into(),
        ));
    }
    let parent = Parent::Pareto(params);
    let draws = run_replicates(cfg, |_, rng| {
        let s = gen_records(&parent, m, rng)?;
        let t2 = s.t2_star();
        Ok((m as f64 / t2, (m - 1) as f64 / t2))
    })?;
    let mean_se = |xs: Vec<f64>| -> EmpiricalSummary {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        EmpiricalSummary::new(mean, (var / n).sqrt(), cfg)
    };
    let a = params.alpha;
    Ok(EstimatorAccuracy {
        mse_mle: mean_se(draws.iter().map(|(ml, _)| (ml - a).powi(2)).collect()),
        mse_unbiased: mean_se(draws.iter().map(|(_, u)| (u - a).powi(2)).collect()),
        bias_mle: mean_se(draws.iter().map(|(ml, _)| ml - a).collect()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(seed: u64, reps: u64, workers: usize) -> SimConfig {
        SimConfig::standard(seed, reps, workers).unwrap()
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let a = simulate_quantile_xm_exp(2, 0.05, &cfg(5, 20_001, 1)).unwrap();
        let b = simulate_quantile_xm_exp(2, 0.05, &cfg(5, 20_001, 3)).unwrap();
        assert_eq!(a.point.to_bits(), b.point.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
        let c = simulate_cstar(3, 0.05, &cfg(9, 5_000, 1)).unwrap();
        let d = simulate_cstar(3, 0.05, &cfg(9, 5_000, 4)).unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn zero_gamma_is_the_infimum() {
        let s = simulate_quantile_xm_exp(3, 0.0, &cfg(1, 10, 1)).unwrap();
        assert_eq!(s.point, 0.0);
    }

    #[test]
    fn cstar_decreases_in_gamma() {
        let c = cfg(2, 20_000, 1);
        let hi = simulate_cstar(4, 0.01, &c).unwrap();
        let lo = simulate_cstar(4, 0.10, &c).unwrap();
        assert!(hi.point > lo.point);
    }

    #[test]
    fn quantile_of_uniforms() {
        let c = cfg(0, 1000, 1);
        let values: Vec<f64> = (1..=1000).map(|i| i as f64 / 1000.0).collect();
        let s = quantile_summary(values, 0.25, &c);
        assert_eq!(s.point, 0.25);
        // Density one, so the standard error is √(p(1−p)/n).
        assert!((s.std_error - (0.25f64 * 0.75 / 1000.0).sqrt()).abs() < 1e-3);
    }

    #[test]
    fn heavy_tail_is_flagged() {
        let p = ParetoParams {
            beta: 1.0,
            alpha: 0.5,
        };
        let r = estimate_expectation_rm(p, 2, &cfg(3, 200_000, 1));
        assert!(matches!(r, Err(Error::InstabilityDetected(_))), "{r:?}");
    }
}
