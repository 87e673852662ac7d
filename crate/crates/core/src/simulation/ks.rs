use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsOutcome {
    pub statistic: f64,
    pub critical: f64,
    pub n: usize,
    pub passes: bool,
}

/// Asymptotic 1% critical value of the one-sample KS statistic, with the
/// Stephens small-sample correction.
pub fn ks_critical_1pct(n: usize) -> f64 {
    let s = (n as f64).sqrt();
    1.6276 / (s + 0.12 + 0.11 / s)
}

/// `sup |F_n − F|` for the sample against a continuous `cdf`.
pub fn ks_statistic<F>(values: &mut [f64], mut cdf: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if values.is_empty() {
        return Err(Error::Domain("KS statistic of an empty sample".into()));
    }
    values.sort_by(f64::total_cmp);
    let n = values.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in values.iter().enumerate() {
        let f = cdf(x)?;
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(d)
}

/// KS test at the 1% level.
pub fn ks_test_1pct<F>(values: &mut [f64], cdf: F) -> Result<KsOutcome>
where
    F: FnMut(f64) -> Result<f64>,
{
    let statistic = ks_statistic(values, cdf)?;
    let critical = ks_critical_1pct(values.len());
    Ok(KsOutcome {
        statistic,
        critical,
        n: values.len(),
        passes: statistic < critical,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_sample_is_close_to_uniform() {
        let mut v: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        let d = ks_statistic(&mut v, Ok).unwrap();
        assert!((d - 0.0005).abs() < 1e-12);
        let mut shifted: Vec<f64> = v.iter().map(|x| x * 0.5).collect();
        let out = ks_test_1pct(&mut shifted, Ok).unwrap();
        assert!(!out.passes);
    }

    #[test]
    fn critical_value_scale() {
        let s = 100_000f64.sqrt();
        assert!((ks_critical_1pct(100_000) - 1.6276 / (s + 0.12 + 0.11 / s)).abs() < 1e-15);
        assert!((ks_critical_1pct(100_000) - 0.005145).abs() < 1e-6);
    }
}
