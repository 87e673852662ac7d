//! Point estimators of `(β, α)` and their exact accuracy formulas.

use serde::{Deserialize, Serialize};

use crate::error::{check_positive, Error, Result};
use crate::record::RecordSample;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimationReport {
    pub m: usize,
    /// `r_m`.
    pub beta_mle: f64,
    /// `m / T2*`; absent for a single record.
    pub alpha_mle: Option<f64>,
    /// `(m − 1) / T2*`; absent for a single record.
    pub alpha_unbiased: Option<f64>,
}

impl EstimationReport {
    /// The shape estimate, or `DegenerateSample` when `m = 1`.
    pub fn alpha(&self) -> Result<f64> {
        self.alpha_mle
            .ok_or_else(|| Error::DegenerateSample("alpha is not estimable from one record".into()))
    }
}

pub fn fit_mle(s: &RecordSample) -> Result<EstimationReport> {
    let m = s.m();
    let mut report = EstimationReport {
        m,
        beta_mle: s.r_m(),
        alpha_mle: None,
        alpha_unbiased: None,
    };
    if m >= 2 {
        let t2 = s.t2_star();
        if !(t2 > 0.0) {
            return Err(Error::ZeroT2Star(m));
        }
        report.alpha_mle = Some(m as f64 / t2);
        report.alpha_unbiased = Some((m - 1) as f64 / t2);
    }
    Ok(report)
}

fn need_m(m: usize, min: usize, what: &str) -> Result<()> {
    if m >= min {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "{what} needs m >= {min} (the moment does not exist below), got {m}"
        )))
    }
}

/// `E(α̂_M − α)² = α²(m+6)/((m−2)(m−3))`.
pub fn mse_alpha_mle(m: usize, alpha: f64) -> Result<f64> {
    need_m(m, 4, "MSE of the MLE")?;
    check_positive("alpha", alpha)?;
    let m = m as f64;
    Ok(alpha * alpha * (m + 6.0) / ((m - 2.0) * (m - 3.0)))
}

/// The published accuracy formula `α²(m+5)/((m−3)(m−4))` for `α̂_U`.
///
/// It is the MLE formula with `m` replaced by `m − 1`, which does not describe
/// `(m − 1)/T2*`: that estimator has mean `α(m−1)/(m−2)` and mean squared
/// error `α²(m+1)/((m−2)(m−3))`, given by [`mse_alpha_scaled`].
pub fn mse_alpha_unbiased(m: usize, alpha: f64) -> Result<f64> {
    need_m(m, 5, "MSE of the unbiased estimator")?;
    check_positive("alpha", alpha)?;
    let m = m as f64;
    Ok(alpha * alpha * (m + 5.0) / ((m - 3.0) * (m - 4.0)))
}

/// `MSE(α̂_U)/MSE(α̂_M) = (m+5)(m−2)/((m+6)(m−4))`.
pub fn efficiency_mle_vs_unbiased(m: usize) -> Result<f64> {
    need_m(m, 5, "relative efficiency")?;
    let m = m as f64;
    Ok((m + 5.0) * (m - 2.0) / ((m + 6.0) * (m - 4.0)))
}

/// Exact `E(c/T2* − α)²` for `T2* ~ Gamma(m − 1, 1/α)`:
/// `α²(c²/((m−2)(m−3)) − 2c/(m−2) + 1)`.
pub fn mse_alpha_scaled(c: f64, m: usize, alpha: f64) -> Result<f64> {
    need_m(m, 4, "MSE of c/T2*")?;
    check_positive("alpha", alpha)?;
    check_positive("c", c)?;
    let m = m as f64;
    Ok(alpha * alpha * (c * c / ((m - 2.0) * (m - 3.0)) - 2.0 * c / (m - 2.0) + 1.0))
}

/// `E(α̂_M) − α = 2α/(m−2)`.
pub fn bias_alpha_mle(m: usize, alpha: f64) -> Result<f64> {
    need_m(m, 3, "bias of the MLE")?;
    check_positive("alpha", alpha)?;
    Ok(2.0 * alpha / (m as f64 - 2.0))
}
