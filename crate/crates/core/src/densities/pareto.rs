use crate::error::{Error, Result};
use crate::record::ParetoParams;

/// `F(x) = 1 − (β/x)^α` for `x ≥ β`, zero below.
pub fn pareto_cdf(x: f64, p: ParetoParams) -> f64 {
    if x <= p.beta {
        0.0
    } else {
        -((p.alpha * (p.beta / x).ln()).exp_m1())
    }
}

/// `f(x) = α β^α x^{−(α+1)}` for `x ≥ β`.
pub fn pareto_pdf(x: f64, p: ParetoParams) -> f64 {
    if x < p.beta {
        0.0
    } else {
        p.alpha / x * (p.alpha * (p.beta / x).ln()).exp()
    }
}

pub fn pareto_quantile(prob: f64, p: ParetoParams) -> Result<f64> {
    if !(0.0..1.0).contains(&prob) {
        return Err(Error::Domain(format!(
            "probability must lie in [0, 1), got {prob}"
        )));
    }
    Ok(p.beta * (-(-prob).ln_1p() / p.alpha).exp())
}
