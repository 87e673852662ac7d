//! Law of `U = α(ln R_m − ln β)`, the standardized m-th lower record.
//!
//! `g(x; m) = L(x)^{m−1} e^{−x} / Γ(m)` with `L(x) = −ln(1 − e^{−x})`.
//! Since `L(U) ~ Gamma(m, 1)` and `L` is its own inverse, the cdf and
//! quantile reduce to the incomplete gamma function.

use crate::error::{Error, Result};
use crate::numerics::special::{gamma_q, gamma_quantile, ln_gamma_unchecked};

/// `L(x) = −ln(1 − e^{−x})` for `x > 0`, accurate at both ends.
pub fn neg_log_one_minus_exp(x: f64) -> f64 {
    if x <= std::f64::consts::LN_2 {
        -(-(-x).exp_m1()).ln()
    } else {
        -(-(-x).exp()).ln_1p()
    }
}

/// `ln L(x)`, which stays finite where `L(x)` itself underflows.
pub(crate) fn ln_l(x: f64) -> f64 {
    if x > 40.0 {
        // L(x) = e^{−x}(1 + e^{−x}/2 + …)
        -x + 0.5 * (-x).exp()
    } else {
        neg_log_one_minus_exp(x).ln()
    }
}

fn check_x(x: f64) -> Result<()> {
    if x > 0.0 && !x.is_nan() {
        Ok(())
    } else {
        Err(Error::Domain(format!("g(x; m) needs x > 0, got {x}")))
    }
}

fn check_m(m: usize) -> Result<()> {
    if m >= 1 {
        Ok(())
    } else {
        Err(Error::Domain("record count m must be at least 1".into()))
    }
}

pub fn g_ln_pdf(x: f64, m: usize) -> Result<f64> {
    check_x(x)?;
    check_m(m)?;
    if m == 1 {
        return Ok(-x);
    }
    let k = (m - 1) as f64;
    Ok(k * ln_l(x) - x - ln_gamma_unchecked(m as f64))
}

pub fn g_pdf(x: f64, m: usize) -> Result<f64> {
    Ok(g_ln_pdf(x, m)?.exp())
}

/// `P(U ≤ x) = Q(m, L(x))`.
pub fn g_cdf(x: f64, m: usize) -> Result<f64> {
    check_x(x)?;
    check_m(m)?;
    if x == f64::INFINITY {
        return Ok(1.0);
    }
    gamma_q(m as f64, neg_log_one_minus_exp(x))
}

/// `x` with `g_cdf(x, m) = p`.
pub fn g_quantile(p: f64, m: usize) -> Result<f64> {
    check_m(m)?;
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!(
            "probability must lie in (0, 1), got {p}"
        )));
    }
    // Q(m, L(x)) = p  ⇔  L(x) = Gamma(m) quantile at 1 − p  ⇔  x = L(that).
    let v = gamma_quantile(1.0 - p, m as f64, 1.0)?;
    Ok(neg_log_one_minus_exp(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quadrature::{integrate, Domain, QuadratureSpec};

    #[test]
    fn involution() {
        for x in [1e-8, 0.01, 0.5, 0.7, 1.0, 5.0, 30.0] {
            let y = neg_log_one_minus_exp(neg_log_one_minus_exp(x));
            assert!((y / x - 1.0).abs() < 1e-12, "{x} -> {y}");
        }
    }

    #[test]
    fn single_record_is_exponential() {
        for x in [0.1, 1.0, 3.0] {
            assert!((g_pdf(x, 1).unwrap() - (-x).exp()).abs() < 1e-15);
        }
        assert!((g_cdf(2f64.ln(), 1).unwrap() - 0.5).abs() < 1e-14);
        let gamma: f64 = 0.05;
        assert!((g_quantile(1.0 - gamma, 1).unwrap() + gamma.ln()).abs() < 1e-12);
    }

    #[test]
    fn direct_substitution() {
        let ln2 = 2f64.ln();
        assert!((g_pdf(ln2, 2).unwrap() - ln2 / 2.0).abs() < 1e-15);
    }

    #[test]
    fn normalization_and_cdf_against_quadrature() {
        let spec = QuadratureSpec::default();
        for m in 1..=8 {
            let total = integrate(
                |x| if x > 0.0 { g_pdf(x, m).unwrap() } else { 0.0 },
                Domain::UpperInfinite(0.0),
                &spec,
            )
            .unwrap();
            assert!((total - 1.0).abs() < 1e-8, "m={m}: {total}");
            for x in [0.03, 0.4, 1.0, 2.5] {
                let q = integrate(
                    |t| if t > 0.0 { g_pdf(t, m).unwrap() } else { 0.0 },
                    Domain::Finite(0.0, x),
                    &spec,
                )
                .unwrap();
                assert!((q - g_cdf(x, m).unwrap()).abs() < 1e-7, "m={m} x={x}");
            }
        }
    }

    // Brute-force quadrature of the density over (0, 1].
    #[test]
    fn cdf_at_one_for_two_records() {
        let v = g_cdf(1.0, 2).unwrap();
        assert!((v - 0.922_058_548_051_41).abs() < 1e-10);
    }

    #[test]
    fn quantile_round_trip() {
        let q = g_quantile(0.5, 2).unwrap();
        assert!((q - 0.206_633_481_741_592).abs() < 1e-10);
        for m in 1..=10 {
            for p in [0.01, 0.3, 0.9, 0.999] {
                let x = g_quantile(p, m).unwrap();
                assert!((g_cdf(x, m).unwrap() - p).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn domain_errors() {
        assert!(g_pdf(0.0, 2).is_err());
        assert!(g_cdf(-1.0, 2).is_err());
        assert!(g_pdf(1.0, 0).is_err());
        assert!(g_quantile(1.0, 3).is_err());
        assert_eq!(g_cdf(f64::INFINITY, 3).unwrap(), 1.0);
    }
}
