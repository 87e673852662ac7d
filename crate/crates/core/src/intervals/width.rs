use serde::{Deserialize, Serialize};

use crate::densities::{expect_over_tm, SeriesValue, TailBound};
use crate::error::{check_gamma, Error, Result};
use crate::intervals::chi_q;
use crate::record::ParetoParams;
use crate::simulation::{estimate_expectation_rm, EmpiricalSummary, SimConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectedWidth {
    pub value: f64,
    /// `(1 − e^{−χ²_{hi}/2})^{1/α} − (1 − e^{−χ²_{lo}/2})^{1/α}`.
    pub factor: f64,
    /// Monte Carlo `E(R_m)`; absent when the factor is zero.
    pub expectation_rm: Option<EmpiricalSummary>,
}

/// Expected width of the equi-tailed `β` interval with `α` known:
/// `E(R_m)` times the quantile factor.
///
/// `E(R_m)` is finite exactly when `mα > 1`, because the upper tail of
/// `α(ln R_m − ln β)` decays like `e^{−mx}`.
pub fn expected_width_beta_unconditional(
    m: usize,
    params: ParetoParams,
    gamma: f64,
    cfg: &SimConfig,
) -> Result<ExpectedWidth> {
    if m == 0 {
        return Err(Error::Domain("record count m must be at least 1".into()));
    }
    let v = 2.0 * m as f64;
    let factor = if gamma == 1.0 {
        0.0
    } else {
        check_gamma(gamma)?;
        let root = |x: f64| ((-(-x / 2.0).exp_m1()).ln() / params.alpha).exp();
        root(chi_q(1.0 - gamma / 2.0, v)?) - root(chi_q(gamma / 2.0, v)?)
    };
    if factor == 0.0 {
        return Ok(ExpectedWidth {
            value: 0.0,
            factor,
            expectation_rm: None,
        });
    }
    if m as f64 * params.alpha <= 1.0 {
        return Err(Error::InfiniteExpectation(format!(
            "E(R_m) diverges for m*alpha = {} <= 1",
            m as f64 * params.alpha
        )));
    }
    let e = estimate_expectation_rm(params, m, cfg).map_err(|e| match e {
        Error::InstabilityDetected(why) => Error::InfiniteExpectation(why),
        other => other,
    })?;
    Ok(ExpectedWidth {
        value: e.point * factor,
        factor,
        expectation_rm: Some(e),
    })
}

/// Expected width of the conditional `β` interval, as a series over the law of `T_m`.
pub fn expected_width_beta_conditional(
    m: usize,
    params: ParetoParams,
    gamma: f64,
    tail_tol: f64,
) -> Result<SeriesValue> {
    check_gamma(gamma)?;
    let (alpha, beta) = (params.alpha, params.beta);
    if !(m as f64 * alpha > 1.0) {
        return Err(Error::MomentDoesNotExist(format!(
            "E(R_m | T_m = j) = beta*j*alpha/(j*alpha - 1) needs j*alpha > 1 for all j >= m, but m*alpha = {}",
            m as f64 * alpha
        )));
    }
    let (lo, hi) = (gamma / 2.0, 1.0 - gamma / 2.0);
    let h = |j: u64| {
        let ja = j as f64 * alpha;
        (hi.powf(1.0 / ja) - lo.powf(1.0 / ja)) * ja / (ja - 1.0) * beta
    };
    // The bracket is at most 1 − lo^{1/(jα)} ≤ ln(1/lo)/(jα), so beyond J the
    // terms are at most β·ln(1/lo)/((J+1)α − 1).
    let sup = |j: u64| beta * (1.0 / lo).ln() / ((j + 1) as f64 * alpha - 1.0);
    expect_over_tm(h, m, tail_tol, TailBound::Custom(&sup))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::g_pdf;
    use crate::numerics::{integrate, Domain, QuadratureSpec};

    fn cfg() -> SimConfig {
        SimConfig::standard(41, 200_000, 2).unwrap()
    }

    #[test]
    fn unconditional_against_quadrature() {
        let p = ParetoParams {
            beta: 103.0,
            alpha: 6.804,
        };
        let w = expected_width_beta_unconditional(3, p, 0.05, &cfg()).unwrap();
        // E(R_m) = β ∫ e^{u/α} g(u; m) du.
        let e = 103.0
            * integrate(
                |u| (u / 6.804).exp() * g_pdf(u, 3).unwrap(),
                Domain::UpperInfinite(0.0),
                &QuadratureSpec::default(),
            )
            .unwrap();
        let mc = w.expectation_rm.as_ref().unwrap();
        assert!(mc.within(e, 4.0), "{} vs {e}", mc.point);
        assert!(w.value > 0.0);
    }

    #[test]
    fn unconditional_scales_with_beta() {
        let a = expected_width_beta_unconditional(
            3,
            ParetoParams {
                beta: 1.0,
                alpha: 3.0,
            },
            0.1,
            &cfg(),
        )
        .unwrap();
        let b = expected_width_beta_unconditional(
            3,
            ParetoParams {
                beta: 2.0,
                alpha: 3.0,
            },
            0.1,
            &cfg(),
        )
        .unwrap();
        assert!((b.value / a.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn unconditional_guards() {
        let p = ParetoParams {
            beta: 1.0,
            alpha: 0.4,
        };
        assert!(matches!(
            expected_width_beta_unconditional(2, p, 0.05, &cfg()),
            Err(Error::InfiniteExpectation(_))
        ));
        assert_eq!(
            expected_width_beta_unconditional(2, p, 1.0, &cfg())
                .unwrap()
                .value,
            0.0
        );
    }

    #[test]
    fn conditional_series() {
        let p = ParetoParams {
            beta: 103.0,
            alpha: 6.804,
        };
        let s = expected_width_beta_conditional(3, p, 0.05, 1e-10).unwrap();
        assert!(s.value > 0.0 && s.value < 103.0);
        assert!(s.tail_bound < 1e-10);
        assert!(matches!(
            expected_width_beta_conditional(
                2,
                ParetoParams {
                    beta: 1.0,
                    alpha: 0.5
                },
                0.05,
                1e-10
            ),
            Err(Error::MomentDoesNotExist(_))
        ));
    }
}
