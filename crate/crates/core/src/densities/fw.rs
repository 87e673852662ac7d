//! Law of the both-parameters-unknown pivot `W = (ln R_m − ln β)/T2*`.
//!
//! With `U = α(ln R_m − ln β) ~ g(·; m)` independent of `G = αT2* ~ Gamma(ν/2)`,
//! `W = U/G`. Conditioning on `G` gives
//!
//! ```text
//! f_W(w) = (1+w)^{−1−ν/2} / (Γ(m) Γ(ν/2)) ∫_0^∞ L(yw/(1+w))^{m−1} y^{ν/2} e^{−y} dy
//! F_W(w) = ∫_0^∞ Q(m, L(wx)) x^{ν/2−1} e^{−x} / Γ(ν/2) dx
//! ```
//!
//! The density is unbounded at zero and decreasing, so it has no interior mode.

use std::sync::LazyLock;

use crate::densities::g_record::{ln_l, neg_log_one_minus_exp};
use crate::error::{Error, Result};
use crate::memo::Memo;
use crate::numerics::quadrature::{integrate, Domain, QuadratureSpec};
use crate::numerics::roots::{find_root_fallible, RootOptions};
use crate::numerics::special::{gamma_q_unchecked, ln_gamma_unchecked};

fn check_params(m: usize, nu: usize) -> Result<()> {
    if m < 2 {
        return Err(Error::Domain(format!("f_W needs m >= 2, got {m}")));
    }
    if nu < 1 {
        return Err(Error::Domain("f_W needs nu >= 1".into()));
    }
    Ok(())
}

pub fn fw_pdf(w: f64, m: usize, nu: usize, spec: &QuadratureSpec) -> Result<f64> {
    check_params(m, nu)?;
    if !(w > 0.0) {
        return Err(Error::Domain(format!("f_W needs w > 0, got {w}")));
    }
    if w == f64::INFINITY {
        return Ok(0.0);
    }
    let half_nu = nu as f64 / 2.0;
    let k = (m - 1) as f64;
    let c = w / (1.0 + w);
    let inner = integrate(
        |y| {
            if y <= 0.0 {
                return 0.0;
            }
            (k * ln_l(y * c) + half_nu * y.ln() - y).exp()
        },
        Domain::UpperInfinite(0.0),
        spec,
    )?;
    let ln_const =
        -(1.0 + half_nu) * w.ln_1p() - ln_gamma_unchecked(m as f64) - ln_gamma_unchecked(half_nu);
    Ok(ln_const.exp() * inner)
}

pub fn fw_cdf(w: f64, m: usize, nu: usize, spec: &QuadratureSpec) -> Result<f64> {
    check_params(m, nu)?;
    if w.is_nan() {
        return Err(Error::Domain("f_W cdf at NaN".into()));
    }
    if w <= 0.0 {
        return Ok(0.0);
    }
    if w == f64::INFINITY {
        return Ok(1.0);
    }
    let half_nu = nu as f64 / 2.0;
    let mf = m as f64;
    let ln_norm = ln_gamma_unchecked(half_nu);
    let v = integrate(
        |x| {
            if x <= 0.0 {
                return 0.0;
            }
            let weight = ((half_nu - 1.0) * x.ln() - x - ln_norm).exp();
            if weight == 0.0 {
                return 0.0;
            }
            gamma_q_unchecked(mf, neg_log_one_minus_exp(w * x)) * weight
        },
        Domain::UpperInfinite(0.0),
        spec,
    )?;
    Ok(v.clamp(0.0, 1.0))
}

type QuantileKey = (usize, usize, u64, [u64; 2], usize);

static QUANTILES: LazyLock<Memo<QuantileKey>> = LazyLock::new(Memo::new);

/// `w` with `F_W(w) = p`, memoized per `(m, ν, p, spec)`.
pub fn fw_quantile(p: f64, m: usize, nu: usize, spec: &QuadratureSpec) -> Result<f64> {
    check_params(m, nu)?;
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!(
            "probability must lie in (0, 1), got {p}"
        )));
    }
    let key = (
        m,
        nu,
        p.to_bits(),
        [spec.abs_tol.to_bits(), spec.rel_tol.to_bits()],
        spec.max_subdivisions,
    );
    let v = QUANTILES.get_or_try(key, || {
        fw_quantile_uncached(p, m, nu, spec).map(|q| vec![q])
    })?;
    Ok(v[0])
}

fn fw_quantile_uncached(p: f64, m: usize, nu: usize, spec: &QuadratureSpec) -> Result<f64> {
    let gap = |w: f64| -> Result<f64> { Ok(fw_cdf(w, m, nu, spec)? - p) };
    let mut lo = 1e-3;
    while gap(lo)? > 0.0 {
        lo *= 1e-3;
        if lo < 1e-290 {
            return Err(Error::NoSolution(format!(
                "f_W quantile {p} is below 1e-290"
            )));
        }
    }
    let mut hi = 1.0;
    while gap(hi)? < 0.0 {
        hi *= 10.0;
        if hi > 1e290 {
            return Err(Error::NoSolution(format!(
                "f_W quantile {p} is above 1e290"
            )));
        }
    }
    let opts = RootOptions {
        abs_tol: 1e-300,
        rel_tol: 1e-12,
        max_iter: 300,
    };
    find_root_fallible(gap, (lo, hi), opts)
}

/// `∫_0^∞ f_W`, split at 1 and folded by `w → 1/w` so both pieces are finite-range.
pub fn fw_normalization(m: usize, nu: usize, spec: &QuadratureSpec) -> Result<f64> {
    check_params(m, nu)?;
    let mut failure = None;
    let mut pdf = |w: f64| match fw_pdf(w, m, nu, spec) {
        Ok(v) => v,
        Err(e) => {
            failure.get_or_insert(e);
            0.0
        }
    };
    let lower = integrate(
        |w| if w > 0.0 { pdf(w) } else { 0.0 },
        Domain::Finite(0.0, 1.0),
        spec,
    );
    let upper = integrate(
        |s| if s > 0.0 { pdf(1.0 / s) / (s * s) } else { 0.0 },
        Domain::Finite(0.0, 1.0),
        spec,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(lower? + upper?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    // For m = 2, ν = 2 the cdf is H(s)/s with s = 1 + 1/w and H the harmonic
    // number, from expanding L as Σ e^{−ku}/k.
    #[test]
    fn closed_form_two_records() {
        let cases = [
            (1.0, 0.75),
            (0.5, 0.611_111_111_111_111),
            (1.0 / 9.0, 0.292_896_825_396_825_4),
            (2.0, 0.853_581_537_031_184),
            (0.001, 0.007_478_990_870_678_667),
        ];
        for (w, want) in cases {
            let got = fw_cdf(w, 2, 2, &spec()).unwrap();
            assert!((got - want).abs() < 1e-11, "w={w}: {got} vs {want}");
        }
    }

    #[test]
    fn pdf_is_derivative_of_cdf() {
        for (m, nu) in [(2, 2), (3, 4), (5, 8)] {
            for w in [0.01, 0.1, 0.6] {
                let h = w * 1e-4;
                let num = (fw_cdf(w + h, m, nu, &spec()).unwrap()
                    - fw_cdf(w - h, m, nu, &spec()).unwrap())
                    / (2.0 * h);
                let pdf = fw_pdf(w, m, nu, &spec()).unwrap();
                assert!((num / pdf - 1.0).abs() < 1e-6, "m={m} nu={nu} w={w}");
            }
        }
    }

    #[test]
    fn normalizes() {
        for (m, nu) in [(2, 2), (3, 4), (4, 6)] {
            let total = fw_normalization(m, nu, &spec()).unwrap();
            assert!((total - 1.0).abs() < 1e-6, "m={m}: {total}");
        }
    }

    #[test]
    fn decreasing_density() {
        let mut prev = f64::INFINITY;
        for i in 0..60 {
            let w = 1e-9 * 1.5f64.powi(i);
            let f = fw_pdf(w, 4, 6, &spec()).unwrap();
            assert!(f < prev);
            prev = f;
        }
    }

    #[test]
    fn quantiles_invert_and_order() {
        let q50 = fw_quantile(0.5, 3, 4, &spec()).unwrap();
        let q90 = fw_quantile(0.9, 3, 4, &spec()).unwrap();
        assert!(q50 < q90);
        for p in [0.01, 0.5, 0.99] {
            let q = fw_quantile(p, 4, 6, &spec()).unwrap();
            assert!((fw_cdf(q, 4, 6, &spec()).unwrap() - p).abs() < 1e-10);
        }
        // Second call is served from the memo with the same bits.
        assert_eq!(
            fw_quantile(0.5, 3, 4, &spec()).unwrap().to_bits(),
            q50.to_bits()
        );
    }

    #[test]
    fn parameter_guards() {
        assert!(fw_pdf(0.1, 1, 2, &spec()).is_err());
        assert!(fw_cdf(0.1, 2, 0, &spec()).is_err());
        assert!(fw_pdf(0.0, 2, 2, &spec()).is_err());
        assert_eq!(fw_cdf(0.0, 2, 2, &spec()).unwrap(), 0.0);
    }
}
