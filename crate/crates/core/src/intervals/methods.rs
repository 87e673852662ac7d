use std::sync::LazyLock;

use crate::densities::{fw_quantile, g_quantile, DistHandle};
use crate::error::{Error, Result};
use crate::intervals::{
    chi_q, IntervalInputs, IntervalMethod, Knowledge, MethodTag, Parameter, Sides,
};
use crate::memo::Memo;
use crate::numerics::{solve_equal_level_system, QuadratureSpec};
use crate::record::RecordSample;

type Bounds = Result<((f64, f64), Vec<String>)>;

static EQUAL_LEVEL: LazyLock<Memo<(u64, u64, u64)>> = LazyLock::new(Memo::new);

/// `(a, b)` with equal χ²_{level_df} density and χ²_{law_df} mass `1 − gamma`.
pub(crate) fn chi_equal_level(level_df: f64, law_df: f64, gamma: f64) -> Result<(f64, f64)> {
    let key = (level_df.to_bits(), law_df.to_bits(), gamma.to_bits());
    let ab = EQUAL_LEVEL.get_or_try(key, || {
        let level = DistHandle::chi_square(level_df)?;
        let law = DistHandle::chi_square(law_df)?;
        let (a, b) = solve_equal_level_system(&level, &law, 1.0 - gamma, None)?;
        Ok(vec![a, b])
    })?;
    Ok((ab[0], ab[1]))
}

/// `β` solving `−2 ln(1 − (β/r_m)^α) = x`; increasing in `x`.
fn beta_from_chi(r_m: f64, x: f64, alpha: f64) -> f64 {
    r_m * ((-(-x / 2.0).exp_m1()).ln() / alpha).exp()
}

fn t1_star(s: &RecordSample, beta: f64) -> Result<f64> {
    let t = s.t_star_at(beta)?;
    if !(t > 0.0) {
        return Err(Error::DegenerateSample(
            "T1* is zero: a single record sitting exactly at the known beta".into(),
        ));
    }
    Ok(t)
}

/// Equi-tailed interval for `β` with `α` known, from `−2 ln(1 − (β/R_m)^α) ~ χ²_{2m}`.
pub struct BetaEquiTailed;

impl IntervalMethod for BetaEquiTailed {
    fn name(&self) -> &'static str {
        "beta-et"
    }
    fn tag(&self) -> MethodTag {
        MethodTag::ET1
    }
    fn parameter(&self) -> Parameter {
        Parameter::Beta
    }
    fn knowledge(&self) -> Knowledge {
        Knowledge::AlphaKnown
    }
    fn sides(&self) -> Sides {
        Sides::TwoSided
    }
    fn min_m(&self) -> usize {
        1
    }
    fn description(&self) -> &'static str {
        "equi-tailed interval for beta, alpha known"
    }
    fn bounds(&self, s: &RecordSample, inputs: &IntervalInputs) -> Bounds {
        let alpha = inputs.alpha(self.name())?;
        let v = 2.0 * s.m() as f64;
        let lo = chi_q(inputs.gamma / 2.0, v)?;
        let hi = chi_q(1.0 - inputs.gamma / 2.0, v)?;
        Ok((
            (
                beta_from_chi(s.r_m(), lo, alpha),
                beta_from_chi(s.r_m(), hi, alpha),
            ),
            vec![],
        ))
    }
}

/// Shortest interval of the form `(c·R_m, R_m]` for `β` with `α` known.
pub struct BetaMinWidth;

impl IntervalMethod for BetaMinWidth {
    fn name(&self) -> &'static str {
        "beta-ml"
    }
    fn tag(&self) -> MethodTag {
        MethodTag::ML1
    }
    fn parameter(&self) -> Parameter {
        Parameter::Beta
    }
    fn knowledge(&self) -> Knowledge {
        Knowledge::AlphaKnown
    }
    fn sides(&self) -> Sides {
        Sides::TwoSided
    }
    fn min_m(&self) -> usize {
        1
    }
    fn description(&self) -> &'static str {
        "minimum-width interval for beta, alpha known"
    }
    fn bounds(&self, s: &RecordSample, inputs: &IntervalInputs) -> Bounds {
        let alpha = inputs.alpha(self.name())?;
        let g = g_quantile(1.0 - inputs.gamma, s.m())?;
        Ok(((s.r_m() * (-g / alpha).exp(), s.r_m()), vec![]))
    }
}

/// Equi-tailed interval for `β` conditional on the observed `T_m`.
pub struct BetaConditional;

impl IntervalMethod for BetaConditional {
    fn name(&self) -> &'static str {
        "beta-conditional"
    }
    fn tag(&self) -> MethodTag {
        MethodTag::ET1C
    }
    fn parameter(&self) -> Parameter {
        Parameter::Beta
    }
    fn knowledge(&self) -> Knowledge {
        Knowledge::AlphaKnown
    }
    fn sides(&self) -> Sides {
        Sides::TwoSided
    }
    fn min_m(&self) -> usize {
        1
    }
    fn description(&self) -> &'static str {
        "conditional equi-tailed interval for beta given T_m, alpha known"
    }
    fn bounds(&self, s: &RecordSample, inputs: &IntervalInputs) -> Bounds {
        let alpha = inputs.alpha(self.name())?;
        let scale = alpha * s.t_m() as f64;
        let g = inputs.gamma / 2.0;
        Ok((
            (
                s.r_m() * (g.ln() / scale).exp(),
                s.r_m() * ((-g).ln_1p() / scale).exp(),
            ),
            vec![],
        ))
    }
}

/// Uniformly most accurate one-sided bound for `β` with `α` known.
pub struct BetaBound(pub Sides);

impl IntervalMethod for BetaBound {
    fn name(&self) -> &'static str {
        match self.0 {
            Sides::Upper => "beta-uma-upper",
            _ => "beta-uma-lower",
        }
    }
    fn tag(&self) -> MethodTag {
        match self.0 {
            Sides::Upper => MethodTag::UMA_UPPER,
            _ => MethodTag::UMA_LOWER,
        }
    }
    fn parameter(&self) -> Parameter {
        Parameter::Beta
    }
    fn knowledge(&self) -> Knowledge {
        Knowledge::AlphaKnown
    }
    fn sides(&self) -> Sides {
        match self.0 {
            Sides::Upper => Sides::Upper,
            _ => Sides::Lower,
        }
    }
    fn min_m(&self) -> usize {
        1
    }
    fn description(&self) -> &'static str {
        "UMA one-sided confidence bound for beta, alpha known"
    }
    fn bounds(&self, s: &RecordSample, inputs: &IntervalInputs) -> Bounds {
        let alpha = inputs.alpha(self.name())?;
        let v = 2.0 * s.m() as f64;
        Ok(match self.sides() {
            Sides::Upper => {
                let x = chi_q(1.0 - inputs.gamma, v)?;
                (
                    (f64::NEG_INFINITY, beta_from_chi(s.r_m(), x, alpha)),
                    vec![],
                )
            }
            _ => {
                let x = chi_q(inputs.gamma, v)?;
                ((beta_from_chi(s.r_m(), x, alpha), f64::INFINITY), vec![])
            }
        })
    }
}

/// Equi-tailed interval for `α` with `β` known, from `2α·T1* ~ χ²_{2m}`.
pub struct AlphaEquiTailed;

impl IntervalMethod for AlphaEquiTailed {
    fn name(&self) -> &'static str {
        "alpha-et"
    }
    fn tag(&self) -> MethodTag {
        MethodTag::ETALPHA
    }
    fn parameter(&self) -> Parameter {
        Parameter::Alpha
    }
    fn knowledge(&self) -> Knowledge {
        Knowledge::BetaKnown
    }
    fn sides(&self) -> Sides {
        Sides::TwoSided
    }
    fn min_m(&self) -> usize {
        1
    }
    fn description(&self) -> &'static str {
        "equi-tailed interval for alpha, beta known"
    }
    fn bounds(&self, s: &RecordSample, inputs: &IntervalInputs) -> Bounds {
        let t1 = t1_star(s, inputs.beta(self.name())?)?;
        let v = 2.0 * s.m() as f64;
        let lo = chi_q(inputs.gamma / 2.0, v)?;
        let hi = chi_q(1.0 - inputs.gamma / 2.0, v)?;
        Ok(((lo / (2.0 * t1), hi / (2.0 * t1)), vec![]))
    }
}

/// Shortest interval `(a, b)/(2T1*)` for `α` with `β` known: equal χ²_{2m}
/// density at `a` and `b`.
pub struct AlphaMinWidth;

impl IntervalMethod for AlphaMinWidth {
    fn name(&self) -> &'static str {
        "alpha-ml"
    }
    fn tag(&self) -> MethodTag {
        MethodTag::MLALPHA
    }
    fn parameter(&self) -> Parameter {
        Parameter::Alpha
    }
    fn knowledge(&self) -> Knowledge {
        Knowledge::BetaKnown
    }
    fn sides(&self) -> Sides {
        Sides::TwoSided
    }
    fn min_m(&self) -> usize {
        // χ²_2 has its mode at zero.
        2
    }
    fn description(&self) -> &'static str {
        "minimum-width interval for alpha, beta known"
    }
    fn bounds(&self, s: &RecordSample, inputs: &IntervalInputs) -> Bounds {
        let t1 = t1_star(s, inputs.beta(self.name())?)?;
        let v = 2.0 * s.m() as f64;
        let (a, b) = chi_equal_level(v, v, inputs.gamma)?;
        Ok(((a / (2.0 * t1), b / (2.0 * t1)), vec![]))
    }
}

/// UMA unbiased interval for `α` with `β` known.
///
/// Unbiasedness puts the endpoints at equal values of `x^m e^{−x/2}`, the
/// χ²_{2m+2} density, while coverage is measured under χ²_{2m}. The result is
/// the acceptance region of the likelihood-ratio test inverted, and differs
/// from the minimum-width interval.
pub struct AlphaUnbiased;

impl IntervalMethod for AlphaUnbiased {
    fn name(&self) -> &'static str {
        "alpha-uma-unbiased"
    }
    fn tag(&self) -> MethodTag {
        MethodTag::UMAUB_ALPHA
    }
    fn parameter(&self) -> Parameter {
        Parameter::Alpha
    }
    fn knowledge(&self) -> Knowledge {
        Knowledge::BetaKnown
    }
    fn sides(&self) -> Sides {
        Sides::TwoSided
    }
    fn min_m(&self) -> usize {
        1
    }
    fn description(&self) -> &'static str {
        "UMA unbiased interval for alpha, beta known"
    }
    fn bounds(&self, s: &RecordSample, inputs: &IntervalInputs) -> Bounds {
        let t1 = t1_star(s, inputs.beta(self.name())?)?;
        let v = 2.0 * s.m() as f64;
        let (a, b) = chi_equal_level(v + 2.0, v, inputs.gamma)?;
        Ok(((a / (2.0 * t1), b / (2.0 * t1)), vec![]))
    }
}

/// Uniformly most accurate one-sided bound for `α` with `β` known.
pub struct AlphaBound(pub Sides);

impl IntervalMethod for AlphaBound {
    fn name(&self) -> &'static str {
        match self.0 {
            Sides::Upper => "alpha-uma-upper",
            _ => "alpha-uma-lower",
        }
    }
    fn tag(&self) -> MethodTag {
        match self.0 {
            Sides::Upper => MethodTag::UMA_UPPER,
            _ => MethodTag::UMA_LOWER,
        }
    }
    fn parameter(&self) -> Parameter {
        Parameter::Alpha
    }
    fn knowledge(&self) -> Knowledge {
        Knowledge::BetaKnown
    }
    fn sides(&self) -> Sides {
        match self.0 {
            Sides::Upper => Sides::Upper,
            _ => Sides::Lower,
        }
    }
    fn min_m(&self) -> usize {
        1
    }
    fn description(&self) -> &'static str {
        "UMA one-sided confidence bound for alpha, beta known"
    }
    fn bounds(&self, s: &RecordSample, inputs: &IntervalInputs) -> Bounds {
        let t1 = t1_star(s, inputs.beta(self.name())?)?;
        let v = 2.0 * s.m() as f64;
        Ok(match self.sides() {
            Sides::Upper => (
                (
                    f64::NEG_INFINITY,
                    chi_q(1.0 - inputs.gamma, v)? / (2.0 * t1),
                ),
                vec![],
            ),
            _ => (
                (chi_q(inputs.gamma, v)? / (2.0 * t1), f64::INFINITY),
                vec![],
            ),
        })
    }
}

/// Shortest interval `(a, b)/(2T2*)` for `α` with `β` unknown, from
/// `2α·T2* ~ χ²_{2m−2}`.
pub struct AlphaMinWidthBothUnknown;

impl IntervalMethod for AlphaMinWidthBothUnknown {
    fn name(&self) -> &'static str {
        "alpha-ml-2u"
    }
    fn tag(&self) -> MethodTag {
        MethodTag::ML2_ALPHA
    }
    fn parameter(&self) -> Parameter {
        Parameter::Alpha
    }
    fn knowledge(&self) -> Knowledge {
        Knowledge::BothUnknown
    }
    fn sides(&self) -> Sides {
        Sides::TwoSided
    }
    fn min_m(&self) -> usize {
        2
    }
    fn description(&self) -> &'static str {
        "minimum-width interval for alpha, beta unknown"
    }
    fn bounds(&self, s: &RecordSample, inputs: &IntervalInputs) -> Bounds {
        let t2 = s.t2_star();
        let v = 2.0 * (s.m() - 1) as f64;
        let (a, b) = chi_equal_level(v, v, inputs.gamma)?;
        Ok(((a / (2.0 * t2), b / (2.0 * t2)), vec![]))
    }
}

fn w_quantile(p: f64, m: usize) -> Result<f64> {
    fw_quantile(p, m, 2 * m - 2, &QuadratureSpec::default())
}

/// Equi-tailed interval for `β` with `α` unknown, from
/// `(ln R_m − ln β)/T2* ~ f_W(·; m, 2m−2)`.
pub struct BetaEquiTailedBothUnknown;

impl IntervalMethod for BetaEquiTailedBothUnknown {
    fn name(&self) -> &'static str {
        "beta-et-2u"
    }
    fn tag(&self) -> MethodTag {
        MethodTag::ET_BETA_2U
    }
    fn parameter(&self) -> Parameter {
        Parameter::Beta
    }
    fn knowledge(&self) -> Knowledge {
        Knowledge::BothUnknown
    }
    fn sides(&self) -> Sides {
        Sides::TwoSided
    }
    fn min_m(&self) -> usize {
        2
    }
    fn description(&self) -> &'static str {
        "equi-tailed interval for beta, alpha unknown"
    }
    fn bounds(&self, s: &RecordSample, inputs: &IntervalInputs) -> Bounds {
        let t2 = s.t2_star();
        let lo = w_quantile(inputs.gamma / 2.0, s.m())?;
        let hi = w_quantile(1.0 - inputs.gamma / 2.0, s.m())?;
        Ok((
            (s.r_m() * (-t2 * hi).exp(), s.r_m() * (-t2 * lo).exp()),
            vec![],
        ))
    }
}

/// Shortest pivot set for `β` with `α` unknown, mapped like the equi-tailed
/// interval.
///
/// `f_W` decreases on its whole support, so the equal-density system has no
/// interior solution and the shortest set of mass `1 − γ` is `[0, w_{1−γ}]`.
/// The interval is then `(R_m e^{−T2*·w_{1−γ}}, R_m]`.
pub struct BetaMinWidthBothUnknown;

impl IntervalMethod for BetaMinWidthBothUnknown {
    fn name(&self) -> &'static str {
        "beta-ml-2u"
    }
    fn tag(&self) -> MethodTag {
        MethodTag::ML_BETA_2U
    }
    fn parameter(&self) -> Parameter {
        Parameter::Beta
    }
    fn knowledge(&self) -> Knowledge {
        Knowledge::BothUnknown
    }
    fn sides(&self) -> Sides {
        Sides::TwoSided
    }
    fn min_m(&self) -> usize {
        2
    }
    fn description(&self) -> &'static str {
        "minimum-width interval for beta, alpha unknown"
    }
    fn bounds(&self, s: &RecordSample, inputs: &IntervalInputs) -> Bounds {
        let m = s.m();
        let density = DistHandle::f_w(m, 2 * m - 2, QuadratureSpec::default())?;
        let note = match solve_equal_level_system(&density, &density, 1.0 - inputs.gamma, None) {
            Err(Error::NotUnimodal(why)) => format!(
                "equal-density system has no interior solution ({why}); using the boundary solution [0, w_(1-gamma)]"
            ),
            Ok(_) => {
                return Err(Error::NoSolution(
                    "unexpected interior equal-density solution for a decreasing density".into(),
                ))
            }
            Err(e) => return Err(e),
        };
        let hi = w_quantile(1.0 - inputs.gamma, m)?;
        Ok(((s.r_m() * (-s.t2_star() * hi).exp(), s.r_m()), vec![note]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{chisq_cdf, chisq_pdf, chisq_quantile};
    use crate::record::WAGE_DATA;
    use crate::record::{extract_lower_records, RecordTarget};

    fn wage() -> RecordSample {
        extract_lower_records(&WAGE_DATA, RecordTarget::Count(3)).unwrap()
    }

    #[test]
    fn wage_alpha_interval_both_unknown() {
        let e = AlphaMinWidthBothUnknown
            .estimate(&wage(), &IntervalInputs::new(0.05))
            .unwrap();
        assert!((e.lower - 0.096).abs() < 1e-3, "{}", e.lower);
        assert!((e.upper - 10.807).abs() < 1e-3, "{}", e.upper);
    }

    #[test]
    fn wage_conditional_interval() {
        let e = BetaConditional
            .estimate(&wage(), &IntervalInputs::new(0.05).with_alpha(6.804))
            .unwrap();
        let k = 6.804 * 8.0;
        assert!((e.lower - 103.0 * 0.025f64.powf(1.0 / k)).abs() < 1e-12);
        assert!((e.upper - 103.0 * 0.975f64.powf(1.0 / k)).abs() < 1e-12);
        assert!((e.lower - 96.25).abs() < 0.01 && (e.upper - 102.95).abs() < 0.01);
    }

    #[test]
    fn beta_known_alpha_is_equi_tailed_in_chi_square() {
        let s = wage();
        let e = AlphaEquiTailed
            .estimate(&s, &IntervalInputs::new(0.05).with_beta(103.0))
            .unwrap();
        let t = s.t2_star();
        assert!((e.lower - chisq_quantile(0.025, 6.0).unwrap() / (2.0 * t)).abs() < 1e-12);
        assert!((e.upper - chisq_quantile(0.975, 6.0).unwrap() / (2.0 * t)).abs() < 1e-12);
    }

    #[test]
    fn equi_tailed_beta_inverts_its_pivot() {
        let s = wage();
        let alpha = 6.804;
        let e = BetaEquiTailed
            .estimate(&s, &IntervalInputs::new(0.1).with_alpha(alpha))
            .unwrap();
        let pivot = |b: f64| -2.0 * (1.0 - (b / s.r_m()).powf(alpha)).ln();
        assert!((chisq_cdf(pivot(e.lower), 6.0).unwrap() - 0.05).abs() < 1e-10);
        assert!((chisq_cdf(pivot(e.upper), 6.0).unwrap() - 0.95).abs() < 1e-10);
    }

    #[test]
    fn single_record_min_width_beta() {
        let s = RecordSample::new([(7.0, 1)]).unwrap();
        let e = BetaMinWidth
            .estimate(&s, &IntervalInputs::new(0.05).with_alpha(2.0))
            .unwrap();
        assert!((e.lower - 7.0 * 0.05f64.sqrt()).abs() < 1e-9);
        assert_eq!(e.upper, 7.0);
    }

    #[test]
    fn unbiased_and_min_width_differ() {
        let s = wage();
        let inputs = IntervalInputs::new(0.05).with_beta(100.0);
        let ml = AlphaMinWidth.estimate(&s, &inputs).unwrap();
        let ub = AlphaUnbiased.estimate(&s, &inputs).unwrap();
        assert!(ml.width() < ub.width());
        // The unbiased endpoints share the value of z^m e^{-z/2}.
        let t1 = s.t_star_at(100.0).unwrap();
        let h = |alpha: f64| {
            let z = 2.0 * alpha * t1;
            3.0 * z.ln() - z / 2.0
        };
        assert!((h(ub.lower) - h(ub.upper)).abs() < 1e-9);
        let (a, b) = (2.0 * t1 * ml.lower, 2.0 * t1 * ml.upper);
        assert!((chisq_pdf(a, 6.0).unwrap() / chisq_pdf(b, 6.0).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn one_sided_bounds_straddle() {
        let s = wage();
        let inputs = IntervalInputs::new(0.05).with_beta(100.0).with_alpha(5.0);
        let lo = AlphaBound(Sides::Lower).estimate(&s, &inputs).unwrap();
        let hi = AlphaBound(Sides::Upper).estimate(&s, &inputs).unwrap();
        assert!(lo.lower < hi.upper);
        let blo = BetaBound(Sides::Lower).estimate(&s, &inputs).unwrap();
        let bhi = BetaBound(Sides::Upper).estimate(&s, &inputs).unwrap();
        assert!(blo.lower < bhi.upper && bhi.upper < s.r_m());
    }

    #[test]
    fn degenerate_requests() {
        let two = RecordSample::new([(5.0, 2), (4.0, 1)]).unwrap();
        assert!(matches!(
            AlphaMinWidthBothUnknown.estimate(&two, &IntervalInputs::new(0.05)),
            Err(Error::NotUnimodal(_))
        ));
        let one = RecordSample::new([(5.0, 1)]).unwrap();
        assert!(matches!(
            BetaEquiTailedBothUnknown.estimate(&one, &IntervalInputs::new(0.05)),
            Err(Error::DegenerateSample(_))
        ));
        assert!(BetaEquiTailed
            .estimate(&one, &IntervalInputs::new(0.05))
            .is_err());
        assert!(matches!(
            AlphaEquiTailed.estimate(&one, &IntervalInputs::new(0.05).with_beta(6.0)),
            Err(Error::BetaExceedsMinimum { .. })
        ));
    }

    #[test]
    fn scale_equivariance() {
        let s = wage();
        let c = 3.7;
        let sc = s.scaled(c).unwrap();
        let a = IntervalInputs::new(0.05).with_alpha(4.0);
        for m in [
            &BetaEquiTailed as &dyn IntervalMethod,
            &BetaMinWidth,
            &BetaConditional,
            &BetaEquiTailedBothUnknown,
        ] {
            let (x, y) = (m.estimate(&s, &a).unwrap(), m.estimate(&sc, &a).unwrap());
            assert!((y.lower / x.lower - c).abs() < 1e-10 && (y.upper / x.upper - c).abs() < 1e-10);
        }
        let e = AlphaMinWidthBothUnknown.estimate(&sc, &a).unwrap();
        let f = AlphaMinWidthBothUnknown.estimate(&s, &a).unwrap();
        assert!((e.lower - f.lower).abs() < 1e-12);
    }
}
