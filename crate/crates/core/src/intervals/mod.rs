//! Confidence intervals and one-sided confidence bounds for `β` and `α`.
//!
//! Every construction is an [`IntervalMethod`] registered by name in an
//! [`IntervalRegistry`], so callers pick procedures by name or by what is
//! known about the parameters.

pub mod methods;
pub mod width;

use std::fmt;
use std::sync::LazyLock;

use serde::{Deserialize, Serialize};

use crate::error::{check_gamma, check_positive, Error, Result};
use crate::memo::Memo;
use crate::numerics::chisq_quantile;
use crate::record::{ParetoParams, RecordSample};

pub use methods::*;
pub use width::{
    expected_width_beta_conditional, expected_width_beta_unconditional, ExpectedWidth,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parameter {
    Alpha,
    Beta,
}

impl fmt::Display for Parameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parameter::Alpha => "alpha",
            Parameter::Beta => "beta",
        })
    }
}

/// Which nuisance parameter, if any, is known.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Knowledge {
    AlphaKnown,
    BetaKnown,
    BothUnknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sides {
    TwoSided,
    /// A lower confidence bound; the upper end is `+∞`.
    Lower,
    /// An upper confidence bound; the lower end is `−∞`.
    Upper,
}

#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MethodTag {
    ET1,
    ML1,
    ET1C,
    ETALPHA,
    MLALPHA,
    UMAUB_ALPHA,
    ML2_ALPHA,
    ET_BETA_2U,
    ML_BETA_2U,
    UMA_LOWER,
    UMA_UPPER,
}

/// Level and known parameter values for one interval request.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalInputs {
    /// Non-coverage probability; the interval has level `1 − gamma`.
    pub gamma: f64,
    pub alpha_known: Option<f64>,
    pub beta_known: Option<f64>,
}

impl IntervalInputs {
    pub fn new(gamma: f64) -> Self {
        Self {
            gamma,
            alpha_known: None,
            beta_known: None,
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha_known = Some(alpha);
        self
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta_known = Some(beta);
        self
    }

    /// Inputs a method with the given knowledge would receive when the truth is `p`.
    pub fn for_truth(knowledge: Knowledge, gamma: f64, p: ParetoParams) -> Self {
        match knowledge {
            Knowledge::AlphaKnown => Self::new(gamma).with_alpha(p.alpha),
            Knowledge::BetaKnown => Self::new(gamma).with_beta(p.beta),
            Knowledge::BothUnknown => Self::new(gamma),
        }
    }

    pub(crate) fn alpha(&self, method: &str) -> Result<f64> {
        let a = self
            .alpha_known
            .ok_or_else(|| Error::Domain(format!("{method} needs a known alpha")))?;
        check_positive("alpha", a)?;
        Ok(a)
    }

    pub(crate) fn beta(&self, method: &str) -> Result<f64> {
        let b = self
            .beta_known
            .ok_or_else(|| Error::Domain(format!("{method} needs a known beta")))?;
        check_positive("beta", b)?;
        Ok(b)
    }
}

/// The sample summaries and settings an interval was computed from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InputsDigest {
    pub m: usize,
    pub t_m: u64,
    pub r_m: f64,
    pub t2_star: f64,
    pub t1_star: Option<f64>,
    pub gamma: f64,
    pub alpha_known: Option<f64>,
    pub beta_known: Option<f64>,
}

impl InputsDigest {
    pub fn new(s: &RecordSample, inputs: &IntervalInputs) -> Self {
        Self {
            m: s.m(),
            t_m: s.t_m(),
            r_m: s.r_m(),
            t2_star: s.t2_star(),
            t1_star: inputs.beta_known.and_then(|b| s.t_star_at(b).ok()),
            gamma: inputs.gamma,
            alpha_known: inputs.alpha_known,
            beta_known: inputs.beta_known,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalEstimate {
    #[serde(with = "crate::serde_float")]
    pub lower: f64,
    #[serde(with = "crate::serde_float")]
    pub upper: f64,
    pub level: f64,
    pub method: MethodTag,
    pub name: String,
    pub parameter: Parameter,
    pub sides: Sides,
    pub inputs: InputsDigest,
    pub diagnostics: Vec<String>,
}

impl IntervalEstimate {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    /// Closed-interval membership.
    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

/// One confidence-interval construction.
pub trait IntervalMethod: Send + Sync {
    /// Registry key, as accepted by `--method`.
    fn name(&self) -> &'static str;
    fn tag(&self) -> MethodTag;
    fn parameter(&self) -> Parameter;
    fn knowledge(&self) -> Knowledge;
    fn sides(&self) -> Sides;
    fn min_m(&self) -> usize;
    fn description(&self) -> &'static str;

    /// Computes `(lower, upper)` and any diagnostics.
    fn bounds(
        &self,
        s: &RecordSample,
        inputs: &IntervalInputs,
    ) -> Result<((f64, f64), Vec<String>)>;

    fn estimate(&self, s: &RecordSample, inputs: &IntervalInputs) -> Result<IntervalEstimate> {
        check_gamma(inputs.gamma)?;
        if s.m() < self.min_m() {
            return Err(Error::DegenerateSample(format!(
                "{} needs at least {} records, got {}",
                self.name(),
                self.min_m(),
                s.m()
            )));
        }
        let ((lower, upper), diagnostics) = self.bounds(s, inputs)?;
        Ok(IntervalEstimate {
            lower,
            upper,
            level: 1.0 - inputs.gamma,
            method: self.tag(),
            name: self.name().to_string(),
            parameter: self.parameter(),
            sides: self.sides(),
            inputs: InputsDigest::new(s, inputs),
            diagnostics,
        })
    }
}

/// Name-keyed collection of interval methods.
pub struct IntervalRegistry {
    methods: Vec<Box<dyn IntervalMethod>>,
}

impl IntervalRegistry {
    pub fn empty() -> Self {
        Self {
            methods: Vec::new(),
        }
    }

    /// Every construction this crate provides.
    pub fn standard() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(BetaEquiTailed));
        r.register(Box::new(BetaMinWidth));
        r.register(Box::new(BetaConditional));
        r.register(Box::new(BetaBound(Sides::Lower)));
        r.register(Box::new(BetaBound(Sides::Upper)));
        r.register(Box::new(AlphaEquiTailed));
        r.register(Box::new(AlphaMinWidth));
        r.register(Box::new(AlphaUnbiased));
        r.register(Box::new(AlphaBound(Sides::Lower)));
        r.register(Box::new(AlphaBound(Sides::Upper)));
        r.register(Box::new(AlphaMinWidthBothUnknown));
        r.register(Box::new(BetaEquiTailedBothUnknown));
        r.register(Box::new(BetaMinWidthBothUnknown));
        r
    }

    /// Adds a method, replacing any with the same name.
    pub fn register(&mut self, method: Box<dyn IntervalMethod>) {
        self.methods.retain(|m| m.name() != method.name());
        self.methods.push(method);
    }

    pub fn get(&self, name: &str) -> Result<&dyn IntervalMethod> {
        self.methods
            .iter()
            .find(|m| m.name() == name)
            .map(|m| m.as_ref())
            .ok_or_else(|| Error::UnknownMethod(name.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn IntervalMethod> {
        self.methods.iter().map(|m| m.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.methods.iter().map(|m| m.name()).collect()
    }

    /// The method used when none is named.
    pub fn default_for(
        &self,
        parameter: Parameter,
        knowledge: Knowledge,
    ) -> Result<&dyn IntervalMethod> {
        let name = match (parameter, knowledge) {
            (Parameter::Beta, Knowledge::AlphaKnown) => "beta-et",
            (Parameter::Beta, Knowledge::BothUnknown) => "beta-et-2u",
            (Parameter::Alpha, Knowledge::BetaKnown) => "alpha-et",
            (Parameter::Alpha, Knowledge::BothUnknown) => "alpha-ml-2u",
            (Parameter::Beta, Knowledge::BetaKnown) | (Parameter::Alpha, Knowledge::AlphaKnown) => {
                return Err(Error::UnsupportedCombination(format!(
                    "{parameter} is already known; nothing to estimate"
                )))
            }
        };
        self.get(name)
    }
}

static CHISQ_QUANTILES: LazyLock<Memo<(u64, u64)>> = LazyLock::new(Memo::new);

/// `chisq_quantile(p, v)` through a process-wide cache.
pub(crate) fn chi_q(p: f64, v: f64) -> Result<f64> {
    Ok(CHISQ_QUANTILES.get_or_try((p.to_bits(), v.to_bits()), || {
        Ok(vec![chisq_quantile(p, v)?])
    })?[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_names_are_unique() {
        let r = IntervalRegistry::standard();
        let mut names = r.names();
        let n = names.len();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), n);
        assert_eq!(n, 13);
        assert!(matches!(r.get("nope"), Err(Error::UnknownMethod(_))));
    }

    #[test]
    fn every_method_reports_its_level() {
        let s = RecordSample::new([(112.0, 3), (108.0, 4), (103.0, 1)]).unwrap();
        let inputs = IntervalInputs::new(0.05).with_alpha(6.804).with_beta(90.0);
        for method in IntervalRegistry::standard().iter() {
            let e = method.estimate(&s, &inputs).unwrap();
            assert_eq!(e.level, 0.95);
            assert!(e.lower <= e.upper, "{}", method.name());
            assert_eq!(e.method, method.tag());
        }
    }

    #[test]
    fn json_round_trip_with_open_side() {
        let s = RecordSample::new([(112.0, 3), (108.0, 4), (103.0, 1)]).unwrap();
        let e = AlphaBound(Sides::Lower)
            .estimate(&s, &IntervalInputs::new(0.05).with_beta(100.0))
            .unwrap();
        assert_eq!(e.upper, f64::INFINITY);
        let back: IntervalEstimate =
            serde_json::from_str(&serde_json::to_string(&e).unwrap()).unwrap();
        assert_eq!(back, e);
    }
}
