//! Hypothesis tests on `β` and `α`.
//!
//! One-sided tags end in `_GE` when the alternative is `θ > θ₀` and in `_LE`
//! when it is `θ < θ₀`. Two-sided problems use likelihood-ratio tests, since
//! no UMP two-sided test exists for these families.

pub mod functions;
pub mod procedures;

use serde::{Deserialize, Serialize};

use crate::error::{check_gamma, check_positive, Error, Result};
use crate::intervals::{Knowledge, Parameter};
use crate::record::RecordSample;
use crate::simulation::SimConfig;

pub use functions::*;
pub use procedures::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `H1: θ > θ₀`.
    Greater,
    /// `H1: θ < θ₀`.
    Less,
    /// `H1: θ ≠ θ₀`.
    TwoSided,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Reject,
    Accept,
}

#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TestTag {
    UMP_BETA_GE,
    UMP_BETA_LE,
    GLR_BETA_AK,
    UMP_ALPHA_BK_GE,
    UMP_ALPHA_BK_LE,
    GLR_ALPHA_BK,
    UMPI_ALPHA_GE,
    UMPI_ALPHA_LE,
    GLR_ALPHA_2U,
    GLR_BETA_2U,
}

/// Where a likelihood-ratio critical value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum CriticalSource {
    /// The published table where it applies, else simulation when a
    /// [`SimConfig`] is supplied.
    Auto,
    PublishedTable,
    /// Solved numerically from the null distribution.
    Exact,
    /// Monte Carlo with the inputs' [`SimConfig`].
    Simulate,
    Provided(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestInputs {
    /// Size of the test.
    pub gamma: f64,
    /// Hypothesized value of the tested parameter.
    pub null_value: f64,
    pub alpha_known: Option<f64>,
    pub beta_known: Option<f64>,
    pub critical: CriticalSource,
    pub simulation: Option<SimConfig>,
}

impl TestInputs {
    pub fn new(gamma: f64, null_value: f64) -> Self {
        Self {
            gamma,
            null_value,
            alpha_known: None,
            beta_known: None,
            critical: CriticalSource::Auto,
            simulation: None,
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

    pub fn with_critical(mut self, critical: CriticalSource) -> Self {
        self.critical = critical;
        self
    }

    pub fn with_simulation(mut self, cfg: SimConfig) -> Self {
        self.simulation = Some(cfg);
        self
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

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Critical {
    Single(#[serde(with = "crate::serde_float")] f64),
    Pair(
        #[serde(with = "crate::serde_float")] f64,
        #[serde(with = "crate::serde_float")] f64,
    ),
}

/// Origin of the critical value actually used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalProvenance {
    pub source: String,
    pub seed: Option<u64>,
    pub reps: Option<u64>,
    pub std_error: Option<f64>,
}

impl CriticalProvenance {
    pub fn analytic(what: &str) -> Self {
        Self {
            source: what.to_string(),
            seed: None,
            reps: None,
            std_error: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    #[serde(with = "crate::serde_float")]
    pub statistic: f64,
    pub critical: Critical,
    /// Human-readable rejection region.
    pub region: String,
    pub decision: Decision,
    pub gamma: f64,
    pub method: TestTag,
    pub name: String,
    pub parameter: Parameter,
    pub direction: Direction,
    pub null_value: f64,
    pub critical_source: CriticalProvenance,
    pub diagnostics: Vec<String>,
}

impl TestOutcome {
    pub fn rejected(&self) -> bool {
        self.decision == Decision::Reject
    }
}

/// What a procedure computed, before the common fields are attached.
pub struct Verdict {
    pub statistic: f64,
    pub critical: Critical,
    pub region: String,
    pub reject: bool,
    pub provenance: CriticalProvenance,
    pub diagnostics: Vec<String>,
}

/// One hypothesis-testing procedure.
pub trait TestProcedure: Send + Sync {
    /// Registry key, as accepted by `--method`.
    fn name(&self) -> &'static str;
    fn tag(&self) -> TestTag;
    fn parameter(&self) -> Parameter;
    fn knowledge(&self) -> Knowledge;
    fn direction(&self) -> Direction;
    fn min_m(&self) -> usize;
    fn description(&self) -> &'static str;

    fn evaluate(&self, s: &RecordSample, inputs: &TestInputs) -> Result<Verdict>;

    fn run(&self, s: &RecordSample, inputs: &TestInputs) -> Result<TestOutcome> {
        check_gamma(inputs.gamma)?;
        check_positive("null value", inputs.null_value)?;
        if s.m() < self.min_m() {
            return Err(Error::DegenerateSample(format!(
                "{} needs at least {} records, got {}",
                self.name(),
                self.min_m(),
                s.m()
            )));
        }
        let v = self.evaluate(s, inputs)?;
        Ok(TestOutcome {
            statistic: v.statistic,
            critical: v.critical,
            region: v.region,
            decision: if v.reject {
                Decision::Reject
            } else {
                Decision::Accept
            },
            gamma: inputs.gamma,
            method: self.tag(),
            name: self.name().to_string(),
            parameter: self.parameter(),
            direction: self.direction(),
            null_value: inputs.null_value,
            critical_source: v.provenance,
            diagnostics: v.diagnostics,
        })
    }
}

/// Name-keyed collection of test procedures.
pub struct TestRegistry {
    procedures: Vec<Box<dyn TestProcedure>>,
}

impl TestRegistry {
    pub fn empty() -> Self {
        Self {
            procedures: Vec::new(),
        }
    }

    pub fn standard() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(UmpBeta(Direction::Greater)));
        r.register(Box::new(UmpBeta(Direction::Less)));
        r.register(Box::new(GlrBetaAlphaKnown));
        r.register(Box::new(UmpAlpha(Direction::Greater)));
        r.register(Box::new(UmpAlpha(Direction::Less)));
        r.register(Box::new(GlrAlphaBetaKnown));
        r.register(Box::new(UmpInvariantAlpha(Direction::Greater)));
        r.register(Box::new(UmpInvariantAlpha(Direction::Less)));
        r.register(Box::new(GlrAlphaBothUnknown));
        r.register(Box::new(GlrBetaBothUnknown));
        r
    }

    pub fn register(&mut self, p: Box<dyn TestProcedure>) {
        self.procedures.retain(|q| q.name() != p.name());
        self.procedures.push(p);
    }

    pub fn get(&self, name: &str) -> Result<&dyn TestProcedure> {
        self.procedures
            .iter()
            .find(|p| p.name() == name)
            .map(|p| p.as_ref())
            .ok_or_else(|| Error::UnknownMethod(name.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn TestProcedure> {
        self.procedures.iter().map(|p| p.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.procedures.iter().map(|p| p.name()).collect()
    }

    /// Picks the procedure for a request, by name or by default, and checks
    /// that it answers the question asked.
    pub fn resolve(
        &self,
        name: Option<&str>,
        parameter: Parameter,
        knowledge: Knowledge,
        direction: Direction,
    ) -> Result<&dyn TestProcedure> {
        let p = match name {
            Some(n) => self.get(n)?,
            None => self.get(default_name(parameter, knowledge, direction)?)?,
        };
        if p.direction() != direction {
            if direction == Direction::TwoSided {
                return Err(Error::UnsupportedCombination(format!(
                    "{} is one-sided; no UMP test exists for a two-sided alternative, use the GLR test instead",
                    p.name()
                )));
            }
            return Err(Error::UnsupportedCombination(format!(
                "{} tests a {:?} alternative, not {:?}",
                p.name(),
                p.direction(),
                direction
            )));
        }
        if p.parameter() != parameter || p.knowledge() != knowledge {
            return Err(Error::UnsupportedCombination(format!(
                "{} tests {} with {:?}, but the request is for {} with {:?}",
                p.name(),
                p.parameter(),
                p.knowledge(),
                parameter,
                knowledge
            )));
        }
        Ok(p)
    }
}

fn default_name(
    parameter: Parameter,
    knowledge: Knowledge,
    direction: Direction,
) -> Result<&'static str> {
    use Direction::*;
    use Knowledge::*;
    Ok(match (parameter, knowledge, direction) {
        (Parameter::Beta, AlphaKnown, Greater) => "ump-beta-greater",
        (Parameter::Beta, AlphaKnown, Less) => "ump-beta-less",
        (Parameter::Beta, AlphaKnown, TwoSided) => "glr-beta-alpha-known",
        (Parameter::Alpha, BetaKnown, Greater) => "ump-alpha-greater",
        (Parameter::Alpha, BetaKnown, Less) => "ump-alpha-less",
        (Parameter::Alpha, BetaKnown, TwoSided) => "glr-alpha-beta-known",
        (Parameter::Alpha, BothUnknown, Greater) => "umpi-alpha-greater",
        (Parameter::Alpha, BothUnknown, Less) => "umpi-alpha-less",
        (Parameter::Alpha, BothUnknown, TwoSided) => "glr-alpha",
        (Parameter::Beta, BothUnknown, TwoSided) => "glr-beta",
        (Parameter::Beta, BothUnknown, _) => {
            return Err(Error::UnsupportedCombination(
                "no one-sided test for beta with alpha unknown is available; use the two-sided GLR test".into(),
            ))
        }
        (Parameter::Beta, BetaKnown, _) | (Parameter::Alpha, AlphaKnown, _) => {
            return Err(Error::UnsupportedCombination(format!(
                "{parameter} is already known; nothing to test"
            )))
        }
    })
}
