use thiserror::Error;

/// Errors raised anywhere in the inference stack.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty input sequence")]
    EmptySequence,

    #[error("value {value} at position {position} is not strictly positive")]
    NonPositiveValue { position: usize, value: f64 },

    #[error("only {found} records present, {requested} requested")]
    InsufficientRecords { found: usize, requested: usize },

    #[error("observation {value} at position {position} ties the current minimum")]
    TieAtRecord { position: usize, value: f64 },

    #[error("invalid record sample: {0}")]
    InvalidSample(String),

    #[error("beta = {beta} exceeds the smallest record r_m = {r_m}")]
    BetaExceedsMinimum { beta: f64, r_m: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no sign change on bracket [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("root finder exceeded {0} iterations")]
    MaxIterations(usize),

    #[error("quadrature tolerance not met after {subdivisions} subdivisions (estimate {estimate}, error {error})")]
    ToleranceNotMet {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error("density is not unimodal with an interior mode: {0}")]
    NotUnimodal(String),

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("series tail cannot be bounded: {0}")]
    TailNotBounded(String),

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("T2* is zero for a sample with m = {0}")]
    ZeroT2Star(usize),

    #[error("expectation is infinite or numerically unstable: {0}")]
    InfiniteExpectation(String),

    #[error("moment does not exist: {0}")]
    MomentDoesNotExist(String),

    #[error("critical value unavailable: {0}")]
    CriticalValueUnavailable(String),

    #[error("C* unavailable: {0}")]
    CstarUnavailable(String),

    #[error("record sampling exceeded {cap} trials")]
    RunawaySampling { cap: u64 },

    #[error("Monte Carlo estimate unstable: {0}")]
    InstabilityDetected(String),

    #[error("unsupported combination: {0}")]
    UnsupportedCombination(String),

    #[error("unknown method '{0}'")]
    UnknownMethod(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for failures of the numerical machinery rather than of the caller's input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoSignChange { .. }
                | Error::MaxIterations(_)
                | Error::ToleranceNotMet { .. }
                | Error::NotUnimodal(_)
                | Error::NoSolution(_)
                | Error::TailNotBounded(_)
                | Error::InfiniteExpectation(_)
                | Error::RunawaySampling { .. }
                | Error::InstabilityDetected(_)
                | Error::CstarUnavailable(_)
                | Error::CriticalValueUnavailable(_)
        )
    }
}

pub(crate) fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "gamma must lie in (0, 1), got {gamma}"
        )))
    }
}

pub(crate) fn check_positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "{name} must be positive and finite, got {value}"
        )))
    }
}
