use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "record-pareto",
    version,
    about = "Inference for the two-parameter Pareto distribution from lower-record data"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract lower records from a raw sequence.
    Extract(InputArgs),
    /// Maximum likelihood and unbiased point estimates.
    Estimate(InputArgs),
    /// Confidence interval or one-sided bound for alpha or beta.
    Ci(CiArgs),
    /// Hypothesis test for alpha or beta.
    Test(TestArgs),
    /// Regenerate a reference table as CSV.
    Tables(TablesArgs),
    /// Relative efficiency of the MLE of alpha against the unbiased estimator.
    EfficiencyCurve(EfficiencyArgs),
    /// Monte Carlo studies: critical values, coverage, size, record times, pivots, estimator accuracy.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    /// One observation per line.
    Raw,
    /// Two columns r,k of already extracted records.
    Records,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct InputArgs {
    /// CSV file, or '-' for standard input.
    #[arg(long)]
    pub input: String,

    #[arg(long, value_enum, default_value_t = Kind::Raw)]
    pub kind: Kind,

    /// Number of records to use: a positive integer, or 'all'.
    #[arg(long, default_value = "all")]
    pub m: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Param {
    Alpha,
    Beta,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct KnownArgs {
    /// Known shape alpha.
    #[arg(long)]
    pub alpha_known: Option<f64>,

    /// Known scale beta.
    #[arg(long)]
    pub beta_known: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimArgs {
    /// Monte Carlo replicates.
    #[arg(long)]
    pub reps: Option<u64>,

    /// Base seed; overrides the RECORD_PARETO_SEED environment variable.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Worker threads for simulation.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CiArgs {
    #[command(flatten)]
    pub input: InputArgs,

    #[arg(long, value_enum)]
    pub param: Param,

    /// One minus the confidence level.
    #[arg(long, default_value_t = 0.05)]
    pub gamma: f64,

    #[command(flatten)]
    pub known: KnownArgs,

    /// Interval method name, or 'all' for every applicable method.
    #[arg(long)]
    pub method: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionArg {
    TwoSided,
    Greater,
    Less,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TestArgs {
    #[command(flatten)]
    pub input: InputArgs,

    #[arg(long, value_enum)]
    pub param: Param,

    /// Hypothesized value of the parameter.
    #[arg(long)]
    pub null: f64,

    /// Alternative hypothesis.
    #[arg(long, value_enum, default_value_t = DirectionArg::TwoSided)]
    pub direction: DirectionArg,

    /// Test size.
    #[arg(long, default_value_t = 0.05)]
    pub gamma: f64,

    #[command(flatten)]
    pub known: KnownArgs,

    /// Test procedure name; chosen from the knowledge flags when omitted.
    #[arg(long)]
    pub method: Option<String>,

    /// Critical value source: auto, table, exact, simulate, or a number.
    #[arg(long, default_value = "auto")]
    pub critical: String,

    #[command(flatten)]
    pub sim: SimArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Which {
    /// Minimum-width chi-square endpoints (a, b).
    Table1,
    /// Percentiles of the ratio-pivot law with nu = 2m - 2.
    Table2,
    /// Lower quantiles of X^m exp(-X/2), X ~ chi-square(2m).
    Table3,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TablesArgs {
    #[arg(value_enum)]
    pub which: Which,

    /// Restrict to one record count.
    #[arg(long)]
    pub m: Option<usize>,

    /// Restrict to one gamma (table1, table3) or one probability (table2).
    #[arg(long)]
    pub gamma: Option<f64>,

    #[command(flatten)]
    pub sim: SimArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EfficiencyArgs {
    /// Range of record counts 'a-b' (inclusive), or a single count.
    #[arg(long, default_value = "5-100")]
    pub m: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Study {
    /// Critical value C* of the GLR test for beta with alpha unknown.
    Cstar,
    /// Lower gamma-quantile of X^m exp(-X/2), X ~ chi-square(2m).
    Quantile,
    /// Coverage of an interval method.
    Coverage,
    /// Rejection rate of a test at the true parameters.
    Size,
    /// Distribution of the record time T_m against its exact law.
    RecordTime,
    /// Kolmogorov-Smirnov checks of the four pivots.
    Pivots,
    /// MSE and bias of the shape estimators against their formulas.
    Accuracy,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(value_enum)]
    pub study: Study,

    /// Number of records per simulated sample.
    #[arg(long, default_value_t = 3)]
    pub m: usize,

    #[arg(long, default_value_t = 0.05)]
    pub gamma: f64,

    /// True shape of the simulated Pareto parent; also the known alpha handed to methods.
    #[arg(long, default_value_t = 1.0)]
    pub alpha_known: f64,

    /// True scale of the simulated Pareto parent; also the known beta handed to methods.
    #[arg(long, default_value_t = 1.0)]
    pub beta_known: f64,

    /// Interval method (coverage) or test procedure (size).
    #[arg(long)]
    pub method: Option<String>,

    /// Null value for size studies; defaults to the true parameter.
    #[arg(long)]
    pub null: Option<f64>,

    #[command(flatten)]
    pub sim: SimArgs,
}
