//! Pareto, record-minimum, ratio-pivot and record-time laws.

pub mod fw;
pub mod g_record;
pub mod handle;
pub mod pareto;
pub mod record_time;

pub use fw::{fw_cdf, fw_normalization, fw_pdf, fw_quantile};
pub use g_record::{g_cdf, g_ln_pdf, g_pdf, g_quantile, neg_log_one_minus_exp};
pub use handle::DistHandle;
pub use pareto::{pareto_cdf, pareto_pdf, pareto_quantile};
pub use record_time::{
    check_recursion_identity, expect_over_tm, tm_pmf, IdentityOutcome, RecordTimeLaw, SeriesValue,
    TailBound,
};
