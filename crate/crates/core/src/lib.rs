//! Classical inference for the two-parameter Pareto distribution from
//! lower-record data: point estimates, exact intervals, hypothesis tests, and
//! the densities, solvers and Monte Carlo machinery behind them.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod densities;
pub mod error;
pub mod estimation;
pub mod hypothesis;
pub mod intervals;
pub mod memo;
pub mod numerics;
pub mod record;
pub mod serde_float;
pub mod simulation;

pub use error::{Error, Result};
