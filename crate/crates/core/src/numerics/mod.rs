//! Special functions, root finding, quadrature and the equal-density solver.

pub mod equal_density;
pub mod quadrature;
pub mod roots;
pub mod special;
pub mod stirling;

pub use equal_density::{solve_equal_density_system, solve_equal_level_system};
pub use quadrature::{integrate, Domain, QuadratureSpec};
pub use roots::{find_root, find_root_fallible, find_root_with, RootOptions};
pub use special::{
    chisq_cdf, chisq_pdf, chisq_quantile, chisq_sf, gamma_cdf, gamma_pdf, gamma_quantile, ln_gamma,
};
pub use stirling::{stirling1_unsigned, Stirling1Table};

use crate::error::Result;

/// Where a density attains its maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    Interior(f64),
    /// Maximum at (or unbounded toward) the lower end of the support.
    LowerBoundary,
}

/// A continuous univariate law with pdf, cdf and quantile.
pub trait UnivariateDensity: Send + Sync {
    /// Closed support `(lo, hi)`; `hi` may be infinite.
    fn support(&self) -> (f64, f64);
    fn pdf(&self, x: f64) -> Result<f64>;
    fn ln_pdf(&self, x: f64) -> Result<f64> {
        Ok(self.pdf(x)?.ln())
    }
    fn cdf(&self, x: f64) -> Result<f64>;
    fn quantile(&self, p: f64) -> Result<f64>;
    fn mode(&self) -> Mode;
}
