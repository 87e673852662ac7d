//! Shortest interval of given mass under a unimodal density.
//!
//! The interval `(a, b)` is characterized by `f(a) = f(b)` and
//! `F(b) − F(a) = mass`. For each `a` below the mode the partner `b(a)` is the
//! point above the mode with the same log-density; the coverage condition is
//! then a one-dimensional root problem in `a`.
//!
//! The general form separates the two roles: endpoints share the value of a
//! "level" density while the coverage is measured under a different law. This
//! is the shape of unbiased acceptance regions, whose endpoints share the
//! value of a tilted density.

use crate::error::{Error, Result};
use crate::numerics::roots::{find_root_fallible, RootOptions};
use crate::numerics::{Mode, UnivariateDensity};

const MAX_EXPANSIONS: usize = 2000;

/// Solves the equal-density/coverage system, returning `(a, b)` with
/// `a < mode < b`. `hint` optionally seeds the bracket for `a`.
pub fn solve_equal_density_system(
    density: &dyn UnivariateDensity,
    mass: f64,
    hint: Option<(f64, f64)>,
) -> Result<(f64, f64)> {
    solve_equal_level_system(density, density, mass, hint)
}

/// Finds `(a, b)` with `level.pdf(a) = level.pdf(b)` and
/// `law.cdf(b) − law.cdf(a) = mass`.
pub fn solve_equal_level_system(
    level: &dyn UnivariateDensity,
    law: &dyn UnivariateDensity,
    mass: f64,
    hint: Option<(f64, f64)>,
) -> Result<(f64, f64)> {
    if !(mass > 0.0 && mass < 1.0) {
        return Err(Error::NoSolution(format!(
            "mass must lie in (0, 1), got {mass}"
        )));
    }
    let mode = match level.mode() {
        Mode::Interior(x) => x,
        Mode::LowerBoundary => {
            return Err(Error::NotUnimodal(
                "the density is maximal at the lower end of its support".into(),
            ))
        }
    };
    let (lower, _) = level.support();

    let coverage = |a: f64| -> Result<f64> {
        let b = partner(level, mode, a)?;
        Ok(law.cdf(b)? - law.cdf(a)? - mass)
    };

    let mut lo = match hint {
        Some((h, _)) if h > lower && h < mode => h,
        _ => lower + 0.5 * (mode - lower),
    };
    let mut expansions = 0;
    while coverage(lo)? <= 0.0 {
        lo = lower + 0.5 * (lo - lower);
        expansions += 1;
        if expansions > MAX_EXPANSIONS || lo <= lower {
            return Err(Error::NoSolution(format!(
                "no interval of mass {mass} found below the mode {mode}"
            )));
        }
    }
    let a = find_root_fallible(coverage, (lo, mode), RootOptions::precise())?;
    let b = partner(level, mode, a)?;
    Ok((a, b))
}

/// The point above the mode sharing the log-density of `a`.
fn partner(density: &dyn UnivariateDensity, mode: f64, a: f64) -> Result<f64> {
    if a >= mode {
        return Ok(mode);
    }
    let level = density.ln_pdf(a)?;
    let (_, upper) = density.support();
    let gap = |b: f64| -> Result<f64> { Ok(density.ln_pdf(b)? - level) };

    let mut step = (mode - a).max(mode.abs()).max(f64::MIN_POSITIVE);
    let mut hi = mode + step;
    let mut expansions = 0;
    loop {
        if hi >= upper {
            hi = upper;
        }
        if gap(hi)? <= 0.0 {
            break;
        }
        if hi == upper || expansions > MAX_EXPANSIONS {
            return Err(Error::NoSolution(format!(
                "density never falls back to its value at {a} above the mode"
            )));
        }
        step *= 2.0;
        hi = mode + step;
        expansions += 1;
    }
    find_root_fallible(gap, (mode, hi), RootOptions::precise())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::special::{chisq_cdf, chisq_ln_pdf, chisq_pdf, chisq_quantile};

    struct Chi(f64);

    impl UnivariateDensity for Chi {
        fn support(&self) -> (f64, f64) {
            (0.0, f64::INFINITY)
        }
        fn pdf(&self, x: f64) -> Result<f64> {
            chisq_pdf(x, self.0)
        }
        fn ln_pdf(&self, x: f64) -> Result<f64> {
            Ok(chisq_ln_pdf(x, self.0))
        }
        fn cdf(&self, x: f64) -> Result<f64> {
            chisq_cdf(x, self.0)
        }
        fn quantile(&self, p: f64) -> Result<f64> {
            chisq_quantile(p, self.0)
        }
        fn mode(&self) -> Mode {
            if self.0 > 2.0 {
                Mode::Interior(self.0 - 2.0)
            } else {
                Mode::LowerBoundary
            }
        }
    }

    #[test]
    fn chi_square_four_df() {
        let (a, b) = solve_equal_density_system(&Chi(4.0), 0.95, None).unwrap();
        assert!((a - 0.084727).abs() < 1e-5);
        assert!((b - 9.530336).abs() < 1e-5);
        let (fa, fb) = (chisq_pdf(a, 4.0).unwrap(), chisq_pdf(b, 4.0).unwrap());
        assert!((fa / fb - 1.0).abs() < 1e-9);
        let mass = chisq_cdf(b, 4.0).unwrap() - chisq_cdf(a, 4.0).unwrap();
        assert!((mass - 0.95).abs() < 1e-9);
    }

    #[test]
    fn shorter_than_equal_tails() {
        for v in [3.0, 6.0, 14.0, 30.0] {
            let (a, b) = solve_equal_density_system(&Chi(v), 0.9, None).unwrap();
            let et = chisq_quantile(0.95, v).unwrap() - chisq_quantile(0.05, v).unwrap();
            assert!(b - a < et);
        }
    }

    // Endpoints of equal x^m e^{-x/2} carrying χ²_{2m} mass 1 − γ.
    #[test]
    fn tilted_level() {
        for m in [1.0, 3.0, 6.0] {
            let (a, b) =
                solve_equal_level_system(&Chi(2.0 * m + 2.0), &Chi(2.0 * m), 0.95, None).unwrap();
            let h = |x: f64| m * x.ln() - x / 2.0;
            assert!((h(a) - h(b)).abs() < 1e-9);
            let mass = chisq_cdf(b, 2.0 * m).unwrap() - chisq_cdf(a, 2.0 * m).unwrap();
            assert!((mass - 0.95).abs() < 1e-9);
        }
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(
            solve_equal_density_system(&Chi(2.0), 0.95, None),
            Err(Error::NotUnimodal(_))
        ));
        assert!(matches!(
            solve_equal_density_system(&Chi(4.0), 1.0, None),
            Err(Error::NoSolution(_))
        ));
    }

    #[test]
    fn hint_does_not_change_solution() {
        let plain = solve_equal_density_system(&Chi(6.0), 0.9, None).unwrap();
        let hinted = solve_equal_density_system(&Chi(6.0), 0.9, Some((0.5, 11.0))).unwrap();
        assert!((plain.0 - hinted.0).abs() < 1e-10);
        assert!((plain.1 - hinted.1).abs() < 1e-9);
    }
}
