use serde::{Deserialize, Serialize};

use crate::densities::fw::{fw_cdf, fw_pdf, fw_quantile};
use crate::densities::g_record::{g_cdf, g_ln_pdf, g_quantile};
use crate::densities::pareto::{pareto_cdf, pareto_pdf, pareto_quantile};
use crate::error::{check_positive, Error, Result};
use crate::numerics::quadrature::QuadratureSpec;
use crate::numerics::special::{
    chisq_cdf, chisq_ln_pdf, chisq_quantile, gamma_cdf, gamma_pdf, gamma_quantile,
};
use crate::numerics::{Mode, UnivariateDensity};
use crate::record::ParetoParams;

/// A parametrized univariate law behind one pdf/cdf/quantile interface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum DistHandle {
    Pareto(ParetoParams),
    GRecord {
        m: usize,
    },
    FW {
        m: usize,
        nu: usize,
        spec: QuadratureSpec,
    },
    ChiSquare {
        v: f64,
    },
    Gamma {
        shape: f64,
        scale: f64,
    },
}

impl DistHandle {
    pub fn pareto(beta: f64, alpha: f64) -> Result<Self> {
        Ok(Self::Pareto(ParetoParams::new(beta, alpha)?))
    }

    pub fn g_record(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Domain("g_record needs m >= 1".into()));
        }
        Ok(Self::GRecord { m })
    }

    pub fn f_w(m: usize, nu: usize, spec: QuadratureSpec) -> Result<Self> {
        if m < 2 || nu < 1 {
            return Err(Error::Domain(format!(
                "f_W needs m >= 2 and nu >= 1, got m={m}, nu={nu}"
            )));
        }
        Ok(Self::FW { m, nu, spec })
    }

    pub fn chi_square(v: f64) -> Result<Self> {
        check_positive("degrees of freedom", v)?;
        Ok(Self::ChiSquare { v })
    }

    pub fn gamma(shape: f64, scale: f64) -> Result<Self> {
        check_positive("shape", shape)?;
        check_positive("scale", scale)?;
        Ok(Self::Gamma { shape, scale })
    }
}

impl UnivariateDensity for DistHandle {
    fn support(&self) -> (f64, f64) {
        match self {
            Self::Pareto(p) => (p.beta, f64::INFINITY),
            _ => (0.0, f64::INFINITY),
        }
    }

    fn pdf(&self, x: f64) -> Result<f64> {
        let (lo, _) = self.support();
        if x <= lo && !matches!(self, Self::Pareto(_)) {
            return Ok(0.0);
        }
        match *self {
            Self::Pareto(p) => Ok(pareto_pdf(x, p)),
            Self::GRecord { m } => Ok(g_ln_pdf(x, m)?.exp()),
            Self::FW { m, nu, spec } => fw_pdf(x, m, nu, &spec),
            Self::ChiSquare { v } => Ok(chisq_ln_pdf(x, v).exp()),
            Self::Gamma { shape, scale } => gamma_pdf(x, shape, scale),
        }
    }

    fn ln_pdf(&self, x: f64) -> Result<f64> {
        match *self {
            Self::GRecord { m } if x > 0.0 => g_ln_pdf(x, m),
            Self::ChiSquare { v } if x > 0.0 => Ok(chisq_ln_pdf(x, v)),
            _ => Ok(self.pdf(x)?.ln()),
        }
    }

    fn cdf(&self, x: f64) -> Result<f64> {
        match *self {
            Self::Pareto(p) => Ok(pareto_cdf(x, p)),
            Self::GRecord { m } => {
                if x <= 0.0 {
                    Ok(0.0)
                } else {
                    g_cdf(x, m)
                }
            }
            Self::FW { m, nu, spec } => fw_cdf(x, m, nu, &spec),
            Self::ChiSquare { v } => chisq_cdf(x, v),
            Self::Gamma { shape, scale } => gamma_cdf(x.max(0.0), shape, scale),
        }
    }

    fn quantile(&self, p: f64) -> Result<f64> {
        match *self {
            Self::Pareto(params) => pareto_quantile(p, params),
            Self::GRecord { m } => g_quantile(p, m),
            Self::FW { m, nu, spec } => fw_quantile(p, m, nu, &spec),
            Self::ChiSquare { v } => chisq_quantile(p, v),
            Self::Gamma { shape, scale } => gamma_quantile(p, shape, scale),
        }
    }

    fn mode(&self) -> Mode {
        match *self {
            Self::ChiSquare { v } if v > 2.0 => Mode::Interior(v - 2.0),
            Self::Gamma { shape, scale } if shape > 1.0 => Mode::Interior((shape - 1.0) * scale),
            // Pareto, g and f_W all decrease from the left end of their support.
            _ => Mode::LowerBoundary,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_inverts_cdf_for_every_family() {
        let handles = [
            DistHandle::pareto(2.0, 3.0).unwrap(),
            DistHandle::g_record(4).unwrap(),
            DistHandle::f_w(3, 4, QuadratureSpec::default()).unwrap(),
            DistHandle::chi_square(7.0).unwrap(),
            DistHandle::gamma(2.5, 0.5).unwrap(),
        ];
        for h in handles {
            for p in [0.05, 0.5, 0.95] {
                let x = h.quantile(p).unwrap();
                assert!((h.cdf(x).unwrap() - p).abs() < 1e-8, "{h:?} p={p}");
                assert!(h.pdf(x).unwrap() > 0.0);
            }
        }
    }

    #[test]
    fn constructors_validate() {
        assert!(DistHandle::g_record(0).is_err());
        assert!(DistHandle::f_w(1, 2, QuadratureSpec::default()).is_err());
        assert!(DistHandle::chi_square(0.0).is_err());
        assert!(DistHandle::pareto(-1.0, 1.0).is_err());
    }

    #[test]
    fn modes() {
        assert_eq!(
            DistHandle::chi_square(6.0).unwrap().mode(),
            Mode::Interior(4.0)
        );
        assert_eq!(
            DistHandle::chi_square(2.0).unwrap().mode(),
            Mode::LowerBoundary
        );
        assert_eq!(DistHandle::g_record(3).unwrap().mode(), Mode::LowerBoundary);
    }

    #[test]
    fn serde_round_trip() {
        let h = DistHandle::f_w(3, 4, QuadratureSpec::default()).unwrap();
        let s = serde_json::to_string(&h).unwrap();
        assert_eq!(serde_json::from_str::<DistHandle>(&s).unwrap(), h);
    }
}
