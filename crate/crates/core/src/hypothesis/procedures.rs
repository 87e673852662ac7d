use crate::error::{Error, Result};
use crate::hypothesis::functions::{
    beta_glr_lambda, beta_glr_pivot, cstar_closed_form, cstar_series_size,
    exact_power_chisq_quantile, ln_power_exp, published_critical, simulated_cstar,
    simulated_power_chisq_quantile,
};
use crate::hypothesis::{
    Critical, CriticalProvenance, CriticalSource, Direction, TestInputs, TestProcedure, TestTag,
    Verdict,
};
use crate::intervals::{chi_q, Knowledge, Parameter};
use crate::record::RecordSample;
use crate::simulation::{EmpiricalSummary, SimConfig};

fn simulated(s: &EmpiricalSummary, what: &str) -> CriticalProvenance {
    CriticalProvenance {
        source: what.to_string(),
        seed: Some(s.seed),
        reps: Some(s.reps_used),
        std_error: Some(s.std_error),
    }
}

fn one_sided(d: Direction) -> Direction {
    match d {
        Direction::Less => Direction::Less,
        _ => Direction::Greater,
    }
}

/// UMP one-sided test on `β` with `α` known, rejecting on `R_m`.
pub struct UmpBeta(pub Direction);

impl TestProcedure for UmpBeta {
    fn name(&self) -> &'static str {
        match one_sided(self.0) {
            Direction::Less => "ump-beta-less",
            _ => "ump-beta-greater",
        }
    }
    fn tag(&self) -> TestTag {
        match one_sided(self.0) {
            Direction::Less => TestTag::UMP_BETA_LE,
            _ => TestTag::UMP_BETA_GE,
        }
    }
    fn parameter(&self) -> Parameter {
        Parameter::Beta
    }
    fn knowledge(&self) -> Knowledge {
        Knowledge::AlphaKnown
    }
    fn direction(&self) -> Direction {
        one_sided(self.0)
    }
    fn min_m(&self) -> usize {
        1
    }
    fn description(&self) -> &'static str {
        "UMP one-sided test for beta, alpha known"
    }
    fn evaluate(&self, s: &RecordSample, inputs: &TestInputs) -> Result<Verdict> {
        let alpha = inputs.alpha(self.name())?;
        let (beta0, g) = (inputs.null_value, inputs.gamma);
        let v = 2.0 * s.m() as f64;
        let threshold = |x: f64| beta0 * (-(-(-x / 2.0).exp_m1()).ln() / alpha).exp();
        let r = s.r_m();
        Ok(match self.direction() {
            Direction::Less => {
                let c = threshold(chi_q(1.0 - g, v)?);
                Verdict {
                    statistic: r,
                    critical: Critical::Single(c),
                    region: format!("reject if R_m <= {c}"),
                    reject: r <= c,
                    provenance: CriticalProvenance::analytic("chi-square quantile"),
                    diagnostics: vec![],
                }
            }
            _ => {
                let c = threshold(chi_q(g, v)?);
                Verdict {
                    statistic: r,
                    critical: Critical::Single(c),
                    region: format!("reject if R_m >= {c}"),
                    reject: r >= c,
                    provenance: CriticalProvenance::analytic("chi-square quantile"),
                    diagnostics: vec![],
                }
            }
        })
    }
}

/// Likelihood-ratio test of `β = β₀` with `α` known; `Λ = (β₀/R_m)^{αT_m}`
/// and `−ln Λ` is standard exponential under the null.
pub struct GlrBetaAlphaKnown;

impl TestProcedure for GlrBetaAlphaKnown {
    fn name(&self) -> &'static str {
        "glr-beta-alpha-known"
    }
    fn tag(&self) -> TestTag {
        TestTag::GLR_BETA_AK
    }
    fn parameter(&self) -> Parameter {
        Parameter::Beta
    }
    fn knowledge(&self) -> Knowledge {
        Knowledge::AlphaKnown
    }
    fn direction(&self) -> Direction {
        Direction::TwoSided
    }
    fn min_m(&self) -> usize {
        1
    }
    fn description(&self) -> &'static str {
        "likelihood-ratio test for beta, alpha known"
    }
    fn evaluate(&self, s: &RecordSample, inputs: &TestInputs) -> Result<Verdict> {
        let alpha = inputs.alpha(self.name())?;
        let beta0 = inputs.null_value;
        let mut diagnostics = vec![];
        let lambda = if s.r_m() < beta0 {
            diagnostics.push("r_m < beta0: the null likelihood is zero".to_string());
            0.0
        } else {
            (alpha * s.t_m() as f64 * (beta0.ln() - s.r_m().ln())).exp()
        };
        Ok(Verdict {
            statistic: lambda,
            critical: Critical::Single(inputs.gamma),
            region: format!("reject if Lambda < {} or r_m < beta0", inputs.gamma),
            reject: lambda < inputs.gamma,
            provenance: CriticalProvenance::analytic("exact: -ln(Lambda) is standard exponential"),
            diagnostics,
        })
    }
}

/// UMP one-sided test on `α` with `β` known, from `2α₀T1* ~ χ²_{2m}`.
pub struct UmpAlpha(pub Direction);

fn chi_one_sided(z: f64, v: f64, direction: Direction, g: f64, what: &str) -> Result<Verdict> {
    Ok(match direction {
        // Large α means small spacings.
        Direction::Less => {
            let c = chi_q(1.0 - g, v)?;
            Verdict {
                statistic: z,
                critical: Critical::Single(c),
                region: format!("reject if {what} >= {c}"),
                reject: z >= c,
                provenance: CriticalProvenance::analytic("chi-square quantile"),
                diagnostics: vec![],
            }
        }
        _ => {
            let c = chi_q(g, v)?;
            Verdict {
                statistic: z,
                critical: Critical::Single(c),
                region: format!("reject if {what} <= {c}"),
                reject: z <= c,
                provenance: CriticalProvenance::analytic("chi-square quantile"),
                diagnostics: vec![],
            }
        }
    })
}

impl TestProcedure for UmpAlpha {
    fn name(&self) -> &'static str {
        match one_sided(self.0) {
            Direction::Less => "ump-alpha-less",
            _ => "ump-alpha-greater",
        }
    }
    fn tag(&self) -> TestTag {
        match one_sided(self.0) {
            Direction::Less => TestTag::UMP_ALPHA_BK_LE,
            _ => TestTag::UMP_ALPHA_BK_GE,
        }
    }
    fn parameter(&self) -> Parameter {
        Parameter::Alpha
    }
    fn knowledge(&self) -> Knowledge {
        Knowledge::BetaKnown
    }
    fn direction(&self) -> Direction {
        one_sided(self.0)
    }
    fn min_m(&self) -> usize {
        1
    }
    fn description(&self) -> &'static str {
        "UMP one-sided test for alpha, beta known"
    }
    fn evaluate(&self, s: &RecordSample, inputs: &TestInputs) -> Result<Verdict> {
        let t1 = s.t_star_at(inputs.beta(self.name())?)?;
        let z = 2.0 * inputs.null_value * t1;
        chi_one_sided(
            z,
            2.0 * s.m() as f64,
            self.direction(),
            inputs.gamma,
            "2*alpha0*T1*",
        )
    }
}

/// Critical value `c` for `Z^p e^{−Z/2} < c`, `Z ~ χ²_df`.
fn power_chisq_critical(
    inputs: &TestInputs,
    power: f64,
    df: f64,
    table_column: usize,
) -> Result<(f64, CriticalProvenance)> {
    let g = inputs.gamma;
    let table = || {
        published_critical(table_column, g).map(|c| {
            (
                c,
                CriticalProvenance::analytic(&format!(
                    "published table, column m = {table_column}"
                )),
            )
        })
    };
    let simulate = |cfg: &SimConfig| -> Result<(f64, CriticalProvenance)> {
        let s = simulated_power_chisq_quantile(power, df, g, cfg)?;
        Ok((s.point, simulated(&s, "simulated")))
    };
    let unavailable = |why: &str| {
        Error::CriticalValueUnavailable(format!(
            "gamma = {g}, table column m = {table_column}: {why}"
        ))
    };
    match inputs.critical {
        CriticalSource::Auto => match (table(), inputs.simulation.as_ref()) {
            (Some(t), _) => Ok(t),
            (None, Some(cfg)) => simulate(cfg),
            (None, None) => Err(unavailable(
                "outside the published table and simulation is disabled",
            )),
        },
        CriticalSource::PublishedTable => {
            table().ok_or_else(|| unavailable("outside the published table"))
        }
        CriticalSource::Exact => Ok((
            exact_power_chisq_quantile(power, df, g)?,
            CriticalProvenance::analytic("exact"),
        )),
        CriticalSource::Simulate => match inputs.simulation.as_ref() {
            Some(cfg) => simulate(cfg),
            None => Err(unavailable(
                "simulation requested without a simulation config",
            )),
        },
        CriticalSource::Provided(c) if c > 0.0 && c.is_finite() => {
            Ok((c, CriticalProvenance::analytic("provided")))
        }
        CriticalSource::Provided(c) => {
            Err(unavailable(&format!("provided value {c} is not positive")))
        }
    }
}

fn glr_alpha_verdict(
    z: f64,
    power: f64,
    c: f64,
    provenance: CriticalProvenance,
    what: &str,
) -> Verdict {
    let ln_stat = ln_power_exp(z, power);
    Verdict {
        statistic: ln_stat.exp(),
        critical: Critical::Single(c),
        region: format!("reject if {what}^{power} exp(-{what}/2) < {c}"),
        reject: ln_stat < c.ln(),
        provenance,
        diagnostics: vec![],
    }
}

/// Likelihood-ratio test of `α = α₀` with `β` known, on `Z₁ = 2α₀T1*`.
pub struct GlrAlphaBetaKnown;

impl TestProcedure for GlrAlphaBetaKnown {
    fn name(&self) -> &'static str {
        "glr-alpha-beta-known"
    }
    fn tag(&self) -> TestTag {
        TestTag::GLR_ALPHA_BK
    }
    fn parameter(&self) -> Parameter {
        Parameter::Alpha
    }
    fn knowledge(&self) -> Knowledge {
        Knowledge::BetaKnown
    }
    fn direction(&self) -> Direction {
        Direction::TwoSided
    }
    fn min_m(&self) -> usize {
        1
    }
    fn description(&self) -> &'static str {
        "likelihood-ratio test for alpha, beta known"
    }
    fn evaluate(&self, s: &RecordSample, inputs: &TestInputs) -> Result<Verdict> {
        let t1 = s.t_star_at(inputs.beta(self.name())?)?;
        let m = s.m();
        let z = 2.0 * inputs.null_value * t1;
        let (c, prov) = power_chisq_critical(inputs, m as f64, 2.0 * m as f64, m)?;
        Ok(glr_alpha_verdict(z, m as f64, c, prov, "Z1"))
    }
}

/// UMP invariant one-sided test on `α` with `β` unknown, from `2α₀T2* ~ χ²_{2m−2}`.
pub struct UmpInvariantAlpha(pub Direction);

impl TestProcedure for UmpInvariantAlpha {
    fn name(&self) -> &'static str {
        match one_sided(self.0) {
            Direction::Less => "umpi-alpha-less",
            _ => "umpi-alpha-greater",
        }
    }
    fn tag(&self) -> TestTag {
        match one_sided(self.0) {
            Direction::Less => TestTag::UMPI_ALPHA_LE,
            _ => TestTag::UMPI_ALPHA_GE,
        }
    }
    fn parameter(&self) -> Parameter {
        Parameter::Alpha
    }
    fn knowledge(&self) -> Knowledge {
        Knowledge::BothUnknown
    }
    fn direction(&self) -> Direction {
        one_sided(self.0)
    }
    fn min_m(&self) -> usize {
        2
    }
    fn description(&self) -> &'static str {
        "UMP scale-invariant one-sided test for alpha, beta unknown"
    }
    fn evaluate(&self, s: &RecordSample, inputs: &TestInputs) -> Result<Verdict> {
        let z = 2.0 * inputs.null_value * s.t2_star();
        chi_one_sided(
            z,
            2.0 * (s.m() - 1) as f64,
            self.direction(),
            inputs.gamma,
            "2*alpha0*T2*",
        )
    }
}

/// Likelihood-ratio test of `α = α₀` with `β` unknown, on `Z₂ = 2α₀T2*`.
///
/// The statistic is `Z₂^m e^{−Z₂/2}` with `Z₂ ~ χ²_{2m−2}`. The published
/// table is read at column `m − 1`, matching its use in the literature; that
/// column holds quantiles for the power `m − 1`, so its size is close to but
/// not exactly `γ`. The exact and simulated sources use the power `m`.
pub struct GlrAlphaBothUnknown;

impl TestProcedure for GlrAlphaBothUnknown {
    fn name(&self) -> &'static str {
        "glr-alpha"
    }
    fn tag(&self) -> TestTag {
        TestTag::GLR_ALPHA_2U
    }
    fn parameter(&self) -> Parameter {
        Parameter::Alpha
    }
    fn knowledge(&self) -> Knowledge {
        Knowledge::BothUnknown
    }
    fn direction(&self) -> Direction {
        Direction::TwoSided
    }
    fn min_m(&self) -> usize {
        2
    }
    fn description(&self) -> &'static str {
        "likelihood-ratio test for alpha, beta unknown"
    }
    fn evaluate(&self, s: &RecordSample, inputs: &TestInputs) -> Result<Verdict> {
        let m = s.m();
        let z = 2.0 * inputs.null_value * s.t2_star();
        let (c, prov) = power_chisq_critical(inputs, m as f64, 2.0 * (m - 1) as f64, m - 1)?;
        let from_table = prov.source.starts_with("published");
        let mut v = glr_alpha_verdict(z, m as f64, c, prov, "Z2");
        if from_table {
            v.diagnostics.push(format!(
                "published table read at column m - 1 = {}, whose quantiles are for the power m - 1; the exact size differs slightly from gamma",
                m - 1
            ));
        }
        Ok(v)
    }
}

/// Likelihood-ratio test of `β = β₀` with `α` unknown.
///
/// Rejects when `S' = T_m(ln R_m − ln β₀)·α̂_{M,0} > C*` or `r_m < β₀`.
pub struct GlrBetaBothUnknown;

/// Terms of the conditional-size series reported as a cross-check.
pub const CSTAR_SERIES_TERMS: u64 = 200;

impl TestProcedure for GlrBetaBothUnknown {
    fn name(&self) -> &'static str {
        "glr-beta"
    }
    fn tag(&self) -> TestTag {
        TestTag::GLR_BETA_2U
    }
    fn parameter(&self) -> Parameter {
        Parameter::Beta
    }
    fn knowledge(&self) -> Knowledge {
        Knowledge::BothUnknown
    }
    fn direction(&self) -> Direction {
        Direction::TwoSided
    }
    fn min_m(&self) -> usize {
        2
    }
    fn description(&self) -> &'static str {
        "likelihood-ratio test for beta, alpha unknown"
    }
    fn evaluate(&self, s: &RecordSample, inputs: &TestInputs) -> Result<Verdict> {
        let (m, g, beta0) = (s.m(), inputs.gamma, inputs.null_value);
        let unavailable =
            |why: &str| Error::CstarUnavailable(format!("m = {m}, gamma = {g}: {why}"));
        let simulate = |cfg: &SimConfig| -> Result<(f64, CriticalProvenance)> {
            let c = simulated_cstar(m, g, cfg)?;
            Ok((c.point, simulated(&c, "simulated")))
        };
        let (cstar, provenance) = match inputs.critical {
            CriticalSource::Auto | CriticalSource::Simulate => match inputs.simulation.as_ref() {
                Some(cfg) => simulate(cfg)?,
                None => return Err(unavailable("simulation is disabled")),
            },
            CriticalSource::Exact => (
                cstar_closed_form(m, g)?,
                CriticalProvenance::analytic("exact"),
            ),
            CriticalSource::PublishedTable => return Err(unavailable("no published table of C*")),
            CriticalSource::Provided(c) => (c, CriticalProvenance::analytic("provided")),
        };
        let statistic = beta_glr_pivot(s, beta0)?;
        let (direct, via) = beta_glr_lambda(s, beta0)?;
        let series = cstar_series_size(m, cstar, CSTAR_SERIES_TERMS)?;
        let mut diagnostics = vec![
            format!("Lambda = {direct} directly, {via} through the ratio identity"),
            format!(
                "series cross-check: first {} terms give size {} over T_m mass {}",
                series.terms, series.size, series.pmf_mass
            ),
        ];
        let below = s.r_m() < beta0;
        if below {
            diagnostics.push("r_m < beta0: the null likelihood is zero".to_string());
        }
        Ok(Verdict {
            statistic,
            critical: Critical::Single(cstar),
            region: format!("reject if T_m (ln r_m - ln beta0) m / T0* > {cstar} or r_m < beta0"),
            reject: below || statistic > cstar,
            provenance,
            diagnostics,
        })
    }
}
