use crate::error::{check_gamma, Error, Result};
use crate::hypothesis::{TestInputs, TestProcedure};
use crate::intervals::{IntervalInputs, IntervalMethod, Parameter};
use crate::record::ParetoParams;
use crate::simulation::mc::run_replicates;
use crate::simulation::records::gen_records;
use crate::simulation::{EmpiricalSummary, Parent, SimConfig};

fn proportion(hits: u64, n: u64, cfg: &SimConfig) -> EmpiricalSummary {
    let p = hits as f64 / n as f64;
    let mut s = EmpiricalSummary::new(p, (p * (1.0 - p) / n as f64).sqrt(), cfg);
    s.reps_used = n;
    s
}

fn truth_of(parameter: Parameter, p: ParetoParams) -> f64 {
    match parameter {
        Parameter::Alpha => p.alpha,
        Parameter::Beta => p.beta,
    }
}

/// Fraction of simulated samples whose interval covers the true parameter.
///
/// The method receives exactly the parameter values its knowledge state
/// allows, taken from `truth`.
pub fn estimate_coverage(
    method: &dyn IntervalMethod,
    truth: ParetoParams,
    m: usize,
    gamma: f64,
    cfg: &SimConfig,
) -> Result<EmpiricalSummary> {
    check_gamma(gamma)?;
    let parent = Parent::Pareto(truth);
    let inputs = IntervalInputs::for_truth(method.knowledge(), gamma, truth);
    let target = truth_of(method.parameter(), truth);
    let hits = run_replicates(cfg, |_, rng| {
        let s = gen_records(&parent, m, rng)?;
        Ok(method.estimate(&s, &inputs)?.contains(target) as u64)
    })?;
    Ok(proportion(hits.iter().sum(), cfg.reps, cfg))
}

/// Coverage among the replicates with `T_m = j`, by rejection.
///
/// `reps_used` in the result counts the retained replicates only.
pub fn estimate_coverage_given_tm(
    method: &dyn IntervalMethod,
    truth: ParetoParams,
    m: usize,
    j: u64,
    gamma: f64,
    cfg: &SimConfig,
) -> Result<EmpiricalSummary> {
    check_gamma(gamma)?;
    let parent = Parent::Pareto(truth);
    let inputs = IntervalInputs::for_truth(method.knowledge(), gamma, truth);
    let target = truth_of(method.parameter(), truth);
    let outcomes = run_replicates(cfg, |_, rng| {
        let s = gen_records(&parent, m, rng)?;
        if s.t_m() != j {
            return Ok(None);
        }
        Ok(Some(method.estimate(&s, &inputs)?.contains(target)))
    })?;
    let kept: Vec<bool> = outcomes.into_iter().flatten().collect();
    if kept.is_empty() {
        return Err(Error::DegenerateSample(format!(
            "no replicate had T_m = {j}"
        )));
    }
    let hits = kept.iter().filter(|&&c| c).count() as u64;
    Ok(proportion(hits, kept.len() as u64, cfg))
}

/// Fraction of simulated samples, drawn under `truth`, on which the test rejects.
pub fn estimate_rejection_rate(
    procedure: &dyn TestProcedure,
    truth: ParetoParams,
    m: usize,
    inputs: &TestInputs,
    cfg: &SimConfig,
) -> Result<EmpiricalSummary> {
    let parent = Parent::Pareto(truth);
    let rejections = run_replicates(cfg, |_, rng| {
        let s = gen_records(&parent, m, rng)?;
        Ok(procedure.run(&s, inputs)?.rejected() as u64)
    })?;
    Ok(proportion(rejections.iter().sum(), cfg.reps, cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypothesis::{CriticalSource, GlrAlphaBetaKnown};
    use crate::intervals::{AlphaEquiTailed, BetaConditional};

    #[test]
    fn single_replicate_is_zero_or_one() {
        let cfg = SimConfig::standard(1, 1, 1).unwrap();
        let c = estimate_coverage(
            &AlphaEquiTailed,
            ParetoParams {
                beta: 1.0,
                alpha: 2.0,
            },
            3,
            0.05,
            &cfg,
        )
        .unwrap();
        assert!(c.point == 0.0 || c.point == 1.0);
    }

    #[test]
    fn half_level_covers_half() {
        let cfg = SimConfig::standard(8, 20_000, 2).unwrap();
        let c = estimate_coverage(
            &AlphaEquiTailed,
            ParetoParams {
                beta: 1.0,
                alpha: 2.0,
            },
            4,
            0.5,
            &cfg,
        )
        .unwrap();
        assert!(
            (c.point - 0.5).abs() < 4.0 * (0.25f64 / 20_000.0).sqrt(),
            "{}",
            c.point
        );
    }

    #[test]
    fn conditional_coverage_holds_given_tm() {
        let cfg = SimConfig::standard(3, 40_000, 2).unwrap();
        let truth = ParetoParams {
            beta: 2.0,
            alpha: 3.0,
        };
        let c = estimate_coverage_given_tm(&BetaConditional, truth, 3, 3, 0.1, &cfg).unwrap();
        let sd = (0.9f64 * 0.1 / c.reps_used as f64).sqrt();
        assert!(
            (c.point - 0.9).abs() < 4.0 * sd,
            "{} over {}",
            c.point,
            c.reps_used
        );
    }

    #[test]
    fn exact_glr_has_its_size() {
        let cfg = SimConfig::standard(12, 20_000, 2).unwrap();
        let truth = ParetoParams {
            beta: 1.0,
            alpha: 1.5,
        };
        let inputs = TestInputs::new(0.1, 1.5)
            .with_beta(1.0)
            .with_critical(CriticalSource::Exact);
        let r = estimate_rejection_rate(&GlrAlphaBetaKnown, truth, 3, &inputs, &cfg).unwrap();
        assert!(
            (r.point - 0.1).abs() < 4.0 * (0.09f64 / 20_000.0).sqrt(),
            "{}",
            r.point
        );
    }
}
