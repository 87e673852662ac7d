//! One function per subcommand, each producing a [`Report`].

use record_pareto::checks::cached_checks;
use record_pareto::densities::{fw_quantile, tm_pmf, DistHandle};
use record_pareto::estimation::{
    bias_alpha_mle, efficiency_mle_vs_unbiased, fit_mle, mse_alpha_mle, mse_alpha_scaled,
    mse_alpha_unbiased,
};
use record_pareto::hypothesis::{
    cstar_closed_form, exact_power_chisq_quantile, published_critical, CriticalSource, Direction,
    TestInputs, TestRegistry, PUBLISHED_GAMMAS,
};
use record_pareto::intervals::{IntervalInputs, IntervalRegistry, Knowledge, Parameter};
use record_pareto::numerics::{solve_equal_density_system, QuadratureSpec};
use record_pareto::record::{derive_stats, ParetoParams, RecordSample, RecordTarget};
use record_pareto::simulation::{
    estimate_coverage, estimate_rejection_rate, simulate_cstar, simulate_estimator_accuracy,
    simulate_quantile_xm_exp, simulate_tm_histogram, simulate_w_quantiles, validate_pivot, Parent,
    Pivot, SimConfig, RNG_ALGORITHM,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::*;
use crate::error::{CliError, CliResult};
use crate::input::{load, InputKind};
use crate::report::{Provenance, Report, Table, Tolerances};

pub const SEED_ENV: &str = "RECORD_PARETO_SEED";
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_REPS: u64 = 100_000;

/// Gammas of the minimum-width chi-square table.
const TABLE1_GAMMAS: [f64; 3] = [0.10, 0.05, 0.01];
const TABLE1_M: std::ops::RangeInclusive<usize> = 2..=7;
const TABLE2_PROBS: [f64; 6] = [0.01, 0.025, 0.05, 0.95, 0.975, 0.99];
const TABLE2_M: std::ops::RangeInclusive<usize> = 2..=8;
const TABLE3_M: std::ops::RangeInclusive<usize> = 1..=5;
const RECORD_TIME_JMAX: u64 = 20;

/// Simulation settings actually used, for provenance.
struct SimMeta {
    seed: u64,
    source: &'static str,
    reps: u64,
    workers: usize,
}

#[derive(Default)]
struct Ctx {
    warnings: Vec<String>,
    sim: Option<SimMeta>,
    tables: Vec<String>,
}

fn to_value<T: Serialize>(x: &T) -> CliResult<Value> {
    serde_json::to_value(x).map_err(|e| CliError::Output(e.to_string()))
}

fn sim_config(args: &SimArgs, default_reps: u64) -> CliResult<(SimConfig, SimMeta)> {
    let (seed, source) = match args.seed {
        Some(s) => (s, "flag"),
        None => match std::env::var(SEED_ENV) {
            Ok(v) => (
                v.trim().parse().map_err(|_| {
                    CliError::Usage(format!("{SEED_ENV}='{v}' is not a non-negative integer"))
                })?,
                "environment",
            ),
            Err(_) => (DEFAULT_SEED, "default"),
        },
    };
    let reps = args.reps.unwrap_or(default_reps);
    let cfg = SimConfig::standard(seed, reps, args.workers)?;
    Ok((
        cfg,
        SimMeta {
            seed,
            source,
            reps,
            workers: args.workers,
        },
    ))
}

fn record_target(m: &str) -> CliResult<RecordTarget> {
    if m.eq_ignore_ascii_case("all") {
        return Ok(RecordTarget::All);
    }
    match m.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(RecordTarget::Count(n)),
        _ => Err(CliError::Usage(format!(
            "--m must be a positive integer or 'all', got '{m}'"
        ))),
    }
}

fn load_sample(args: &InputArgs, ctx: &mut Ctx) -> CliResult<(RecordSample, Option<usize>)> {
    let kind = match args.kind {
        Kind::Raw => InputKind::Raw,
        Kind::Records => InputKind::Records,
    };
    let loaded = load(&args.input, kind, record_target(&args.m)?)?;
    ctx.warnings.extend(loaded.warnings);
    Ok((loaded.sample, loaded.sequence_len))
}

fn parameter(p: Param) -> Parameter {
    match p {
        Param::Alpha => Parameter::Alpha,
        Param::Beta => Parameter::Beta,
    }
}

/// What is known follows from the flags; supplying the target parameter itself is refused.
fn knowledge(param: Parameter, known: &KnownArgs) -> CliResult<Knowledge> {
    match param {
        Parameter::Beta if known.beta_known.is_some() => Err(CliError::Unsupported(
            "--beta-known given while beta is the target; nothing to infer".into(),
        )),
        Parameter::Alpha if known.alpha_known.is_some() => Err(CliError::Unsupported(
            "--alpha-known given while alpha is the target; nothing to infer".into(),
        )),
        Parameter::Beta if known.alpha_known.is_some() => Ok(Knowledge::AlphaKnown),
        Parameter::Alpha if known.beta_known.is_some() => Ok(Knowledge::BetaKnown),
        _ => Ok(Knowledge::BothUnknown),
    }
}

fn records_table(s: &RecordSample) -> Table {
    Table {
        columns: vec!["i".into(), "r".into(), "k".into()],
        rows: s
            .records()
            .iter()
            .enumerate()
            .map(|(i, r)| vec![json!(i + 1), json!(r.value), json!(r.count)])
            .collect(),
    }
}

fn records_value(s: &RecordSample) -> Value {
    Value::Array(
        s.records()
            .iter()
            .map(|r| json!({ "r": r.value, "k": r.count }))
            .collect(),
    )
}

fn cmd_extract(args: &InputArgs, ctx: &mut Ctx) -> CliResult<(Value, Option<Table>)> {
    let (s, n) = load_sample(args, ctx)?;
    let results = json!({
        "m": s.m(),
        "t_m": s.t_m(),
        "sequence_length": n,
        "records": records_value(&s),
    });
    Ok((results, Some(records_table(&s))))
}

fn cmd_estimate(args: &InputArgs, ctx: &mut Ctx) -> CliResult<(Value, Option<Table>)> {
    let (s, _) = load_sample(args, ctx)?;
    let est = fit_mle(&s)?;
    if est.alpha_mle.is_none() {
        ctx.warnings
            .push("alpha is not estimable from a single record".into());
    }
    let results = json!({
        "records": records_value(&s),
        "stats": to_value(&derive_stats(&s, None)?)?,
        "estimates": to_value(&est)?,
    });
    Ok((results, None))
}

fn cmd_ci(args: &CiArgs, ctx: &mut Ctx) -> CliResult<(Value, Option<Table>)> {
    let (s, _) = load_sample(&args.input, ctx)?;
    let param = parameter(args.param);
    let know = knowledge(param, &args.known)?;
    let registry = IntervalRegistry::standard();
    let methods = match args.method.as_deref() {
        Some("all") => registry
            .iter()
            .filter(|m| m.parameter() == param && m.knowledge() == know)
            .collect(),
        Some(name) => {
            let m = registry.get(name)?;
            if m.parameter() != param || m.knowledge() != know {
                return Err(CliError::Unsupported(format!(
                    "{name} estimates {} with {:?}, but the request is for {param} with {know:?}",
                    m.parameter(),
                    m.knowledge()
                )));
            }
            vec![m]
        }
        None => vec![registry.default_for(param, know)?],
    };
    let mut inputs = IntervalInputs::new(args.gamma);
    inputs.alpha_known = args.known.alpha_known;
    inputs.beta_known = args.known.beta_known;
    let mut intervals = Vec::new();
    let mut rows = Vec::new();
    for m in methods {
        let e = m.estimate(&s, &inputs)?;
        for d in &e.diagnostics {
            ctx.warnings.push(format!("{}: {d}", e.name));
        }
        rows.push(vec![
            json!(e.name),
            bound_value(e.lower),
            bound_value(e.upper),
            json!(e.level),
        ]);
        intervals.push(to_value(&e)?);
    }
    let table = Table {
        columns: vec![
            "method".into(),
            "lower".into(),
            "upper".into(),
            "level".into(),
        ],
        rows,
    };
    Ok((json!({ "intervals": intervals }), Some(table)))
}

/// Open sides are written as "inf"/"-inf" so they survive JSON.
fn bound_value(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn critical_source(text: &str) -> CliResult<CriticalSource> {
    Ok(match text {
        "auto" => CriticalSource::Auto,
        "table" => CriticalSource::PublishedTable,
        "exact" => CriticalSource::Exact,
        "simulate" => CriticalSource::Simulate,
        other => CriticalSource::Provided(other.parse().map_err(|_| {
            CliError::Usage(format!(
                "--critical must be auto, table, exact, simulate or a number, got '{other}'"
            ))
        })?),
    })
}

fn direction(d: DirectionArg) -> Direction {
    match d {
        DirectionArg::TwoSided => Direction::TwoSided,
        DirectionArg::Greater => Direction::Greater,
        DirectionArg::Less => Direction::Less,
    }
}

fn cmd_test(args: &TestArgs, ctx: &mut Ctx) -> CliResult<(Value, Option<Table>)> {
    let (s, _) = load_sample(&args.input, ctx)?;
    let param = parameter(args.param);
    let know = knowledge(param, &args.known)?;
    let registry = TestRegistry::standard();
    let procedure = registry.resolve(
        args.method.as_deref(),
        param,
        know,
        direction(args.direction),
    )?;
    let (cfg, meta) = sim_config(&args.sim, DEFAULT_REPS)?;
    let mut inputs = TestInputs::new(args.gamma, args.null)
        .with_critical(critical_source(&args.critical)?)
        .with_simulation(cfg);
    inputs.alpha_known = args.known.alpha_known;
    inputs.beta_known = args.known.beta_known;
    let out = procedure.run(&s, &inputs)?;
    if out.critical_source.seed.is_some() {
        ctx.sim = Some(meta);
    }
    if out.critical_source.source.contains("table") {
        ctx.tables.push("glr-critical-6x5".into());
    }
    for d in &out.diagnostics {
        ctx.warnings.push(format!("{}: {d}", out.name));
    }
    Ok((json!({ "test": to_value(&out)? }), None))
}

fn keep<T: PartialEq + Copy>(all: &[T], only: Option<T>) -> Vec<T> {
    all.iter()
        .copied()
        .filter(|x| only.is_none_or(|o| o == *x))
        .collect()
}

fn cmd_tables(args: &TablesArgs, ctx: &mut Ctx) -> CliResult<(Value, Option<Table>)> {
    let m_only = args.m;
    let spec = QuadratureSpec::default();
    let table = match args.which {
        Which::Table1 => {
            let mut rows = Vec::new();
            for g in keep(&TABLE1_GAMMAS, args.gamma) {
                for m in TABLE1_M.filter(|m| m_only.is_none_or(|o| o == *m)) {
                    let law = DistHandle::chi_square(2.0 * m as f64)?;
                    let (a, b) = solve_equal_density_system(&law, 1.0 - g, None)?;
                    rows.push(vec![json!(g), json!(m), json!(a), json!(b)]);
                }
            }
            Table {
                columns: vec!["gamma".into(), "m".into(), "a".into(), "b".into()],
                rows,
            }
        }
        Which::Table2 => {
            let probs = keep(&TABLE2_PROBS, args.gamma);
            let sim = match args.sim.reps {
                Some(_) => Some(sim_config(&args.sim, DEFAULT_REPS)?),
                None => None,
            };
            let mut rows = Vec::new();
            for m in TABLE2_M.filter(|m| m_only.is_none_or(|o| o == *m)) {
                let nu = 2 * m - 2;
                let mc = match &sim {
                    Some((cfg, _)) => Some(simulate_w_quantiles(m, nu, &probs, cfg)?),
                    None => None,
                };
                for (i, &p) in probs.iter().enumerate() {
                    let w = fw_quantile(p, m, nu, &spec)?;
                    let mut row = vec![json!(m), json!(nu), json!(p), json!(w)];
                    if let Some(mc) = &mc {
                        row.push(json!(mc[i].point));
                        row.push(json!(mc[i].std_error));
                    }
                    rows.push(row);
                }
            }
            let mut columns: Vec<String> = ["m", "nu", "p", "w"].map(String::from).into();
            if let Some((_, meta)) = sim {
                columns.extend(["w_simulated".into(), "std_error".into()]);
                ctx.sim = Some(meta);
            }
            Table { columns, rows }
        }
        Which::Table3 => {
            let (cfg, meta) = sim_config(&args.sim, DEFAULT_REPS)?;
            ctx.sim = Some(meta);
            ctx.tables.push("glr-critical-6x5".into());
            let mut rows = Vec::new();
            for g in keep(&PUBLISHED_GAMMAS, args.gamma) {
                for m in TABLE3_M.filter(|m| m_only.is_none_or(|o| o == *m)) {
                    let sim = simulate_quantile_xm_exp(m, g, &cfg)?;
                    let exact = exact_power_chisq_quantile(m as f64, 2.0 * m as f64, g)?;
                    rows.push(vec![
                        json!(g),
                        json!(m),
                        json!(sim.point),
                        json!(sim.std_error),
                        json!(exact),
                        json!(published_critical(m, g)),
                    ]);
                }
            }
            Table {
                columns: ["gamma", "m", "simulated", "std_error", "exact", "published"]
                    .map(String::from)
                    .into(),
                rows,
            }
        }
    };
    if table.rows.is_empty() {
        return Err(CliError::Usage(
            "the --m/--gamma filters select no cells".into(),
        ));
    }
    Ok((json!({ "which": to_value(&args.which)? }), Some(table)))
}

fn m_range(text: &str) -> CliResult<(usize, usize)> {
    let bad = || CliError::Usage(format!("--m must be 'a-b' or a single count, got '{text}'"));
    let (a, b) = match text.split_once('-') {
        Some((a, b)) => (
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        ),
        None => {
            let a = text.trim().parse().map_err(|_| bad())?;
            (a, a)
        }
    };
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}

fn cmd_efficiency(args: &EfficiencyArgs) -> CliResult<(Value, Option<Table>)> {
    let (a, b) = m_range(&args.m)?;
    let rows = (a..=b)
        .map(|m| Ok(vec![json!(m), json!(efficiency_mle_vs_unbiased(m)?)]))
        .collect::<CliResult<Vec<_>>>()?;
    Ok((
        json!({ "m_from": a, "m_to": b }),
        Some(Table {
            columns: vec!["m".into(), "efficiency".into()],
            rows,
        }),
    ))
}

fn cmd_simulate(args: &SimulateArgs, ctx: &mut Ctx) -> CliResult<(Value, Option<Table>)> {
    let truth = ParetoParams::new(args.beta_known, args.alpha_known)?;
    let (cfg, meta) = sim_config(&args.sim, DEFAULT_REPS)?;
    let cfg = cfg.with_parent(Parent::Pareto(truth));
    ctx.sim = Some(meta);
    let m = args.m;
    let need_method = || {
        args.method
            .as_deref()
            .ok_or_else(|| CliError::Usage("this study needs --method".into()))
    };
    Ok(match args.study {
        Study::Cstar => {
            let sim = simulate_cstar(m, args.gamma, &cfg)?;
            let closed = cstar_closed_form(m, args.gamma)?;
            (
                json!({ "m": m, "gamma": args.gamma, "simulated": to_value(&sim)?, "closed_form": closed }),
                None,
            )
        }
        Study::Quantile => {
            let sim = simulate_quantile_xm_exp(m, args.gamma, &cfg)?;
            let exact = exact_power_chisq_quantile(m as f64, 2.0 * m as f64, args.gamma)?;
            (
                json!({ "m": m, "gamma": args.gamma, "simulated": to_value(&sim)?, "exact": exact,
                        "published": published_critical(m, args.gamma) }),
                None,
            )
        }
        Study::Coverage => {
            let registry = IntervalRegistry::standard();
            let method = registry.get(need_method()?)?;
            let cov = estimate_coverage(method, truth, m, args.gamma, &cfg)?;
            (
                json!({ "method": method.name(), "m": m, "nominal": 1.0 - args.gamma, "coverage": to_value(&cov)? }),
                None,
            )
        }
        Study::Size => {
            let registry = TestRegistry::standard();
            let procedure = registry.get(need_method()?)?;
            let null = args.null.unwrap_or(match procedure.parameter() {
                Parameter::Alpha => truth.alpha,
                Parameter::Beta => truth.beta,
            });
            let mut inputs = TestInputs::new(args.gamma, null).with_simulation(cfg);
            match procedure.knowledge() {
                Knowledge::AlphaKnown => inputs.alpha_known = Some(truth.alpha),
                Knowledge::BetaKnown => inputs.beta_known = Some(truth.beta),
                Knowledge::BothUnknown => {}
            }
            let rate = estimate_rejection_rate(procedure, truth, m, &inputs, &cfg)?;
            (
                json!({ "method": procedure.name(), "m": m, "gamma": args.gamma, "null": null,
                        "rejection_rate": to_value(&rate)? }),
                None,
            )
        }
        Study::RecordTime => {
            let h = simulate_tm_histogram(m, RECORD_TIME_JMAX, &cfg)?;
            let n = h.reps as f64;
            let mut rows = Vec::new();
            for (i, &c) in h.counts.iter().enumerate() {
                let j = m as u64 + i as u64;
                let p = tm_pmf(j, m)?;
                rows.push(vec![
                    json!(j),
                    json!(c),
                    json!(c as f64 / n),
                    json!((p * (1.0 - p) / n).sqrt()),
                    json!(p),
                ]);
            }
            (
                json!({ "m": m, "beyond": h.beyond, "reps": h.reps }),
                Some(Table {
                    columns: ["j", "count", "empirical", "std_error", "exact"]
                        .map(String::from)
                        .into(),
                    rows,
                }),
            )
        }
        Study::Pivots => {
            let mut rows = Vec::new();
            for p in Pivot::ALL.into_iter().filter(|p| m >= p.min_m()) {
                let ks = validate_pivot(p, m, truth, &cfg)?;
                rows.push(vec![
                    to_value(&p)?,
                    json!(ks.statistic),
                    json!(ks.critical),
                    json!(ks.passes),
                ]);
            }
            (
                json!({ "m": m, "level": 0.01 }),
                Some(Table {
                    columns: ["pivot", "ks_statistic", "critical_1pct", "passes"]
                        .map(String::from)
                        .into(),
                    rows,
                }),
            )
        }
        Study::Accuracy => {
            let acc = simulate_estimator_accuracy(truth, m, &cfg)?;
            let a = truth.alpha;
            (
                json!({
                    "m": m,
                    "simulated": to_value(&acc)?,
                    "formula": {
                        "mse_mle": mse_alpha_mle(m, a).ok(),
                        "mse_unbiased": mse_alpha_unbiased(m, a).ok(),
                        "mse_unbiased_exact": mse_alpha_scaled((m - 1) as f64, m, a).ok(),
                        "bias_mle": bias_alpha_mle(m, a).ok(),
                    },
                }),
                None,
            )
        }
    })
}

pub fn run(cli: &Cli) -> CliResult<Report> {
    let mut ctx = Ctx::default();
    let (name, request, (results, table)) = match &cli.command {
        Command::Extract(a) => ("extract", to_value(a)?, cmd_extract(a, &mut ctx)?),
        Command::Estimate(a) => ("estimate", to_value(a)?, cmd_estimate(a, &mut ctx)?),
        Command::Ci(a) => ("ci", to_value(a)?, cmd_ci(a, &mut ctx)?),
        Command::Test(a) => ("test", to_value(a)?, cmd_test(a, &mut ctx)?),
        Command::Tables(a) => ("tables", to_value(a)?, cmd_tables(a, &mut ctx)?),
        Command::EfficiencyCurve(a) => ("efficiency-curve", to_value(a)?, cmd_efficiency(a)?),
        Command::Simulate(a) => ("simulate", to_value(a)?, cmd_simulate(a, &mut ctx)?),
    };
    let checks = cached_checks()?.clone();
    if !checks.all_pass() {
        ctx.warnings
            .push("numerical self-checks failed; see provenance.checks".into());
    }
    let sim = ctx.sim.take();
    Ok(Report {
        command: name.into(),
        request,
        results,
        table,
        provenance: Provenance {
            version: env!("CARGO_PKG_VERSION").into(),
            rng: RNG_ALGORITHM.into(),
            seed: sim.as_ref().map(|s| s.seed),
            seed_source: sim.as_ref().map(|s| s.source.to_string()),
            reps: sim.as_ref().map(|s| s.reps),
            workers: sim.as_ref().map(|s| s.workers),
            tables: ctx.tables,
            tolerances: Tolerances::default(),
            checks,
        },
        warnings: ctx.warnings,
    })
}
