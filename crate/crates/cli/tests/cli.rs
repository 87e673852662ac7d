use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use record_pareto::estimation::fit_mle;
use record_pareto::record::{extract_lower_records, RecordTarget, WAGE_DATA};
use serde_json::Value;
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_record-pareto");

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn wage_file(dir: &Path) -> PathBuf {
    let mut body = String::from("wage\n");
    for x in WAGE_DATA {
        body.push_str(&format!("{x}\n"));
    }
    write(dir, "wage.csv", &body)
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("RECORD_PARETO_SEED")
        .output()
        .unwrap()
}

fn run_env(args: &[&str], seed: &str) -> Output {
    Command::new(BIN)
        .args(args)
        .env("RECORD_PARETO_SEED", seed)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(
        o.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).unwrap()
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

#[test]
fn extract_wage_records() {
    let dir = TempDir::new().unwrap();
    let w = wage_file(dir.path());
    let out = stdout(&run(&[
        "extract",
        "--input",
        w.to_str().unwrap(),
        "--m",
        "3",
        "--format",
        "csv",
    ]));
    assert_eq!(out, "i,r,k\n1,112,3\n2,108,4\n3,103,1\n");
}

#[test]
fn extract_single_value_and_records_kind() {
    let dir = TempDir::new().unwrap();
    let one = write(dir.path(), "one.csv", "5.0\n");
    let out = stdout(&run(&[
        "extract",
        "--input",
        one.to_str().unwrap(),
        "--format",
        "csv",
    ]));
    assert_eq!(out, "i,r,k\n1,5,1\n");

    let recs = write(dir.path(), "recs.csv", "r,k\r\n112,3\r\n108,4\r\n103,1\r\n");
    let v = json(&run(&[
        "estimate",
        "--input",
        recs.to_str().unwrap(),
        "--kind",
        "records",
        "--format",
        "json",
    ]));
    assert_eq!(f(&v["results"]["estimates"]["beta_mle"]), 103.0);
}

#[test]
fn parse_error_names_the_line_and_exits_with_input_code() {
    let dir = TempDir::new().unwrap();
    let bad = write(dir.path(), "bad.csv", "x\n1.5\n2.5\nabc\n");
    let o = run(&["extract", "--input", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 4"), "{err}");

    let o = run(&[
        "extract",
        "--input",
        dir.path().join("missing.csv").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["extract", "--input", bad.to_str().unwrap(), "--m", "zero"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn estimate_json_round_trips_bit_exactly() {
    let dir = TempDir::new().unwrap();
    let w = wage_file(dir.path());
    let o = run(&[
        "estimate",
        "--input",
        w.to_str().unwrap(),
        "--m",
        "3",
        "--format",
        "json",
    ]);
    let text = stdout(&o);
    let v: Value = serde_json::from_str(&text).unwrap();
    let again: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(v, again);

    let s = extract_lower_records(&WAGE_DATA, RecordTarget::Count(3)).unwrap();
    let est = fit_mle(&s).unwrap();
    let alpha = f(&v["results"]["estimates"]["alpha_mle"]);
    assert_eq!(alpha.to_bits(), est.alpha_mle.unwrap().to_bits());
    assert_eq!(
        f(&v["results"]["stats"]["t2_star"]).to_bits(),
        s.t2_star().to_bits()
    );
    assert!((alpha - 6.804).abs() < 1e-3);
    assert!(
        v["provenance"]["checks"]["fw_normalization"]
            .as_array()
            .unwrap()
            .len()
            >= 7
    );
}

#[test]
fn text_output_uses_ten_significant_digits() {
    let dir = TempDir::new().unwrap();
    let w = wage_file(dir.path());
    let out = stdout(&run(&[
        "estimate",
        "--input",
        w.to_str().unwrap(),
        "--m",
        "3",
    ]));
    assert!(out.contains("alpha_mle: 6.803976896\n"), "{out}");
    assert!(out.contains("self-checks: passed"), "{out}");
}

#[test]
fn worked_example_alpha_interval_and_test() {
    let dir = TempDir::new().unwrap();
    let w = wage_file(dir.path());
    let w = w.to_str().unwrap();
    let v = json(&run(&[
        "ci", "--input", w, "--m", "3", "--param", "alpha", "--format", "json",
    ]));
    let iv = &v["results"]["intervals"][0];
    assert_eq!(iv["name"], "alpha-ml-2u");
    assert!((f(&iv["lower"]) - 0.096).abs() < 1e-3);
    assert!((f(&iv["upper"]) - 10.807).abs() < 1e-3);

    let v = json(&run(&[
        "test", "--input", w, "--m", "3", "--param", "alpha", "--null", "6", "--gamma", "0.05",
        "--format", "json",
    ]));
    let t = &v["results"]["test"];
    assert!((f(&t["statistic"]) - 10.512).abs() < 5e-3);
    assert_eq!(f(&t["critical"]), 0.2664);
    assert_eq!(t["decision"], "accept");
}

#[test]
fn beta_interval_routes_on_knowledge_flags() {
    let dir = TempDir::new().unwrap();
    let w = wage_file(dir.path());
    let w = w.to_str().unwrap();
    let v = json(&run(&[
        "ci", "--input", w, "--m", "3", "--param", "beta", "--format", "json",
    ]));
    assert_eq!(v["results"]["intervals"][0]["name"], "beta-et-2u");
    let v = json(&run(&[
        "ci",
        "--input",
        w,
        "--m",
        "3",
        "--param",
        "beta",
        "--alpha-known",
        "6.804",
        "--format",
        "json",
    ]));
    assert_eq!(v["results"]["intervals"][0]["name"], "beta-et");
    let v = json(&run(&[
        "ci",
        "--input",
        w,
        "--m",
        "3",
        "--param",
        "alpha",
        "--beta-known",
        "100",
        "--method",
        "alpha-uma-lower",
        "--format",
        "json",
    ]));
    assert_eq!(v["results"]["intervals"][0]["upper"], "inf");
}

#[test]
fn unsupported_requests_exit_with_their_own_code() {
    let dir = TempDir::new().unwrap();
    let w = wage_file(dir.path());
    let w = w.to_str().unwrap();
    let o = run(&[
        "test",
        "--input",
        w,
        "--m",
        "3",
        "--param",
        "alpha",
        "--beta-known",
        "100",
        "--null",
        "6",
        "--method",
        "ump-alpha-greater",
    ]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("GLR"));

    let o = run(&[
        "ci",
        "--input",
        w,
        "--m",
        "3",
        "--param",
        "beta",
        "--beta-known",
        "90",
    ]);
    assert_eq!(o.status.code(), Some(4));
    let o = run(&[
        "ci",
        "--input",
        w,
        "--m",
        "3",
        "--param",
        "beta",
        "--method",
        "no-such-method",
    ]);
    assert_eq!(o.status.code(), Some(4));
    let o = run(&[
        "test",
        "--input",
        w,
        "--m",
        "3",
        "--param",
        "beta",
        "--null",
        "90",
        "--direction",
        "less",
    ]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn tie_at_the_running_minimum_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let w = wage_file(dir.path());
    // The full wage sequence repeats 103 while it is the current minimum.
    let o = run(&["extract", "--input", w.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("ties"));
}

#[test]
fn numerical_failure_exits_with_its_own_code() {
    let dir = TempDir::new().unwrap();
    let w = wage_file(dir.path());
    // 1 − 1e-300 rounds to 1, so no finite interval carries that mass.
    let o = run(&[
        "ci",
        "--input",
        w.to_str().unwrap(),
        "--m",
        "3",
        "--param",
        "alpha",
        "--gamma",
        "1e-300",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn seed_flag_beats_environment() {
    let args = [
        "simulate", "cstar", "--m", "3", "--reps", "2000", "--format", "json",
    ];
    let by_env = json(&run_env(&args, "11"));
    assert_eq!(by_env["provenance"]["seed"], 11);
    assert_eq!(by_env["provenance"]["seed_source"], "environment");

    let mut with_flag = args.to_vec();
    with_flag.extend(["--seed", "11"]);
    let by_flag = json(&run_env(&with_flag, "99"));
    assert_eq!(by_flag["provenance"]["seed_source"], "flag");
    assert_eq!(
        by_flag["results"]["simulated"],
        by_env["results"]["simulated"]
    );

    let o = run_env(&args, "not-a-seed");
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn simulation_is_worker_count_invariant() {
    let base = [
        "simulate", "quantile", "--m", "2", "--reps", "3000", "--seed", "5", "--format", "json",
    ];
    let one = json(&run(&[&base[..], &["--workers", "1"]].concat()));
    let three = json(&run(&[&base[..], &["--workers", "3"]].concat()));
    assert_eq!(one["results"]["simulated"], three["results"]["simulated"]);
}

#[test]
fn tables_and_efficiency_curve_emit_csv() {
    let out = stdout(&run(&[
        "tables", "table1", "--gamma", "0.05", "--m", "2", "--format", "csv",
    ]));
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("gamma,m,a,b"));
    let cells: Vec<f64> = lines
        .next()
        .unwrap()
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    assert!((cells[2] - 0.084727).abs() < 1e-5 && (cells[3] - 9.530336).abs() < 1e-5);

    let out = stdout(&run(&[
        "efficiency-curve",
        "--m",
        "5-12",
        "--format",
        "csv",
    ]));
    assert!(out.lines().any(|l| l == "10,1.25"), "{out}");
    let effs: Vec<f64> = out
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(effs.windows(2).all(|w| w[1] < w[0]) && effs.iter().all(|&e| e > 1.0));

    let o = run(&["efficiency-curve", "--m", "3-6"]);
    assert_eq!(o.status.code(), Some(2));

    let v = json(&run(&[
        "tables", "table3", "--gamma", "0.05", "--m", "2", "--reps", "2000", "--seed", "3",
        "--format", "json",
    ]));
    let row = &v["table"]["rows"][0];
    assert_eq!(f(&row[5]), 0.2664);
    assert_eq!(v["provenance"]["reps"], 2000);
}

#[test]
fn csv_format_is_refused_for_non_tabular_reports() {
    let dir = TempDir::new().unwrap();
    let w = wage_file(dir.path());
    let o = run(&[
        "estimate",
        "--input",
        w.to_str().unwrap(),
        "--m",
        "3",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(4));
}
