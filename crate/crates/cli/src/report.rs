//! The report document and its text, JSON and CSV renderings.

use std::fmt::Write as _;

use record_pareto::checks::CheckReport;
use record_pareto::numerics::QuadratureSpec;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub quadrature_abs: f64,
    pub quadrature_rel: f64,
    pub quadrature_max_subdivisions: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        let q = QuadratureSpec::default();
        Self {
            quadrature_abs: q.abs_tol,
            quadrature_rel: q.rel_tol,
            quadrature_max_subdivisions: q.max_subdivisions,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub version: String,
    pub rng: String,
    /// Seed handed to every simulation in this run, when one ran.
    pub seed: Option<u64>,
    pub seed_source: Option<String>,
    pub reps: Option<u64>,
    pub workers: Option<usize>,
    /// Identifiers of the built-in reference tables consulted.
    pub tables: Vec<String>,
    pub tolerances: Tolerances,
    pub checks: CheckReport,
}

/// Rows of a tabular result, rendered as CSV in text mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub request: Value,
    pub results: Value,
    pub table: Option<Table>,
    pub provenance: Provenance,
    pub warnings: Vec<String>,
}

/// `x` with 10 significant digits, trailing zeros dropped.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.9e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..10).contains(&exp) {
        let decimals = (9 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) => u.to_string(),
            (_, Some(i)) => i.to_string(),
            _ => fmt_sig(n.as_f64().unwrap_or(f64::NAN)),
        },
        Value::String(s) => s.clone(),
        Value::Array(_) | Value::Object(_) => unreachable!("not a scalar"),
    }
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn render_value(out: &mut String, key: &str, v: &Value, indent: usize) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            if !key.is_empty() {
                let _ = writeln!(out, "{pad}{key}:");
            }
            let inner = if key.is_empty() { indent } else { indent + 1 };
            for (k, x) in map {
                render_value(out, k, x, inner);
            }
        }
        Value::Array(items) if items.iter().all(is_scalar) => {
            let parts: Vec<String> = items.iter().map(scalar).collect();
            let _ = writeln!(out, "{pad}{key}: [{}]", parts.join(", "));
        }
        Value::Array(items) => {
            let _ = writeln!(out, "{pad}{key}:");
            for (i, x) in items.iter().enumerate() {
                render_value(out, &format!("[{i}]"), x, indent + 1);
            }
        }
        _ => {
            let _ = writeln!(out, "{pad}{key}: {}", scalar(v));
        }
    }
}

pub fn table_csv(t: &Table) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(vec![]);
    let out = |e: csv::Error| CliError::Output(e.to_string());
    w.write_record(&t.columns).map_err(out)?;
    for row in &t.rows {
        w.write_record(row.iter().map(scalar)).map_err(out)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Output(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))
}

impl Report {
    pub fn to_json(&self) -> CliResult<String> {
        serde_json::to_string_pretty(self).map_err(|e| CliError::Output(e.to_string()))
    }

    pub fn to_text(&self) -> CliResult<String> {
        let mut out = String::new();
        let _ = writeln!(out, "record-pareto {}", self.command);
        if !self.results.is_null() {
            render_value(&mut out, "", &self.results, 0);
        }
        if let Some(t) = &self.table {
            out.push_str(&table_csv(t)?);
        }
        let p = &self.provenance;
        if let (Some(seed), Some(reps)) = (p.seed, p.reps) {
            let _ = writeln!(
                out,
                "simulation: seed {seed} ({}), {reps} reps, {} workers, {}",
                p.seed_source.as_deref().unwrap_or("default"),
                p.workers.unwrap_or(1),
                p.rng
            );
        }
        let checks = if p.checks.all_pass() {
            "passed"
        } else {
            "FAILED"
        };
        let _ = writeln!(out, "self-checks: {checks}");
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        Ok(out)
    }

    pub fn to_csv(&self) -> CliResult<String> {
        match &self.table {
            Some(t) => table_csv(t),
            None => Err(CliError::Unsupported(format!(
                "{} has no tabular output; use --format text or json",
                self.command
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_significant_digits() {
        assert_eq!(fmt_sig(6.80357142857), "6.803571429");
        assert_eq!(fmt_sig(103.0), "103");
        assert_eq!(fmt_sig(0.0001234567891234), "0.0001234567891");
        assert_eq!(fmt_sig(1.5e-9), "1.5e-9");
        assert_eq!(fmt_sig(-2.0 / 3.0), "-0.6666666667");
        assert_eq!(fmt_sig(12345678901.0), "1.23456789e10");
        assert_eq!(fmt_sig(f64::INFINITY), "inf");
    }
}
