//! CSV ingestion for raw sequences and pre-extracted `(r, k)` records.

use std::io::Read;

use record_pareto::record::{extract_lower_records, RecordSample, RecordTarget};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputKind {
    Raw,
    Records,
}

/// Parsed rows with the 1-based line each came from.
struct Rows {
    path: String,
    rows: Vec<(u64, Vec<String>)>,
}

fn read_source(path: &str) -> CliResult<String> {
    let mut text = String::new();
    let io = |source| CliError::Io {
        path: path.to_string(),
        source,
    };
    if path == "-" {
        std::io::stdin().read_to_string(&mut text).map_err(io)?;
    } else {
        text = std::fs::read_to_string(path).map_err(io)?;
    }
    Ok(text)
}

fn parse_rows(path: &str, text: &str) -> CliResult<Rows> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Parse {
            path: path.to_string(),
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let fields: Vec<String> = record.iter().map(str::to_string).collect();
        if fields.iter().all(|f| f.is_empty()) {
            continue;
        }
        rows.push((line, fields));
    }
    // A header is recognised by a non-numeric first token on the first row.
    if let Some((_, first)) = rows.first() {
        if first[0].parse::<f64>().is_err() {
            rows.remove(0);
        }
    }
    Ok(Rows {
        path: path.to_string(),
        rows,
    })
}

impl Rows {
    fn error(&self, line: u64, message: String) -> CliError {
        CliError::Parse {
            path: self.path.clone(),
            line,
            message,
        }
    }

    fn positive(&self, line: u64, token: &str) -> CliResult<f64> {
        let x: f64 = token
            .parse()
            .map_err(|_| self.error(line, format!("'{token}' is not a number")))?;
        if !(x > 0.0 && x.is_finite()) {
            return Err(self.error(line, format!("{token} is not a positive finite value")));
        }
        Ok(x)
    }

    fn count(&self, line: u64, token: &str) -> CliResult<u64> {
        match token.parse::<u64>() {
            Ok(k) if k >= 1 => Ok(k),
            _ => Err(self.error(line, format!("'{token}' is not a positive integer count"))),
        }
    }

    fn expect_width(
        &self,
        line: u64,
        fields: &[String],
        width: usize,
        what: &str,
    ) -> CliResult<()> {
        if fields.len() != width {
            return Err(self.error(
                line,
                format!("expected {what}, found {} fields", fields.len()),
            ));
        }
        Ok(())
    }
}

pub fn parse_sequence(path: &str, text: &str) -> CliResult<Vec<f64>> {
    let rows = parse_rows(path, text)?;
    let mut values = Vec::with_capacity(rows.rows.len());
    for (line, fields) in &rows.rows {
        rows.expect_width(*line, fields, 1, "one observation per line")?;
        values.push(rows.positive(*line, &fields[0])?);
    }
    if values.is_empty() {
        return Err(record_pareto::Error::EmptySequence.into());
    }
    Ok(values)
}

pub fn parse_records(path: &str, text: &str) -> CliResult<Vec<(f64, u64)>> {
    let rows = parse_rows(path, text)?;
    let mut pairs = Vec::with_capacity(rows.rows.len());
    for (line, fields) in &rows.rows {
        rows.expect_width(*line, fields, 2, "two columns r,k")?;
        pairs.push((
            rows.positive(*line, &fields[0])?,
            rows.count(*line, &fields[1])?,
        ));
    }
    if pairs.is_empty() {
        return Err(CliError::Usage(format!("{path}: no records found")));
    }
    Ok(pairs)
}

/// A loaded sample together with any notes about how it was obtained.
pub struct Loaded {
    pub sample: RecordSample,
    pub sequence_len: Option<usize>,
    pub warnings: Vec<String>,
}

pub fn load(path: &str, kind: InputKind, target: RecordTarget) -> CliResult<Loaded> {
    let text = read_source(path)?;
    match kind {
        InputKind::Raw => {
            let seq = parse_sequence(path, &text)?;
            let sample = extract_lower_records(&seq, target)?;
            Ok(Loaded {
                sample,
                sequence_len: Some(seq.len()),
                warnings: vec![],
            })
        }
        InputKind::Records => {
            let mut pairs = parse_records(path, &text)?;
            let mut warnings = vec![];
            if let RecordTarget::Count(m) = target {
                if m > pairs.len() {
                    return Err(record_pareto::Error::InsufficientRecords {
                        found: pairs.len(),
                        requested: m,
                    }
                    .into());
                }
                if m < pairs.len() {
                    pairs.truncate(m);
                    pairs[m - 1].1 = 1;
                    warnings.push(format!(
                        "kept the first {m} records; k_{m} set to 1 as the inverse-sampling stop"
                    ));
                }
            }
            Ok(Loaded {
                sample: RecordSample::new(pairs)?,
                sequence_len: None,
                warnings,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_crlf() {
        let v = parse_sequence("x", "wage\r\n112\r\n154\r\n\r\n108\r\n").unwrap();
        assert_eq!(v, vec![112.0, 154.0, 108.0]);
    }

    #[test]
    fn bad_token_reports_its_line() {
        let err = parse_sequence("x", "1\n2\nabc\n4\n").unwrap_err();
        assert!(matches!(err, CliError::Parse { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn header_only_on_first_row() {
        let err = parse_records("x", "r,k\n5,1\nr,k\n").unwrap_err();
        assert!(matches!(err, CliError::Parse { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn records_need_integer_counts() {
        assert_eq!(
            parse_records("x", "112,3\n103,1\n").unwrap(),
            vec![(112.0, 3), (103.0, 1)]
        );
        assert!(matches!(
            parse_records("x", "112,2.5\n").unwrap_err(),
            CliError::Parse { line: 1, .. }
        ));
        assert!(matches!(
            parse_sequence("x", "5\n-1\n").unwrap_err(),
            CliError::Parse { line: 2, .. }
        ));
    }
}
