//! Lower-record data under the inverse sampling scheme.
//!
//! A sample is the sequence `(r_1, k_1, ..., r_m, k_m)` of successive minima
//! `r_1 > r_2 > ... > r_m > 0` together with the inter-record trial counts
//! `k_i`; the last count is fixed at one.

use serde::{Deserialize, Serialize};

use crate::error::{check_positive, Error, Result};

/// One lower record and the number of trials needed to beat it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub value: f64,
    pub count: u64,
}

/// Validated lower-record sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Record>", into = "Vec<Record>")]
pub struct RecordSample {
    records: Vec<Record>,
}

impl RecordSample {
    /// Builds a sample from `(r_i, k_i)` pairs, checking every invariant.
    pub fn new(pairs: impl IntoIterator<Item = (f64, u64)>) -> Result<Self> {
        let records: Vec<Record> = pairs
            .into_iter()
            .map(|(value, count)| Record { value, count })
            .collect();
        Self::from_records(records)
    }

    pub fn from_records(records: Vec<Record>) -> Result<Self> {
        let Some(last) = records.last() else {
            return Err(Error::InvalidSample(
                "a sample needs at least one record".into(),
            ));
        };
        if last.count != 1 {
            return Err(Error::InvalidSample(format!(
                "k_m must equal 1, got {}",
                last.count
            )));
        }
        for (i, rec) in records.iter().enumerate() {
            if !(rec.value > 0.0 && rec.value.is_finite()) {
                return Err(Error::NonPositiveValue {
                    position: i + 1,
                    value: rec.value,
                });
            }
            if rec.count == 0 {
                return Err(Error::InvalidSample(format!(
                    "k_{} must be at least 1",
                    i + 1
                )));
            }
        }
        for (i, pair) in records.windows(2).enumerate() {
            if pair[1].value >= pair[0].value {
                return Err(Error::InvalidSample(format!(
                    "records must strictly decrease: r_{} = {} is not below r_{} = {}",
                    i + 2,
                    pair[1].value,
                    i + 1,
                    pair[0].value
                )));
            }
        }
        Ok(Self { records })
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    /// Number of records.
    pub fn m(&self) -> usize {
        self.records.len()
    }

    /// Smallest (last) record `r_m`.
    pub fn r_m(&self) -> f64 {
        self.records[self.records.len() - 1].value
    }

    /// `T_m = Σ k_i`, the trial index at which the m-th record occurred.
    pub fn t_m(&self) -> u64 {
        self.records.iter().map(|r| r.count).sum()
    }

    /// `T2* = Σ_{i<m} k_i (ln r_i − ln r_m)`.
    pub fn t2_star(&self) -> f64 {
        let r_m = self.r_m();
        self.records
            .iter()
            .map(|r| r.count as f64 * (r.value / r_m).ln())
            .sum()
    }

    /// `Σ k_i (ln r_i − ln β)` for a reference scale `β ≤ r_m`.
    ///
    /// This is `T1*` at the true scale and `T0*` at a hypothesized one.
    pub fn t_star_at(&self, beta: f64) -> Result<f64> {
        check_positive("beta", beta)?;
        if beta > self.r_m() {
            return Err(Error::BetaExceedsMinimum {
                beta,
                r_m: self.r_m(),
            });
        }
        Ok(self
            .records
            .iter()
            .map(|r| r.count as f64 * (r.value / beta).ln())
            .sum())
    }

    /// Multiplies every record by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        check_positive("scale factor", c)?;
        Self::new(self.records.iter().map(|r| (r.value * c, r.count)))
    }

    /// Raises every record to the power `p > 0`.
    pub fn powered(&self, p: f64) -> Result<Self> {
        check_positive("power", p)?;
        Self::new(self.records.iter().map(|r| (r.value.powf(p), r.count)))
    }
}

impl TryFrom<Vec<Record>> for RecordSample {
    type Error = Error;

    fn try_from(records: Vec<Record>) -> Result<Self> {
        Self::from_records(records)
    }
}

impl From<RecordSample> for Vec<Record> {
    fn from(sample: RecordSample) -> Self {
        sample.records
    }
}

/// Pareto scale `beta` and shape `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParetoParams {
    pub beta: f64,
    pub alpha: f64,
}

impl ParetoParams {
    pub fn new(beta: f64, alpha: f64) -> Result<Self> {
        check_positive("beta", beta)?;
        check_positive("alpha", alpha)?;
        Ok(Self { beta, alpha })
    }
}

/// How far extraction runs through a raw sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RecordTarget {
    /// Stop at the last record present in the sequence.
    All,
    /// Stop the moment the m-th record is observed.
    Count(usize),
}

/// Extracts lower records from a raw sequence of observations.
///
/// Observations equal to the running minimum are rejected rather than broken
/// arbitrarily, since a tie changes what `k_i` counts.
pub fn extract_lower_records(sequence: &[f64], target: RecordTarget) -> Result<RecordSample> {
    if sequence.is_empty() {
        return Err(Error::EmptySequence);
    }
    if let RecordTarget::Count(0) = target {
        return Err(Error::Domain("record target must be at least 1".into()));
    }

    let mut positions: Vec<usize> = Vec::new();
    let mut current_min = f64::INFINITY;
    for (i, &x) in sequence.iter().enumerate() {
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::NonPositiveValue {
                position: i + 1,
                value: x,
            });
        }
        if x == current_min {
            return Err(Error::TieAtRecord {
                position: i + 1,
                value: x,
            });
        }
        if x < current_min {
            current_min = x;
            positions.push(i);
            if target == RecordTarget::Count(positions.len()) {
                break;
            }
        }
    }

    if let RecordTarget::Count(m) = target {
        if positions.len() < m {
            return Err(Error::InsufficientRecords {
                found: positions.len(),
                requested: m,
            });
        }
    }

    let mut pairs = Vec::with_capacity(positions.len());
    for (j, &pos) in positions.iter().enumerate() {
        let count = match positions.get(j + 1) {
            Some(&next) => (next - pos) as u64,
            None => 1,
        };
        pairs.push((sequence[pos], count));
    }
    RecordSample::new(pairs)
}

/// Sufficient statistics for a sample, optionally at a reference scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedStats {
    pub m: usize,
    pub t_m: u64,
    pub r_m: f64,
    pub t2_star: f64,
    /// Reference scale used for `t_star_ref`, when supplied.
    pub beta_ref: Option<f64>,
    /// `Σ k_i (ln r_i − ln β_ref)`; this is `T1*` or `T0*` depending on the caller.
    pub t_star_ref: Option<f64>,
}

pub fn derive_stats(sample: &RecordSample, beta_ref: Option<f64>) -> Result<DerivedStats> {
    let t_star_ref = beta_ref.map(|b| sample.t_star_at(b)).transpose()?;
    Ok(DerivedStats {
        m: sample.m(),
        t_m: sample.t_m(),
        r_m: sample.r_m(),
        t2_star: sample.t2_star(),
        beta_ref,
        t_star_ref,
    })
}

/// Annual wage data of 30 production-line workers (hundreds of US dollars),
/// the worked example used throughout the docs and tests.
pub const WAGE_DATA: [f64; 30] = [
    112.0, 154.0, 119.0, 108.0, 112.0, 156.0, 123.0, 103.0, 115.0, 107.0, 125.0, 119.0, 128.0,
    132.0, 107.0, 151.0, 103.0, 104.0, 116.0, 140.0, 108.0, 105.0, 158.0, 104.0, 119.0, 111.0,
    101.0, 157.0, 112.0, 115.0,
];
