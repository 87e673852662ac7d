//! Law of the record time `T_m`, which is free of the parent distribution.
//!
//! `P(T_m = j) = [j−1, m−1] / j!`. Writing `q(n, k) = [n, k]/n!` (the chance of
//! exactly `k` records among `n` observations), the recurrence
//! `q(n+1, k) = (n q(n, k) + q(n, k−1)) / (n+1)` streams the pmf and its tail
//! `P(T_m > n) = Σ_{k<m} q(n, k)` in floating point without big integers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::stirling::{default_table, ratio_to_f64};

fn check_m(m: usize) -> Result<()> {
    if m == 0 {
        Err(Error::Domain("record count m must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// `P(T_m = j)`, exact through the Stirling table and streamed beyond it.
pub fn tm_pmf(j: u64, m: usize) -> Result<f64> {
    check_m(m)?;
    if j < m as u64 {
        return Err(Error::Domain(format!(
            "P(T_m = j) needs j >= m, got j={j}, m={m}"
        )));
    }
    let table = default_table();
    let n = (j - 1) as usize;
    if n <= table.n_max() {
        if let (Some(num), Some(den)) = (table.get(n, m - 1), table.factorial(n)) {
            return Ok(ratio_to_f64(num, den) / j as f64);
        }
    }
    let mut law = RecordTimeLaw::new(m)?;
    while law.n() < n as u64 {
        law.advance();
    }
    Ok(law.pmf_next())
}

/// Streaming state of `q(n, ·)` for `k < m`, rescaled to stay in range.
#[derive(Debug, Clone)]
pub struct RecordTimeLaw {
    m: usize,
    n: u64,
    scaled: Vec<f64>,
    ln_scale: f64,
}

impl RecordTimeLaw {
    /// Starts at `n = m − 1`, the last index before `T_m` can occur.
    pub fn new(m: usize) -> Result<Self> {
        check_m(m)?;
        let mut scaled = vec![0.0; m];
        scaled[0] = 1.0;
        let mut law = Self {
            m,
            n: 0,
            scaled,
            ln_scale: 0.0,
        };
        while law.n + 1 < m as u64 {
            law.advance();
        }
        Ok(law)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    fn advance(&mut self) {
        let n = self.n as f64;
        let inv = 1.0 / (n + 1.0);
        for k in (1..self.m).rev() {
            self.scaled[k] = (n * self.scaled[k] + self.scaled[k - 1]) * inv;
        }
        self.scaled[0] *= n * inv;
        self.n += 1;
        let top = self.scaled.iter().cloned().fold(0.0, f64::max);
        if top > 0.0 && !(1e-200..=1e200).contains(&top) {
            let s = top.ln();
            self.scaled.iter_mut().for_each(|x| *x /= top);
            self.ln_scale += s;
        }
    }

    /// `P(T_m = n + 1) = q(n, m−1)/(n+1)` for the current `n`.
    pub fn pmf_next(&self) -> f64 {
        self.scaled[self.m - 1] * self.ln_scale.exp() / (self.n + 1) as f64
    }

    /// `P(T_m > n)` for the current `n`.
    pub fn tail(&self) -> f64 {
        let s: f64 = self.scaled.iter().sum();
        (s * self.ln_scale.exp()).min(1.0)
    }
}

impl Iterator for RecordTimeLaw {
    type Item = (u64, f64);

    /// Yields `(j, P(T_m = j))` for `j = m, m+1, …`.
    fn next(&mut self) -> Option<Self::Item> {
        let out = (self.n + 1, self.pmf_next());
        self.advance();
        Some(out)
    }
}

/// Upper bound on `sup_{j > J} |H(j)|`, needed to stop the series honestly.
pub enum TailBound<'a> {
    /// `|H| ≤ c` everywhere.
    Constant(f64),
    /// `|H|` is nonincreasing, so the sup beyond `J` is `|H(J+1)|`.
    Decreasing,
    /// Caller-supplied `J ↦ sup_{j > J} |H(j)|`.
    Custom(&'a dyn Fn(u64) -> f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: f64,
    /// Last `j` included.
    pub last_term: u64,
    /// Bound on the omitted remainder.
    pub tail_bound: f64,
}

/// Term cap; the tail of `T_m` decays only like `(ln J)^{m−1}/J`.
pub const MAX_SERIES_TERMS: u64 = 200_000_000;

/// `E[H(T_m)]` truncated once `P(T_m > J)·sup_{j>J}|H(j)| < tail_tol`.
pub fn expect_over_tm<H>(h: H, m: usize, tail_tol: f64, bound: TailBound<'_>) -> Result<SeriesValue>
where
    H: Fn(u64) -> f64,
{
    if !(tail_tol > 0.0) {
        return Err(Error::Domain(format!(
            "tail_tol must be positive, got {tail_tol}"
        )));
    }
    let sup_beyond = |j: u64| -> f64 {
        match &bound {
            TailBound::Constant(c) => c.abs(),
            TailBound::Decreasing => h(j + 1).abs(),
            TailBound::Custom(f) => f(j),
        }
    };
    let mut law = RecordTimeLaw::new(m)?;
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut check_every = 1u64;
    loop {
        let (j, p) = law.next().expect("record-time stream is infinite");
        let term = h(j) * p;
        if !term.is_finite() {
            return Err(Error::TailNotBounded(format!(
                "H({j}) gives a non-finite term"
            )));
        }
        // Kahan summation keeps 1e-10 tails meaningful over 10^8 terms.
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;

        if j % check_every == 0 || j < 1000 {
            let sup = sup_beyond(j);
            if !sup.is_finite() {
                return Err(Error::TailNotBounded(format!(
                    "sup |H| beyond {j} is not finite"
                )));
            }
            let tail = law.tail() * sup;
            if tail < tail_tol {
                return Ok(SeriesValue {
                    value: sum,
                    last_term: j,
                    tail_bound: tail,
                });
            }
            if j >= 1000 {
                check_every = (j / 1000).max(1);
            }
        }
        if j >= MAX_SERIES_TERMS {
            return Err(Error::TailNotBounded(format!(
                "remainder still above {tail_tol} after {MAX_SERIES_TERMS} terms"
            )));
        }
    }
}

/// Outcome of the recursion-identity cross-check on `E[1/T_m]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum IdentityOutcome {
    Agrees {
        m: usize,
        lhs: f64,
        rhs: f64,
        abs_diff: f64,
    },
    Disagrees {
        m: usize,
        lhs: f64,
        rhs: f64,
        abs_diff: f64,
    },
    Undefined {
        m: usize,
        reason: String,
    },
}

/// Checks `E[H(T_m)] = E[T_m H(T_m−1)/(T_m−2)] − E[H(T_{m−1})/(T_{m−1}−1)]`
/// at `H(t) = 1/t`, each side by [`expect_over_tm`].
pub fn check_recursion_identity(
    m: usize,
    tail_tol: f64,
    tolerance: f64,
) -> Result<IdentityOutcome> {
    check_m(m)?;
    if m < 3 {
        return Ok(IdentityOutcome::Undefined {
            m,
            reason: format!(
                "T_{m} − 2 or T_{} − 1 vanishes with positive probability",
                m - 1
            ),
        });
    }
    let lhs = expect_over_tm(|j| 1.0 / j as f64, m, tail_tol, TailBound::Decreasing)?.value;
    let first = expect_over_tm(
        |j| {
            let t = j as f64;
            t / ((t - 1.0) * (t - 2.0))
        },
        m,
        tail_tol,
        TailBound::Decreasing,
    )?
    .value;
    let second = expect_over_tm(
        |j| {
            let t = j as f64;
            1.0 / (t * (t - 1.0))
        },
        m - 1,
        tail_tol,
        TailBound::Decreasing,
    )?
    .value;
    let rhs = first - second;
    let abs_diff = (lhs - rhs).abs();
    Ok(if abs_diff <= tolerance {
        IdentityOutcome::Agrees {
            m,
            lhs,
            rhs,
            abs_diff,
        }
    } else {
        IdentityOutcome::Disagrees {
            m,
            lhs,
            rhs,
            abs_diff,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        assert_eq!(tm_pmf(1, 1).unwrap(), 1.0);
        assert_eq!(tm_pmf(2, 1).unwrap(), 0.0);
        assert_eq!(tm_pmf(2, 2).unwrap(), 0.5);
        assert!((tm_pmf(4, 3).unwrap() - 0.125).abs() < 1e-16);
        assert!(tm_pmf(2, 3).is_err());
        assert!(tm_pmf(2, 0).is_err());
    }

    // P(T_2 = j) = 1/(j(j−1)).
    #[test]
    fn two_records_closed_form() {
        for j in [2u64, 3, 10, 100, 499, 501, 900] {
            let want = 1.0 / (j as f64 * (j - 1) as f64);
            assert!((tm_pmf(j, 2).unwrap() / want - 1.0).abs() < 1e-13, "j={j}");
        }
    }

    #[test]
    fn stream_matches_exact_table() {
        for m in [1usize, 2, 3, 5, 9] {
            let law = RecordTimeLaw::new(m).unwrap();
            for (j, p) in law.take(600) {
                let exact = tm_pmf(j, m).unwrap();
                let scale = exact.abs().max(1e-300);
                assert!(
                    ((p - exact) / scale).abs() < 1e-11,
                    "m={m} j={j}: {p} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn tail_is_remaining_mass() {
        let mut law = RecordTimeLaw::new(3).unwrap();
        let mut acc = 0.0;
        for _ in 0..50 {
            let (_, p) = law.next().unwrap();
            acc += p;
            assert!((acc + law.tail() - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn expectation_examples() {
        let one = expect_over_tm(|_| 1.0, 2, 1e-6, TailBound::Constant(1.0)).unwrap();
        assert!((one.value - 1.0).abs() < 1e-6);
        let ind = expect_over_tm(
            |j| if j == 2 { 1.0 } else { 0.0 },
            2,
            1e-10,
            TailBound::Custom(&|j| if j < 2 { 1.0 } else { 0.0 }),
        )
        .unwrap();
        assert_eq!(ind.value, 0.5);

        // Σ_{j≥2} 1/(j²(j−1)) = 2 − π²/6 by partial fractions.
        let inv = expect_over_tm(|j| 1.0 / j as f64, 2, 1e-12, TailBound::Decreasing).unwrap();
        let want = 2.0 - std::f64::consts::PI.powi(2) / 6.0;
        assert!((inv.value - want).abs() < 1e-11);
    }

    #[test]
    fn unbounded_tail_is_reported() {
        let r = expect_over_tm(|j| j as f64, 2, 1e-6, TailBound::Constant(f64::INFINITY));
        assert!(matches!(r, Err(Error::TailNotBounded(_))));
    }

    #[test]
    fn recursion_identity() {
        assert!(matches!(
            check_recursion_identity(2, 1e-10, 1e-8).unwrap(),
            IdentityOutcome::Undefined { .. }
        ));
        for m in [3, 4] {
            let out = check_recursion_identity(m, 1e-10, 1e-8).unwrap();
            assert!(matches!(out, IdentityOutcome::Agrees { .. }), "{out:?}");
        }
    }
}
