//! Unsigned Stirling numbers of the first kind in exact arithmetic.

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Default number of rows kept in exact form.
pub const DEFAULT_N_MAX: usize = 500;

/// Triangular table of `[n, m]` for `0 ≤ m ≤ n ≤ n_max`, plus `n!`.
#[derive(Debug, Clone)]
pub struct Stirling1Table {
    n_max: usize,
    rows: Vec<Vec<BigUint>>,
    factorials: Vec<BigUint>,
}

impl Stirling1Table {
    /// Builds every row through `n_max` from `[n+1, m] = n·[n, m] + [n, m−1]`.
    pub fn new(n_max: usize) -> Self {
        let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(n_max + 1);
        rows.push(vec![BigUint::one()]);
        let mut factorials = Vec::with_capacity(n_max + 1);
        factorials.push(BigUint::one());
        for n in 0..n_max {
            let prev = &rows[n];
            let mut next = Vec::with_capacity(n + 2);
            next.push(BigUint::zero());
            for m in 1..=n + 1 {
                let mut cell = prev.get(m).map(|x| x * n).unwrap_or_default();
                cell += &prev[m - 1];
                next.push(cell);
            }
            rows.push(next);
            factorials.push(&factorials[n] * (n + 1));
        }
        Self {
            n_max,
            rows,
            factorials,
        }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `[n, m]`, or `None` outside the stored triangle.
    pub fn get(&self, n: usize, m: usize) -> Option<&BigUint> {
        self.rows.get(n).and_then(|row| row.get(m))
    }

    pub fn factorial(&self, n: usize) -> Option<&BigUint> {
        self.factorials.get(n)
    }
}

/// Shared table with `DEFAULT_N_MAX` rows, built on first use.
pub fn default_table() -> &'static Stirling1Table {
    static TABLE: OnceLock<Stirling1Table> = OnceLock::new();
    TABLE.get_or_init(|| Stirling1Table::new(DEFAULT_N_MAX))
}

/// `[n, m]`: the coefficient of `z^m` in `z(z+1)⋯(z+n−1)`.
pub fn stirling1_unsigned(n: usize, m: usize) -> Result<BigUint> {
    if m > n {
        return Err(Error::Domain(format!(
            "stirling1_unsigned needs m <= n, got n={n}, m={m}"
        )));
    }
    let table = default_table();
    if let Some(v) = table.get(n, m) {
        return Ok(v.clone());
    }
    // Beyond the table only columns 0..=m are needed.
    let mut row: Vec<BigUint> = (0..=m)
        .map(|k| table.get(table.n_max(), k).cloned().unwrap_or_default())
        .collect();
    for i in table.n_max()..n {
        for k in (1..=m).rev() {
            let carried = &row[k] * i;
            row[k] = carried + &row[k - 1];
        }
        row[0] = BigUint::zero();
    }
    Ok(row.swap_remove(m))
}

/// `num / den` as an `f64`, correct to a few ulps even when both overflow `f64`.
pub fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    // Scale so the integer quotient carries about 64 significant bits.
    let shift = den.bits() as i64 - num.bits() as i64 + 64;
    let q = if shift >= 0 {
        (num << shift as u64) / den
    } else {
        num / (den << (-shift) as u64)
    };
    let mantissa = q.to_f64().unwrap_or(f64::INFINITY);
    mantissa * pow2(-shift)
}

fn pow2(e: i64) -> f64 {
    // Split to stay clear of intermediate overflow or underflow.
    let mut e = e;
    let mut out = 1.0;
    while e > 1000 {
        out *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        out *= 2f64.powi(-1000);
        e += 1000;
    }
    out * 2f64.powi(e as i32)
}
