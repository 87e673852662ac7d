//! Record sequences under inverse sampling.
//!
//! Records are generated in probability space: with `V_i = F(R_i)`, the wait
//! for the next record is Geometric(`V_i`) and the new record is uniform on
//! `(0, V_i)`. Mapping back through `F^{-1}` gives exactly the law of
//! trial-by-trial sampling in `O(m)` work, however long the waits are.

use rand::Rng;

use crate::error::{Error, Result};
use crate::record::RecordSample;
use crate::simulation::Parent;

/// Uniform on `(0, 1]`, safe to take logs of.
fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}

/// Uniform on `(0, 1)`.
fn open_open<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u = rng.random::<f64>();
        if u > 0.0 {
            return u;
        }
    }
}

/// Number of Bernoulli(`p`) trials up to and including the first success.
fn geometric<R: Rng + ?Sized>(p: f64, rng: &mut R) -> u64 {
    if p >= 1.0 {
        return 1;
    }
    let k = (open_unit(rng).ln() / (-p).ln_1p()).floor();
    if k >= u64::MAX as f64 {
        u64::MAX
    } else {
        1 + k as u64
    }
}

/// Draws one inverse-sampling record sample with `m` records.
pub fn gen_records<R: Rng + ?Sized>(
    parent: &Parent,
    m: usize,
    rng: &mut R,
) -> Result<RecordSample> {
    if m == 0 {
        return Err(Error::Domain("record count m must be at least 1".into()));
    }
    let mut v = open_open(rng);
    let mut pairs = Vec::with_capacity(m);
    for _ in 1..m {
        let k = geometric(v, rng);
        let next = v * open_open(rng);
        pairs.push((parent.quantile_lower(v), k));
        v = next;
    }
    pairs.push((parent.quantile_lower(v), 1));
    RecordSample::new(pairs)
}

/// Observation-by-observation sampling from the parent, failing once more
/// than `cap` draws have been made.
pub fn gen_records_naive<R: Rng + ?Sized>(
    parent: &Parent,
    m: usize,
    cap: u64,
    rng: &mut R,
) -> Result<RecordSample> {
    if m == 0 {
        return Err(Error::Domain("record count m must be at least 1".into()));
    }
    let mut pairs: Vec<(f64, u64)> = Vec::with_capacity(m);
    let mut current = f64::INFINITY;
    let mut since = 0u64;
    let mut trials = 0u64;
    loop {
        if trials >= cap {
            return Err(Error::RunawaySampling { cap });
        }
        trials += 1;
        let x = draw(parent, rng);
        since += 1;
        if x < current {
            if let Some(last) = pairs.last_mut() {
                last.1 = since;
            }
            current = x;
            since = 0;
            pairs.push((x, 1));
            if pairs.len() == m {
                return RecordSample::new(pairs);
            }
        }
    }
}

fn draw<R: Rng + ?Sized>(parent: &Parent, rng: &mut R) -> f64 {
    let u = open_unit(rng);
    match *parent {
        Parent::Pareto(p) => p.beta * (-u.ln() / p.alpha).exp(),
        Parent::Exponential { mu, sigma } => mu - sigma * u.ln(),
        Parent::Uniform => u,
    }
}

/// Position of the m-th record in a fresh parent sequence, or `None` when it
/// falls beyond `horizon`.
pub(crate) fn record_time_censored<R: Rng + ?Sized>(
    parent: &Parent,
    m: usize,
    horizon: u64,
    rng: &mut R,
) -> Option<u64> {
    let mut current = f64::INFINITY;
    let mut found = 0;
    for j in 1..=horizon {
        let x = draw(parent, rng);
        if x < current {
            current = x;
            found += 1;
            if found == m {
                return Some(j);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::ParetoParams;
    use crate::simulation::replicate_rng;

    #[test]
    fn single_record_uses_one_draw() {
        let parent = Parent::Uniform;
        let s = gen_records(&parent, 1, &mut replicate_rng(1, 0)).unwrap();
        assert_eq!(s.m(), 1);
        assert_eq!(s.records()[0].count, 1);
        let s = gen_records_naive(&parent, 1, 10, &mut replicate_rng(1, 0)).unwrap();
        assert_eq!(s.t_m(), 1);
    }

    #[test]
    fn samples_are_valid_records() {
        let parent = Parent::Pareto(ParetoParams {
            beta: 2.0,
            alpha: 3.0,
        });
        for rep in 0..200 {
            let s = gen_records(&parent, 6, &mut replicate_rng(3, rep)).unwrap();
            assert_eq!(s.m(), 6);
            assert!(s.r_m() >= 2.0);
            let n =
                gen_records_naive(&parent, 4, 1_000_000_000, &mut replicate_rng(3, rep)).unwrap();
            assert!(n.r_m() >= 2.0);
        }
    }

    #[test]
    fn runaway_cap() {
        let r = gen_records_naive(&Parent::Uniform, 50, 100, &mut replicate_rng(0, 0));
        assert_eq!(r, Err(Error::RunawaySampling { cap: 100 }));
    }

    // The two generators agree in law: compare the mean of R_m and the
    // frequency of T_3 = 3 over many replicates.
    #[test]
    fn skip_ahead_matches_naive() {
        let parent = Parent::Exponential {
            mu: 0.0,
            sigma: 1.0,
        };
        let n = 20_000u64;
        let (mut a_min, mut b_min, mut a_t3, mut b_t3) = (0.0, 0.0, 0u64, 0u64);
        for rep in 0..n {
            let a = gen_records(&parent, 3, &mut replicate_rng(11, rep)).unwrap();
            let b =
                gen_records_naive(&parent, 3, 1_000_000_000, &mut replicate_rng(12, rep)).unwrap();
            a_min += a.r_m();
            b_min += b.r_m();
            a_t3 += (a.t_m() == 3) as u64;
            b_t3 += (b.t_m() == 3) as u64;
        }
        let nf = n as f64;
        assert!(
            (a_min / nf - b_min / nf).abs() < 0.03,
            "{} vs {}",
            a_min / nf,
            b_min / nf
        );
        // P(T_3 = 3) = 1/6.
        let se = (1.0 / 6.0 * 5.0 / 6.0 / nf).sqrt();
        assert!((a_t3 as f64 / nf - 1.0 / 6.0).abs() < 4.0 * se);
        assert!((b_t3 as f64 / nf - 1.0 / 6.0).abs() < 4.0 * se);
    }
}
