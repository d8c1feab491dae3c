//! Sparse elimination kernel shared by the integral and modular paths.
//!
//! Pivots are restricted to units of the coefficient ring. Over a field that
//! finishes the job; over the integers the leftover block (no unit entries)
//! is handed to the dense Smith reduction. Pivot order: the active column
//! with the fewest entries first, then the shortest row holding a unit in
//! that column. Both choices break ties by index, so runs are reproducible.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::smith::dense_divisors;
use super::IntegerMatrix;

pub(crate) trait EliminationRing {
    type Elem: Clone;
    fn lift(&self, v: &BigInt) -> Option<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn unit_inverse(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem>;
    /// `a - b * c`, or `None` on overflow.
    fn mul_sub(&self, a: &Self::Elem, b: &Self::Elem, c: &Self::Elem) -> Option<Self::Elem>;
    fn to_bigint(&self, a: &Self::Elem) -> BigInt;
}

struct CheckedI64;

impl EliminationRing for CheckedI64 {
    type Elem = i64;
    fn lift(&self, v: &BigInt) -> Option<i64> {
        v.to_i64()
    }
    fn is_zero(&self, a: &i64) -> bool {
        *a == 0
    }
    fn unit_inverse(&self, a: &i64) -> Option<i64> {
        (*a == 1 || *a == -1).then_some(*a)
    }
    fn mul(&self, a: &i64, b: &i64) -> Option<i64> {
        a.checked_mul(*b)
    }
    fn mul_sub(&self, a: &i64, b: &i64, c: &i64) -> Option<i64> {
        a.checked_sub(b.checked_mul(*c)?)
    }
    fn to_bigint(&self, a: &i64) -> BigInt {
        BigInt::from(*a)
    }
}

struct Integers;

impl EliminationRing for Integers {
    type Elem = BigInt;
    fn lift(&self, v: &BigInt) -> Option<BigInt> {
        Some(v.clone())
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn unit_inverse(&self, a: &BigInt) -> Option<BigInt> {
        a.abs().is_one().then(|| a.clone())
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> Option<BigInt> {
        Some(a * b)
    }
    fn mul_sub(&self, a: &BigInt, b: &BigInt, c: &BigInt) -> Option<BigInt> {
        Some(a - b * c)
    }
    fn to_bigint(&self, a: &BigInt) -> BigInt {
        a.clone()
    }
}

pub(crate) struct PrimeModulus(pub u64);

impl PrimeModulus {
    pub(crate) fn reduce(&self, v: &BigInt) -> u64 {
        let p = BigInt::from(self.0);
        let r = ((v % &p) + &p) % &p;
        r.to_u64().expect("residue fits")
    }
}

impl EliminationRing for PrimeModulus {
    type Elem = u64;
    fn lift(&self, v: &BigInt) -> Option<u64> {
        Some(self.reduce(v))
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn unit_inverse(&self, a: &u64) -> Option<u64> {
        (*a != 0).then(|| pow_mod(*a, self.0 - 2, self.0))
    }
    fn mul(&self, a: &u64, b: &u64) -> Option<u64> {
        Some(mul_mod(*a, *b, self.0))
    }
    fn mul_sub(&self, a: &u64, b: &u64, c: &u64) -> Option<u64> {
        let bc = mul_mod(*b, *c, self.0);
        Some((*a + self.0 - bc) % self.0)
    }
    fn to_bigint(&self, a: &u64) -> BigInt {
        BigInt::from(*a)
    }
}

pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

struct Overflow;

/// Result of the unit-pivot phase: number of unit pivots and the remaining rows.
struct Reduced<E> {
    unit_pivots: usize,
    residual: Vec<Vec<(usize, E)>>,
}

fn eliminate<R: EliminationRing>(ring: &R, m: &IntegerMatrix) -> Result<Reduced<R::Elem>, Overflow> {
    let (nrows, ncols) = m.shape();
    let mut rows: Vec<Vec<(usize, R::Elem)>> = Vec::with_capacity(nrows);
    for r in 0..nrows {
        let mut row = Vec::with_capacity(m.row_entries(r).len());
        for (c, v) in m.row_entries(r) {
            let e = ring.lift(v).ok_or(Overflow)?;
            if !ring.is_zero(&e) {
                row.push((*c, e));
            }
        }
        rows.push(row);
    }
    let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); ncols];
    for (r, row) in rows.iter().enumerate() {
        for (c, _) in row {
            col_rows[*c].insert(r);
        }
    }
    let mut queue: BTreeSet<(usize, usize)> =
        col_rows.iter().enumerate().filter(|(_, s)| !s.is_empty()).map(|(c, s)| (s.len(), c)).collect();
    let mut row_alive = vec![true; nrows];
    let mut unit_pivots = 0;

    let update_count = |queue: &mut BTreeSet<(usize, usize)>, col: usize, old: usize, new: usize| {
        if old > 0 {
            queue.remove(&(old, col));
        }
        if new > 0 {
            queue.insert((new, col));
        }
    };

    loop {
        let mut pivot: Option<(usize, usize)> = None;
        for &(_, c) in queue.iter() {
            let mut best: Option<(usize, usize)> = None;
            for &r in &col_rows[c] {
                let row = &rows[r];
                let idx = row.binary_search_by_key(&c, |(cc, _)| *cc).expect("column index in sync");
                if ring.unit_inverse(&row[idx].1).is_some() && best.map_or(true, |(_, len)| row.len() < len) {
                    best = Some((r, row.len()));
                }
            }
            if let Some((r, _)) = best {
                pivot = Some((r, c));
                break;
            }
        }
        let Some((pr, pc)) = pivot else { break };
        unit_pivots += 1;

        let pivot_row = std::mem::take(&mut rows[pr]);
        let pidx = pivot_row.binary_search_by_key(&pc, |(c, _)| *c).expect("pivot present");
        let inv = ring.unit_inverse(&pivot_row[pidx].1).expect("unit pivot");
        let targets: Vec<usize> = col_rows[pc].iter().copied().filter(|&r| r != pr).collect();
        for r in targets {
            let row = std::mem::take(&mut rows[r]);
            let idx = row.binary_search_by_key(&pc, |(c, _)| *c).expect("target has pivot column");
            let factor = ring.mul(&row[idx].1, &inv).ok_or(Overflow)?;
            let mut merged = Vec::with_capacity(row.len() + pivot_row.len());
            let (mut i, mut j) = (0, 0);
            while i < row.len() || j < pivot_row.len() {
                let ci = row.get(i).map_or(usize::MAX, |e| e.0);
                let cj = pivot_row.get(j).map_or(usize::MAX, |e| e.0);
                if ci < cj {
                    merged.push(row[i].clone());
                    i += 1;
                } else if cj < ci {
                    let zero = ring.lift(&BigInt::zero()).expect("zero lifts");
                    let v = ring.mul_sub(&zero, &factor, &pivot_row[j].1).ok_or(Overflow)?;
                    if !ring.is_zero(&v) {
                        let old = col_rows[cj].len();
                        col_rows[cj].insert(r);
                        update_count(&mut queue, cj, old, old + 1);
                        merged.push((cj, v));
                    }
                    j += 1;
                } else {
                    let v = ring.mul_sub(&row[i].1, &factor, &pivot_row[j].1).ok_or(Overflow)?;
                    if ring.is_zero(&v) {
                        let old = col_rows[ci].len();
                        col_rows[ci].remove(&r);
                        update_count(&mut queue, ci, old, old - 1);
                    } else {
                        merged.push((ci, v));
                    }
                    i += 1;
                    j += 1;
                }
            }
            rows[r] = merged;
        }
        for (c, _) in &pivot_row {
            let old = col_rows[*c].len();
            col_rows[*c].remove(&pr);
            update_count(&mut queue, *c, old, old - 1);
        }
        row_alive[pr] = false;
    }

    let residual = rows
        .into_iter()
        .zip(row_alive)
        .filter(|(row, alive)| *alive && !row.is_empty())
        .map(|(row, _)| row)
        .collect();
    Ok(Reduced { unit_pivots, residual })
}

fn finish_integral<R: EliminationRing>(ring: &R, reduced: Reduced<R::Elem>) -> Vec<BigInt> {
    let mut divisors = vec![BigInt::one(); reduced.unit_pivots];
    if !reduced.residual.is_empty() {
        let mut cols: Vec<usize> = reduced.residual.iter().flat_map(|r| r.iter().map(|e| e.0)).collect();
        cols.sort_unstable();
        cols.dedup();
        let dense: Vec<Vec<BigInt>> = reduced
            .residual
            .iter()
            .map(|row| {
                let mut d = vec![BigInt::zero(); cols.len()];
                for (c, v) in row {
                    let k = cols.binary_search(c).expect("column collected");
                    d[k] = ring.to_bigint(v);
                }
                d
            })
            .collect();
        divisors.extend(dense_divisors(dense).into_iter().filter(|d| !d.is_zero()));
    }
    divisors.sort();
    divisors
}

/// Nonzero invariant factors of `m`, in increasing (divisibility) order.
///
/// Runs in machine integers first and restarts with arbitrary precision if
/// any intermediate value overflows.
pub fn elementary_divisors(m: &IntegerMatrix) -> Vec<BigInt> {
    match eliminate(&CheckedI64, m) {
        Ok(reduced) => finish_integral(&CheckedI64, reduced),
        Err(Overflow) => {
            let reduced = eliminate(&Integers, m).unwrap_or_else(|_| unreachable!("bigint never overflows"));
            finish_integral(&Integers, reduced)
        }
    }
}

/// Rank of `m` over Q.
pub(crate) fn rank_rational(m: &IntegerMatrix) -> usize {
    elementary_divisors(m).len()
}

/// Rank of `m` reduced modulo the prime `p`.
pub(crate) fn rank_mod_prime(m: &IntegerMatrix, p: u64) -> usize {
    let reduced = eliminate(&PrimeModulus(p), m).unwrap_or_else(|_| unreachable!("modular arithmetic never overflows"));
    debug_assert!(reduced.residual.is_empty());
    reduced.unit_pivots
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_linalg::smith_normal_form;

    #[test]
    fn agrees_with_dense_form_on_small_cases() {
        let cases = [
            IntegerMatrix::from_i64(&[&[2, 4], &[6, 8]]),
            IntegerMatrix::from_i64(&[&[2, 0], &[0, 3]]),
            IntegerMatrix::from_i64(&[&[1, 1, 0], &[0, 1, 1], &[1, 0, 1]]),
            IntegerMatrix::from_i64(&[&[0, 0], &[0, 0]]),
            IntegerMatrix::zeros(0, 3),
        ];
        for m in &cases {
            let dense: Vec<BigInt> = smith_normal_form(m).diagonal.into_iter().filter(|d| !d.is_zero()).collect();
            assert_eq!(elementary_divisors(m), dense, "{m:?}");
        }
    }

    #[test]
    fn overflow_falls_back_to_bigint() {
        let big = i64::MAX / 2;
        let m = IntegerMatrix::from_i64(&[&[1, big], &[big, 3]]);
        // det = 3 - big^2, pivot 1 then residual 3 - big^2.
        let det = BigInt::from(3) - BigInt::from(big) * BigInt::from(big);
        assert_eq!(elementary_divisors(&m), vec![BigInt::one(), det.abs()]);
    }

    #[test]
    fn modular_ranks() {
        let m = IntegerMatrix::from_i64(&[&[2]]);
        assert_eq!(rank_mod_prime(&m, 2), 0);
        assert_eq!(rank_mod_prime(&m, 3), 1);
        assert_eq!(rank_rational(&m), 1);
        let m = IntegerMatrix::from_i64(&[&[1, 1], &[1, 1]]);
        assert_eq!(rank_mod_prime(&m, 3), 1);
    }

    #[test]
    fn pow_mod_inverse() {
        for p in [2u64, 3, 5, 7, 1_000_000_007] {
            for a in 1..p.min(50) {
                assert_eq!(mul_mod(a, pow_mod(a, p - 2, p), p), 1);
            }
        }
    }
}
