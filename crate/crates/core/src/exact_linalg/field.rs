//! Dense linear algebra over Q and F_p.
//!
//! Matrices are `Vec<Vec<E>>` in row-major order. These routines back the
//! spectral-sequence pages and the rational Dold engine, where matrices stay
//! small.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::elimination::{mul_mod, pow_mod, PrimeModulus};

pub type FieldMatrix<E> = Vec<Vec<E>>;

pub trait Field {
    type Elem: Clone + PartialEq + Debug;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Inverse of a nonzero element.
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn from_bigint(&self, v: &BigInt) -> Self::Elem;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    /// Caller guarantees `p` is prime (see [`super::Characteristic`]).
    pub fn new(p: u64) -> Self {
        PrimeField { p }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }
}

impl Field for PrimeField {
    type Elem = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.p
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 + *b as u128) % self.p as u128) as u64
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 + self.p as u128 - *b as u128) % self.p as u128) as u64
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mul_mod(*a, *b, self.p)
    }
    fn inv(&self, a: &u64) -> u64 {
        assert!(*a != 0, "inverse of zero");
        pow_mod(*a, self.p - 2, self.p)
    }
    fn from_bigint(&self, v: &BigInt) -> u64 {
        PrimeModulus(self.p).reduce(v)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        assert!(!a.is_zero(), "inverse of zero");
        a.recip()
    }
    fn from_bigint(&self, v: &BigInt) -> BigRational {
        BigRational::from_integer(v.clone())
    }
}

pub fn zeros<F: Field>(f: &F, rows: usize, cols: usize) -> FieldMatrix<F::Elem> {
    vec![vec![f.zero(); cols]; rows]
}

pub fn identity<F: Field>(f: &F, n: usize) -> FieldMatrix<F::Elem> {
    let mut m = zeros(f, n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = f.one();
    }
    m
}

pub fn ncols<E>(m: &FieldMatrix<E>, fallback: usize) -> usize {
    m.first().map_or(fallback, Vec::len)
}

/// Product of an `r x k` and a `k x c` matrix; `cols` fixes the width when
/// `b` has no rows.
pub fn matmul<F: Field>(f: &F, a: &FieldMatrix<F::Elem>, b: &FieldMatrix<F::Elem>, cols: usize) -> FieldMatrix<F::Elem> {
    let mut out = zeros(f, a.len(), cols);
    for (i, row) in a.iter().enumerate() {
        for (k, x) in row.iter().enumerate() {
            if f.is_zero(x) {
                continue;
            }
            for (j, y) in b[k].iter().enumerate() {
                if !f.is_zero(y) {
                    out[i][j] = f.add(&out[i][j], &f.mul(x, y));
                }
            }
        }
    }
    out
}

pub fn scale<F: Field>(f: &F, m: &FieldMatrix<F::Elem>, k: &F::Elem) -> FieldMatrix<F::Elem> {
    m.iter().map(|row| row.iter().map(|x| f.mul(x, k)).collect()).collect()
}

pub fn add<F: Field>(f: &F, a: &FieldMatrix<F::Elem>, b: &FieldMatrix<F::Elem>) -> FieldMatrix<F::Elem> {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| f.add(x, y)).collect())
        .collect()
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref<F: Field>(f: &F, m: &mut FieldMatrix<F::Elem>) -> Vec<usize> {
    let rows = m.len();
    let cols = ncols(m, 0);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !f.is_zero(&m[i][c])) else {
            continue;
        };
        m.swap(r, p);
        let inv = f.inv(&m[r][c]);
        for x in m[r].iter_mut() {
            *x = f.mul(x, &inv);
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || f.is_zero(&row[c]) {
                continue;
            }
            let factor = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !f.is_zero(y) {
                    *x = f.sub(x, &f.mul(&factor, y));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<F: Field>(f: &F, m: &FieldMatrix<F::Elem>) -> usize {
    let mut work = m.clone();
    rref(f, &mut work).len()
}

/// Rank of the span of a list of vectors (each of length `dim`).
pub fn span_rank<F: Field>(f: &F, vectors: &[Vec<F::Elem>]) -> usize {
    rank(f, &vectors.to_vec())
}

/// Basis of the null space `{x : m x = 0}`, as a list of vectors of length `cols`.
pub fn kernel_basis<F: Field>(f: &F, m: &FieldMatrix<F::Elem>, cols: usize) -> Vec<Vec<F::Elem>> {
    let mut work = m.clone();
    let pivots = rref(f, &mut work);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![f.zero(); cols];
            v[fc] = f.one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = f.sub(&f.zero(), &work[r][fc]);
            }
            v
        })
        .collect()
}

/// Inverse of a square matrix, or `None` if singular.
pub fn inverse<F: Field>(f: &F, m: &FieldMatrix<F::Elem>) -> Option<FieldMatrix<F::Elem>> {
    let n = m.len();
    if m.iter().any(|row| row.len() != n) {
        return None;
    }
    if n == 0 {
        return Some(Vec::new());
    }
    let mut aug: FieldMatrix<F::Elem> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { f.one() } else { f.zero() }));
            r
        })
        .collect();
    let pivots = rref(f, &mut aug);
    if pivots.len() < n || pivots[n - 1] >= n {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub fn is_invertible<F: Field>(f: &F, m: &FieldMatrix<F::Elem>) -> bool {
    m.iter().all(|row| row.len() == m.len()) && rank(f, m) == m.len()
}
