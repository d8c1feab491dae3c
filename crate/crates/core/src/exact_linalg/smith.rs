use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::elimination::elementary_divisors;
use super::IntegerMatrix;

/// Smith normal form `left * m * right = diag(diagonal)`.
///
/// `diagonal` has length `min(rows, cols)`; nonzero entries come first and
/// form a divisibility chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub diagonal: Vec<BigInt>,
    pub left: IntegerMatrix,
    pub right: IntegerMatrix,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.diagonal.iter().filter(|d| !d.is_zero()).count()
    }
}

/// Finitely generated abelian group `Z^free_rank + Z/t1 + ... + Z/tk` with
/// `1 < t1 | t2 | ... | tk`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct AbelianGroupInvariants {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl AbelianGroupInvariants {
    pub fn free(rank: usize) -> Self {
        AbelianGroupInvariants { free_rank: rank, torsion: Vec::new() }
    }

    pub fn cyclic(order: u64) -> Self {
        match order {
            0 => Self::free(1),
            1 => Self::free(0),
            n => AbelianGroupInvariants { free_rank: 0, torsion: vec![BigInt::from(n)] },
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_torsion_free(&self) -> bool {
        self.torsion.is_empty()
    }

    /// Dimension of `G (x) F_p` for a prime `p`.
    pub fn dim_mod_p(&self, p: u64) -> usize {
        let p = BigInt::from(p);
        self.free_rank + self.torsion.iter().filter(|t| t.is_multiple_of(&p)).count()
    }

    /// Checks the invariant: torsion entries exceed one and divide their successors.
    pub fn is_canonical(&self) -> bool {
        self.torsion.iter().all(|t| *t > BigInt::one())
            && self.torsion.windows(2).all(|w| w[1].is_multiple_of(&w[0]))
    }

    /// Parses the format produced by `Display` (`0`, `Z^2 + Z/2 + Z/4`, ...).
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        if s == "0" {
            return Some(Self::free(0));
        }
        let mut out = Self::free(0);
        for part in s.split('+').map(str::trim) {
            if part == "Z" {
                out.free_rank += 1;
            } else if let Some(r) = part.strip_prefix("Z^") {
                out.free_rank += r.parse::<usize>().ok()?;
            } else if let Some(t) = part.strip_prefix("Z/") {
                out.torsion.push(t.parse::<BigInt>().ok()?);
            } else {
                return None;
            }
        }
        out.is_canonical().then_some(out)
    }
}

impl fmt::Display for AbelianGroupInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Smith normal form with unimodular certificates.
///
/// Dense, intended for matrices up to a few hundred rows; homology of large
/// complexes goes through [`elementary_divisors`] instead. The pivot is always
/// the entry of least absolute value in the remaining block (first in
/// row-major order on ties), so the output is a function of the input alone.
pub fn smith_normal_form(m: &IntegerMatrix) -> SmithForm {
    let (rows, cols) = m.shape();
    let mut a = m.to_dense();
    let mut left = dense_identity(rows);
    let mut right = dense_identity(cols);
    let diagonal = reduce(&mut a, Some((&mut left, &mut right)));
    SmithForm {
        diagonal,
        left: IntegerMatrix::from_dense(left, rows).expect("square"),
        right: IntegerMatrix::from_dense(right, cols).expect("square"),
    }
}

/// Diagonal of the Smith normal form without certificates.
pub(crate) fn dense_divisors(mut a: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    reduce(&mut a, None)
}

/// Invariants of `Z^rows / (column span of m)`.
pub fn cokernel_invariants(m: &IntegerMatrix) -> AbelianGroupInvariants {
    let divisors = elementary_divisors(m);
    AbelianGroupInvariants {
        free_rank: m.nrows() - divisors.len(),
        torsion: divisors.into_iter().filter(|d| !d.is_one()).collect(),
    }
}

fn dense_identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

fn row_axpy(a: &mut [Vec<BigInt>], target: usize, source: usize, q: &BigInt) {
    // row[target] -= q * row[source]
    let (t, s) = if target < source {
        let (lo, hi) = a.split_at_mut(source);
        (&mut lo[target], &hi[0])
    } else {
        let (lo, hi) = a.split_at_mut(target);
        (&mut hi[0], &lo[source])
    };
    for (x, y) in t.iter_mut().zip(s.iter()) {
        if !y.is_zero() {
            *x -= q * y;
        }
    }
}

fn col_axpy(a: &mut [Vec<BigInt>], target: usize, source: usize, q: &BigInt) {
    for row in a.iter_mut() {
        if !row[source].is_zero() {
            let v = q * &row[source];
            row[target] -= v;
        }
    }
}

fn swap_cols(a: &mut [Vec<BigInt>], i: usize, j: usize) {
    for row in a.iter_mut() {
        row.swap(i, j);
    }
}

fn reduce(a: &mut [Vec<BigInt>], mut certs: Option<(&mut Vec<Vec<BigInt>>, &mut Vec<Vec<BigInt>>)>) -> Vec<BigInt> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let n = rows.min(cols);
    let mut diagonal = vec![BigInt::zero(); n];
    for t in 0..n {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if a[i][j].is_zero() {
                        continue;
                    }
                    if best.map_or(true, |(bi, bj)| a[i][j].magnitude() < a[bi][bj].magnitude()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return diagonal;
            };
            if pi != t {
                a.swap(pi, t);
                if let Some((l, _)) = certs.as_mut() {
                    l.swap(pi, t);
                }
            }
            if pj != t {
                swap_cols(a, pj, t);
                if let Some((_, r)) = certs.as_mut() {
                    swap_cols(r, pj, t);
                }
            }
            let mut clean = true;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                row_axpy(a, i, t, &q);
                if let Some((l, _)) = certs.as_mut() {
                    row_axpy(l, i, t, &q);
                }
                clean &= a[i][t].is_zero();
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                col_axpy(a, j, t, &q);
                if let Some((_, r)) = certs.as_mut() {
                    col_axpy(r, j, t, &q);
                }
                clean &= a[t][j].is_zero();
            }
            if !clean {
                continue;
            }
            let bad_row = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[i][j].is_multiple_of(&a[t][t])));
            if let Some(i) = bad_row {
                let minus_one = BigInt::from(-1);
                row_axpy(a, t, i, &minus_one);
                if let Some((l, _)) = certs.as_mut() {
                    row_axpy(l, t, i, &minus_one);
                }
                continue;
            }
            break;
        }
        if a[t][t].sign() == Sign::Minus {
            for x in a[t].iter_mut() {
                *x = -std::mem::take(x);
            }
            if let Some((l, _)) = certs.as_mut() {
                for x in l[t].iter_mut() {
                    *x = -std::mem::take(x);
                }
            }
        }
        diagonal[t] = a[t][t].abs();
    }
    diagonal
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn certified(m: &IntegerMatrix) -> SmithForm {
        let s = smith_normal_form(m);
        let d = IntegerMatrix::diagonal(m.nrows(), m.ncols(), &s.diagonal).unwrap();
        assert_eq!(s.left.mul(m).unwrap().mul(&s.right).unwrap(), d);
        assert!(s.left.determinant().unwrap().abs().is_one());
        assert!(s.right.determinant().unwrap().abs().is_one());
        s
    }

    #[test]
    fn two_by_two() {
        let s = certified(&IntegerMatrix::from_i64(&[&[2, 4], &[6, 8]]));
        assert_eq!(s.diagonal, diag(&[2, 4]));
    }

    #[test]
    fn identity_and_zero() {
        assert_eq!(certified(&IntegerMatrix::identity(3)).diagonal, diag(&[1, 1, 1]));
        assert_eq!(certified(&IntegerMatrix::zeros(2, 3)).diagonal, diag(&[0, 0]));
    }

    #[test]
    fn empty_matrices() {
        let s = certified(&IntegerMatrix::zeros(0, 4));
        assert!(s.diagonal.is_empty());
        assert_eq!(s.right, IntegerMatrix::identity(4));
        assert_eq!(cokernel_invariants(&IntegerMatrix::zeros(2, 0)), AbelianGroupInvariants::free(2));
    }

    #[test]
    fn divisibility_repair() {
        // diag(2, 3) is not in normal form; the answer is (1, 6).
        let s = certified(&IntegerMatrix::from_i64(&[&[2, 0], &[0, 3]]));
        assert_eq!(s.diagonal, diag(&[1, 6]));
    }

    #[test]
    fn cokernels() {
        let g = cokernel_invariants(&IntegerMatrix::from_i64(&[&[4]]));
        assert_eq!(g, AbelianGroupInvariants::cyclic(4));
        let g = cokernel_invariants(&IntegerMatrix::from_i64(&[&[2, 0], &[0, 1]]));
        assert_eq!(g.free_rank, 0);
        assert_eq!(g.torsion, diag(&[2]));
    }

    #[test]
    fn display_and_parse() {
        let g = AbelianGroupInvariants { free_rank: 2, torsion: diag(&[2, 4]) };
        assert_eq!(g.to_string(), "Z^2 + Z/2 + Z/4");
        assert_eq!(AbelianGroupInvariants::parse(&g.to_string()), Some(g));
        assert_eq!(AbelianGroupInvariants::cyclic(22).to_string(), "Z/22");
        assert_eq!(AbelianGroupInvariants::free(0).to_string(), "0");
        assert_eq!(AbelianGroupInvariants::parse("Z/4 + Z/2"), None);
    }

    #[test]
    fn mod_p_dimension() {
        let g = AbelianGroupInvariants { free_rank: 1, torsion: diag(&[2, 6]) };
        assert_eq!(g.dim_mod_p(2), 3);
        assert_eq!(g.dim_mod_p(3), 2);
        assert_eq!(g.dim_mod_p(5), 1);
    }
}
