//! Desk-scale models for configuration spaces of points in the plane and
//! the sphere.
//!
//! * A cochain complex over `F_2` with one generator per composition of `n`,
//!   computing `H^*(C_n(R^2); F_2)`.
//! * Finite presentations of the braid groups and spherical braid groups,
//!   whose abelianizations give `H_1`.

use std::collections::HashMap;

use num_bigint::BigInt;
use thiserror::Error;

use crate::exact_linalg::{cokernel_invariants, is_prime, rank_over_field, AbelianGroupInvariants, IntegerMatrix, LinalgError};
use crate::stability::StabilityTable;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BraidsError {
    #[error("need at least {min} points, got {n}")]
    TooFewPoints { n: usize, min: usize },
    #[error("relator {relator} uses generator {letter}, but there are only {generators}")]
    GeneratorOutOfRange { relator: usize, letter: i32, generators: usize },
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("δ∘δ ≠ 0 mod 2 for n = {n} in degree {degree}")]
    NotACochainComplex { n: usize, degree: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// An ordered sequence of positive integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Composition(Vec<u32>);

impl Composition {
    pub fn new(parts: Vec<u32>) -> Option<Self> {
        parts.iter().all(|&p| p > 0).then_some(Composition(parts))
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `n - k` for a composition of `n` into `k` parts.
    pub fn degree(&self) -> usize {
        self.total() as usize - self.0.len()
    }

    /// Merge parts `j` and `j + 1`.
    pub fn merge(&self, j: usize) -> Composition {
        let mut parts = self.0.clone();
        let b = parts.remove(j + 1);
        parts[j] += b;
        Composition(parts)
    }
}

/// Compositions of `n` into exactly `k` parts, in lexicographic order.
pub fn compositions(n: u32, k: usize) -> Vec<Composition> {
    fn go(rest: u32, k: usize, prefix: &mut Vec<u32>, out: &mut Vec<Composition>) {
        if k == 0 {
            if rest == 0 {
                out.push(Composition(prefix.clone()));
            }
            return;
        }
        let max_first = rest.saturating_sub(k as u32 - 1);
        for first in 1..=max_first {
            prefix.push(first);
            go(rest - first, k - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, k, &mut Vec::new(), &mut out);
    out
}

/// `binom(a + b, a)` is odd exactly when `a` and `b` share no binary digit.
pub fn merge_coefficient_mod2(a: u32, b: u32) -> bool {
    a & b == 0
}

/// Cochain complex over `F_2`: degree `i` is spanned by compositions of `n`
/// into `n - i` parts, and
/// `δ(a_1, ..., a_k) = Σ_j binom(a_j + a_{j+1}, a_j) (a_1, ..., a_j + a_{j+1}, ..., a_k)`.
#[derive(Clone, Debug)]
pub struct FuksComplex {
    n: usize,
    bases: Vec<Vec<Composition>>,
    // coboundaries[i]: degree i -> i + 1, shape |basis[i+1]| x |basis[i]|, entries 0/1
    coboundaries: Vec<IntegerMatrix>,
}

impl FuksComplex {
    pub fn new(n: usize) -> Result<Self, BraidsError> {
        if n == 0 {
            return Err(BraidsError::TooFewPoints { n, min: 1 });
        }
        let bases: Vec<Vec<Composition>> = (0..n).map(|i| compositions(n as u32, n - i)).collect();
        let mut coboundaries = Vec::with_capacity(n.saturating_sub(1));
        for i in 0..n - 1 {
            let index: HashMap<&Composition, usize> = bases[i + 1].iter().enumerate().map(|(r, c)| (c, r)).collect();
            let mut triplets = Vec::new();
            for (col, c) in bases[i].iter().enumerate() {
                for j in 0..c.0.len() - 1 {
                    if merge_coefficient_mod2(c.0[j], c.0[j + 1]) {
                        triplets.push((index[&c.merge(j)], col, BigInt::from(1)));
                    }
                }
            }
            coboundaries.push(IntegerMatrix::from_triplets(bases[i + 1].len(), bases[i].len(), triplets)?);
        }
        Ok(FuksComplex { n, bases, coboundaries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn basis(&self, degree: usize) -> &[Composition] {
        self.bases.get(degree).map_or(&[], Vec::as_slice)
    }

    pub fn coboundary(&self, degree: usize) -> Option<&IntegerMatrix> {
        self.coboundaries.get(degree)
    }

    /// Checks `δ_{i+1} δ_i ≡ 0 (mod 2)` in every degree.
    pub fn validate(&self) -> Result<(), BraidsError> {
        for i in 0..self.coboundaries.len().saturating_sub(1) {
            let prod = self.coboundaries[i + 1].mul(&self.coboundaries[i])?;
            if prod.entries().any(|(_, _, v)| v % 2 != BigInt::from(0)) {
                return Err(BraidsError::NotACochainComplex { n: self.n, degree: i });
            }
        }
        Ok(())
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.bases.iter().enumerate().map(|(i, b)| if i % 2 == 0 { b.len() as i64 } else { -(b.len() as i64) }).sum()
    }

    /// `dim_{F_2} H^i` for `i = 0..n`.
    pub fn cohomology_dims(&self) -> Result<Vec<usize>, BraidsError> {
        let ranks: Vec<usize> =
            self.coboundaries.iter().map(|d| rank_over_field(d, 2)).collect::<Result<_, _>>()?;
        Ok((0..self.n)
            .map(|i| {
                let out = ranks.get(i).copied().unwrap_or(0);
                let inc = if i > 0 { ranks[i - 1] } else { 0 };
                self.bases[i].len() - out - inc
            })
            .collect())
    }
}

/// `dim H^i(C_n(R^2); F_2)` for `i = 0..n`.
pub fn fuks_mod2_dims(n: usize) -> Result<Vec<usize>, BraidsError> {
    FuksComplex::new(n)?.cohomology_dims()
}

/// Table of `dim H^i(C_n(R^2); F_2)` for `0 <= i <= i_max`, `1 <= n <= n_max`.
pub fn stability_table_mod2(n_max: usize, i_max: usize) -> Result<StabilityTable, BraidsError> {
    let columns = (1..=n_max).map(fuks_mod2_dims).collect::<Result<Vec<_>, _>>()?;
    Ok(table_from_columns(1, &columns, i_max, "H^i(C_n(R^2); F_2)"))
}

/// Assembles a table from per-`n` dimension vectors, padding with zeros.
pub fn table_from_columns(first_n: usize, columns: &[Vec<usize>], i_max: usize, label: &str) -> StabilityTable {
    let dims = (0..=i_max)
        .map(|i| columns.iter().map(|col| col.get(i).copied().unwrap_or(0)).collect())
        .collect();
    StabilityTable::new(first_n, dims, label).expect("rectangular by construction")
}

/// Finite group presentation. Letters are `±g` for generator `g` in
/// `1..=generators`; a negative letter is an inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupPresentation {
    generators: usize,
    relators: Vec<Vec<i32>>,
}

impl GroupPresentation {
    pub fn new(generators: usize, relators: Vec<Vec<i32>>) -> Result<Self, BraidsError> {
        for (r, word) in relators.iter().enumerate() {
            if let Some(&letter) = word.iter().find(|&&l| l == 0 || l.unsigned_abs() as usize > generators) {
                return Err(BraidsError::GeneratorOutOfRange { relator: r, letter, generators });
            }
        }
        Ok(GroupPresentation { generators, relators })
    }

    pub fn free(generators: usize) -> Self {
        GroupPresentation { generators, relators: Vec::new() }
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn relators(&self) -> &[Vec<i32>] {
        &self.relators
    }

    /// Exponent sums, generators by relators.
    pub fn exponent_sum_matrix(&self) -> IntegerMatrix {
        let entries = self.relators.iter().enumerate().flat_map(|(col, word)| {
            word.iter().map(move |&l| (l.unsigned_abs() as usize - 1, col, BigInt::from(l.signum())))
        });
        IntegerMatrix::from_triplets(self.generators, self.relators.len(), entries.collect::<Vec<_>>())
            .expect("letters validated")
    }
}

/// Artin presentation of the braid group on `n` strands.
pub fn artin_presentation(n: usize) -> Result<GroupPresentation, BraidsError> {
    if n == 0 {
        return Err(BraidsError::TooFewPoints { n, min: 1 });
    }
    let g = n - 1;
    let mut relators = Vec::new();
    for i in 1..g as i32 {
        relators.push(vec![i, i + 1, i, -(i + 1), -i, -(i + 1)]);
    }
    for i in 1..=g as i32 {
        for j in i + 2..=g as i32 {
            relators.push(vec![i, j, -i, -j]);
        }
    }
    GroupPresentation::new(g, relators)
}

/// Braid group of the sphere: the Artin relators plus
/// `σ_1 σ_2 ⋯ σ_{n-1} σ_{n-1} ⋯ σ_2 σ_1`.
pub fn spherical_presentation(n: usize) -> Result<GroupPresentation, BraidsError> {
    if n < 2 {
        return Err(BraidsError::TooFewPoints { n, min: 2 });
    }
    let artin = artin_presentation(n)?;
    let g = (n - 1) as i32;
    let surface: Vec<i32> = (1..=g).chain((1..=g).rev()).collect();
    let mut relators = artin.relators;
    relators.push(surface);
    GroupPresentation::new(artin.generators, relators)
}

pub fn abelianization(p: &GroupPresentation) -> AbelianGroupInvariants {
    cokernel_invariants(&p.exponent_sum_matrix())
}

/// `dim_{F_p}` of the abelianization tensored with `F_p`.
pub fn h1_mod_p(p: &GroupPresentation, char: u64) -> Result<usize, BraidsError> {
    if !is_prime(char) {
        return Err(BraidsError::NotPrime(char));
    }
    Ok(abelianization(p).dim_mod_p(char))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_counts() {
        assert_eq!(compositions(4, 2).len(), 3);
        assert_eq!(compositions(5, 3).len(), 6);
        assert_eq!(compositions(3, 0).len(), 0);
        assert_eq!(compositions(0, 0).len(), 1);
        let c = Composition::new(vec![1, 2, 1]).unwrap();
        assert_eq!(c.degree(), 1);
        assert_eq!(c.merge(1).parts(), &[1, 3]);
        assert!(Composition::new(vec![1, 0]).is_none());
    }

    #[test]
    fn lucas_criterion_on_small_binomials() {
        let mut row = vec![1u64];
        for total in 1..40u32 {
            let mut next = vec![1u64; total as usize + 1];
            for k in 1..total as usize {
                next[k] = row[k - 1] + row[k];
            }
            row = next;
            for a in 0..=total {
                assert_eq!(merge_coefficient_mod2(a, total - a), row[a as usize] % 2 == 1);
            }
        }
    }

    #[test]
    fn small_cohomology() {
        assert_eq!(fuks_mod2_dims(1).unwrap(), vec![1]);
        assert_eq!(fuks_mod2_dims(2).unwrap(), vec![1, 1]);
        assert_eq!(fuks_mod2_dims(3).unwrap(), vec![1, 1, 0]);
        assert!(fuks_mod2_dims(0).is_err());
    }

    #[test]
    fn three_point_coboundary_by_hand() {
        let f = FuksComplex::new(3).unwrap();
        // degree 0: (1,1,1) merges with binom(2,1) = 2 ≡ 0
        assert!(f.coboundary(0).unwrap().is_zero());
        // degree 1: (1,2) and (2,1) both hit (3) with binom(3,1) = 3
        assert_eq!(f.coboundary(1).unwrap(), &IntegerMatrix::from_i64(&[&[1, 1]]));
    }

    #[test]
    fn presentations() {
        let a2 = artin_presentation(2).unwrap();
        assert_eq!((a2.generators(), a2.relators().len()), (1, 0));
        let a3 = artin_presentation(3).unwrap();
        assert_eq!((a3.generators(), a3.relators().len()), (2, 1));
        let a5 = artin_presentation(5).unwrap();
        assert_eq!((a5.generators(), a5.relators().len()), (4, 6));
        let s3 = spherical_presentation(3).unwrap();
        assert_eq!((s3.generators(), s3.relators().len()), (2, 2));
        for n in 2..8 {
            let s = spherical_presentation(n).unwrap();
            assert_eq!(s.relators().last().unwrap().len(), 2 * (n - 1));
        }
        assert!(spherical_presentation(1).is_err());
    }

    #[test]
    fn abelianizations() {
        assert_eq!(abelianization(&GroupPresentation::free(2)), AbelianGroupInvariants::free(2));
        for n in 2..10 {
            assert_eq!(abelianization(&artin_presentation(n).unwrap()), AbelianGroupInvariants::free(1));
        }
        assert_eq!(abelianization(&spherical_presentation(2).unwrap()), AbelianGroupInvariants::cyclic(2));
        assert_eq!(abelianization(&spherical_presentation(12).unwrap()).to_string(), "Z/22");
    }

    #[test]
    fn mod_p_h1() {
        let s5 = spherical_presentation(5).unwrap();
        assert_eq!(h1_mod_p(&s5, 2), Ok(1));
        assert_eq!(h1_mod_p(&s5, 3), Ok(0));
        assert_eq!(h1_mod_p(&spherical_presentation(4).unwrap(), 3), Ok(1));
        assert_eq!(h1_mod_p(&s5, 4), Err(BraidsError::NotPrime(4)));
    }

    #[test]
    fn bad_letters_rejected() {
        assert!(matches!(
            GroupPresentation::new(2, vec![vec![1, 3]]),
            Err(BraidsError::GeneratorOutOfRange { relator: 0, letter: 3, generators: 2 })
        ));
        assert!(GroupPresentation::new(2, vec![vec![0]]).is_err());
    }
}
