//! The complex of injective words on an alphabet of `n` letters.
//!
//! Its k-simplices are the injective words of length `k + 1` over
//! `{1, ..., n}` and `d_j` deletes the j-th letter. The integral reduced
//! homology is concentrated in degree `n - 1` and free there; [`certify_wedge`]
//! checks this by exact elimination.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::chains::{homology_integral_all, ChainError};
use crate::exact_linalg::AbelianGroupInvariants;
use crate::ssets::{chain_complex_of, SemiSimplicialSet, SsetError};

/// Alphabets above this size are refused; 16 letters already give ~5.7e13
/// top simplices.
pub const MAX_ALPHABET: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InjWordsError {
    #[error("alphabet size {0} is out of range")]
    AlphabetSize(usize),
    #[error("reduced homology of F({n}) is nonzero in degree {degree}: {group}")]
    NotConcentrated { n: usize, degree: i64, group: String },
    #[error("reduced homology of F({n}) has torsion in the top degree: {group}")]
    TopTorsion { n: usize, group: String },
    #[error(transparent)]
    Sset(#[from] SsetError),
    #[error(transparent)]
    Chain(#[from] ChainError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InjectiveWordsComplex {
    alphabet_size: usize,
    // words[k]: injective words of length k + 1, lexicographic
    words: Vec<Vec<Vec<u8>>>,
    set: SemiSimplicialSet,
}

impl InjectiveWordsComplex {
    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn words(&self, level: usize) -> &[Vec<u8>] {
        self.words.get(level).map_or(&[], Vec::as_slice)
    }

    pub fn set(&self) -> &SemiSimplicialSet {
        &self.set
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        self.words.iter().map(Vec::len).collect()
    }
}

fn key(word: &[u8]) -> u128 {
    word.iter().fold(0u128, |acc, &l| acc << 5 | u128::from(l))
}

fn extend_words(prev: &[Vec<u8>], n: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    for w in prev {
        for letter in 1..=n as u8 {
            if !w.contains(&letter) {
                let mut next = w.clone();
                next.push(letter);
                out.push(next);
            }
        }
    }
    out
}

pub fn build_injective_words(n: usize) -> Result<InjectiveWordsComplex, InjWordsError> {
    if n > MAX_ALPHABET {
        return Err(InjWordsError::AlphabetSize(n));
    }
    let mut words: Vec<Vec<Vec<u8>>> = Vec::new();
    let mut current: Vec<Vec<u8>> = (1..=n as u8).map(|l| vec![l]).collect();
    while !current.is_empty() {
        let next = extend_words(&current, n);
        words.push(current);
        current = next;
    }
    let sizes: Vec<usize> = words.iter().map(Vec::len).collect();
    let mut faces: Vec<Vec<Vec<usize>>> = if words.is_empty() { Vec::new() } else { vec![Vec::new()] };
    for k in 1..words.len() {
        let index: HashMap<u128, usize> = words[k - 1].iter().enumerate().map(|(i, w)| (key(w), i)).collect();
        let level_faces = (0..=k)
            .map(|j| {
                words[k]
                    .iter()
                    .map(|w| {
                        let mut f = w.clone();
                        f.remove(j);
                        index[&key(&f)]
                    })
                    .collect()
            })
            .collect();
        faces.push(level_faces);
    }
    let set = SemiSimplicialSet::new(sizes, faces)?;
    Ok(InjectiveWordsComplex { alphabet_size: n, words, set })
}

/// Outcome of the wedge-of-spheres check on `F(n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WedgeReport {
    pub n: usize,
    /// Reduced integral homology, degrees `0..n`.
    pub reduced_homology: Vec<AbelianGroupInvariants>,
    /// Ranks of the groups above.
    pub reduced_betti: Vec<usize>,
    pub top_rank: usize,
    pub torsion_free: bool,
}

/// Reduced integral homology of `F(n)`; fails unless it vanishes below
/// degree `n - 1` and is free in degree `n - 1`.
pub fn certify_wedge(n: usize) -> Result<WedgeReport, InjWordsError> {
    if n == 0 {
        return Err(InjWordsError::AlphabetSize(0));
    }
    let complex = build_injective_words(n)?;
    let chains = chain_complex_of(&complex.set)?.augmented()?;
    let homology = homology_integral_all(&chains)?;
    let top = n as i64 - 1;
    let mut reduced = Vec::new();
    for (degree, group) in homology {
        if degree < 0 {
            if !group.is_trivial() {
                return Err(InjWordsError::NotConcentrated { n, degree, group: group.to_string() });
            }
            continue;
        }
        if degree < top && !group.is_trivial() {
            return Err(InjWordsError::NotConcentrated { n, degree, group: group.to_string() });
        }
        if degree == top && !group.is_torsion_free() {
            return Err(InjWordsError::TopTorsion { n, group: group.to_string() });
        }
        reduced.push(group);
    }
    let reduced_betti: Vec<usize> = reduced.iter().map(|g| g.free_rank).collect();
    let torsion_free = reduced.iter().all(AbelianGroupInvariants::is_torsion_free);
    Ok(WedgeReport { n, top_rank: reduced_betti.last().copied().unwrap_or(0), reduced_betti, reduced_homology: reduced, torsion_free })
}

/// `|χ̃(F(n))| = |Σ_{k=-1}^{n-1} (-1)^k n!/(n-k-1)!|`, from simplex counts alone.
pub fn expected_top_rank(n: usize) -> BigInt {
    let mut total = BigInt::zero();
    // falling factorial n (n-1) ... (n-k): number of injective words of length k+1
    let mut count = BigInt::from(1);
    for len in 0..=n {
        let term = if len % 2 == 1 { count.clone() } else { -count.clone() };
        total += term;
        count *= n - len;
    }
    total.abs()
}

/// [`expected_top_rank`] as a machine integer, when it fits.
pub fn expected_top_rank_usize(n: usize) -> Option<usize> {
    expected_top_rank(n).to_usize()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ssets::validate;

    #[test]
    fn small_alphabets() {
        assert_eq!(build_injective_words(0).unwrap().level_sizes(), Vec::<usize>::new());
        assert_eq!(build_injective_words(1).unwrap().level_sizes(), vec![1]);
        assert_eq!(build_injective_words(2).unwrap().level_sizes(), vec![2, 2]);
        assert_eq!(build_injective_words(3).unwrap().level_sizes(), vec![3, 6, 6]);
        assert_eq!(build_injective_words(4).unwrap().level_sizes(), vec![4, 12, 24, 24]);
    }

    #[test]
    fn canonical_order_and_faces() {
        let f = build_injective_words(3).unwrap();
        assert_eq!(f.words(1), &[vec![1, 2], vec![1, 3], vec![2, 1], vec![2, 3], vec![3, 1], vec![3, 2]]);
        // word 213: d0 -> 13, d1 -> 23, d2 -> 21
        let s = f.set();
        let w = f.words(2).iter().position(|w| w == &[2, 1, 3]).unwrap();
        let faces: Vec<&Vec<u8>> = (0..3).map(|j| &f.words(1)[s.face(2, j, w)]).collect();
        assert_eq!(faces, [&vec![1, 3], &vec![2, 3], &vec![2, 1]]);
        assert!(validate(s).is_ok());
    }

    #[test]
    fn circle_and_two_spheres() {
        let r = certify_wedge(2).unwrap();
        assert_eq!(r.reduced_betti, vec![0, 1]);
        assert_eq!(r.top_rank, 1);
        let r = certify_wedge(3).unwrap();
        assert_eq!(r.reduced_betti, vec![0, 0, 2]);
        assert!(r.torsion_free);
        assert_eq!(certify_wedge(1).unwrap().reduced_betti, vec![0]);
        assert!(matches!(certify_wedge(0), Err(InjWordsError::AlphabetSize(0))));
    }

    #[test]
    fn euler_characteristic_counts() {
        // 1 - 3 + 6 - 6 = -2 for n = 3
        assert_eq!(expected_top_rank(3), BigInt::from(2));
        assert_eq!(expected_top_rank(2), BigInt::from(1));
        assert_eq!(expected_top_rank(5), BigInt::from(44));
        assert_eq!(expected_top_rank(6), BigInt::from(265));
    }
}
