//! Finite semi-simplicial sets: levelwise finite sets with face maps and no
//! degeneracies. Simplices of each level are identified by their index.

mod covering;
mod half_smash;
pub mod random;

use num_bigint::BigInt;
use thiserror::Error;

use crate::chains::{ChainComplex, ChainError, FilteredComplex};
use crate::exact_linalg::IntegerMatrix;

pub use covering::{covering_projection, covering_transfer, Covering};
pub use half_smash::{half_smash_augmented, half_smash_construction, Augmentation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SsetError {
    #[error("level {level} has {found} face maps, expected {expected}")]
    FaceCount { level: usize, expected: usize, found: usize },
    #[error("face d_{face} on level {level} has {found} entries, expected {expected}")]
    FaceLength { level: usize, face: usize, expected: usize, found: usize },
    #[error("face d_{face} of simplex {simplex} on level {level} is {target}, out of range")]
    FaceOutOfRange { level: usize, face: usize, simplex: usize, target: usize },
    #[error("simplicial identity d_{i} d_{j} = d_{} d_{i} fails on level {level}, simplex {simplex}", j - 1)]
    Identity { level: usize, i: usize, j: usize, simplex: usize },
    #[error("level {0} has no basepoint")]
    MissingBasepoint(usize),
    #[error("face d_{face} of the basepoint on level {level} is not the basepoint")]
    BasepointNotPreserved { level: usize, face: usize },
    #[error("projection does not commute with d_{face} on level {level}, simplex {simplex}")]
    ProjectionNotSimplicial { level: usize, face: usize, simplex: usize },
    #[error("projection has fiber of size {found} over simplex {simplex} on level {level}, expected {expected}")]
    NonConstantFiber { level: usize, simplex: usize, expected: usize, found: usize },
    #[error("d_{face} is not a bijection from the fiber over simplex {simplex} on level {level}")]
    FiberFaceNotBijective { level: usize, face: usize, simplex: usize },
    #[error("projection shape does not match the sets on level {0}")]
    ProjectionShape(usize),
    #[error("augmentation has {found} entries for {expected} vertices, or a target out of range")]
    AugmentationShape { expected: usize, found: usize },
    #[error("augmentation differs on the endpoints of edge {0}")]
    AugmentationNotSimplicial(usize),
    #[error(transparent)]
    Chain(#[from] ChainError),
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SemiSimplicialSet {
    sizes: Vec<usize>,
    // faces[k][i][σ] = d_i σ for σ a k-simplex; faces[0] is empty.
    faces: Vec<Vec<Vec<usize>>>,
}

impl SemiSimplicialSet {
    /// `faces[k]` holds the `k + 1` face maps of level `k` (`faces[0]` must be
    /// empty). Ranges are checked here; the simplicial identities are checked
    /// by [`validate`].
    pub fn new(sizes: Vec<usize>, faces: Vec<Vec<Vec<usize>>>) -> Result<Self, SsetError> {
        if faces.len() != sizes.len() {
            return Err(SsetError::FaceCount { level: sizes.len(), expected: sizes.len(), found: faces.len() });
        }
        for (k, level_faces) in faces.iter().enumerate() {
            let expected = if k == 0 { 0 } else { k + 1 };
            if level_faces.len() != expected {
                return Err(SsetError::FaceCount { level: k, expected, found: level_faces.len() });
            }
            for (i, face) in level_faces.iter().enumerate() {
                if face.len() != sizes[k] {
                    return Err(SsetError::FaceLength { level: k, face: i, expected: sizes[k], found: face.len() });
                }
                if let Some((simplex, &target)) = face.iter().enumerate().find(|(_, &t)| t >= sizes[k - 1]) {
                    return Err(SsetError::FaceOutOfRange { level: k, face: i, simplex, target });
                }
            }
        }
        let mut x = SemiSimplicialSet { sizes, faces };
        x.trim();
        Ok(x)
    }

    pub fn empty() -> Self {
        SemiSimplicialSet::default()
    }

    /// A discrete set of `n` points.
    pub fn points(n: usize) -> Self {
        if n == 0 {
            return Self::empty();
        }
        SemiSimplicialSet { sizes: vec![n], faces: vec![Vec::new()] }
    }

    /// One vertex and one edge.
    pub fn circle() -> Self {
        SemiSimplicialSet::new(vec![1, 1], vec![vec![], vec![vec![0], vec![0]]]).expect("valid")
    }

    /// Ordered simplicial complex generated by the given facets (vertex lists,
    /// strictly increasing). Simplices are listed level by level in
    /// lexicographic order.
    pub fn from_facets(facets: &[Vec<usize>]) -> Self {
        use std::collections::BTreeSet;
        let mut levels: Vec<BTreeSet<Vec<usize>>> = Vec::new();
        for facet in facets {
            let k = facet.len();
            for mask in 1u64..(1u64 << k) {
                let s: Vec<usize> = (0..k).filter(|b| mask >> b & 1 == 1).map(|b| facet[b]).collect();
                let dim = s.len() - 1;
                if levels.len() <= dim {
                    levels.resize(dim + 1, BTreeSet::new());
                }
                levels[dim].insert(s);
            }
        }
        let lists: Vec<Vec<Vec<usize>>> = levels.into_iter().map(|l| l.into_iter().collect()).collect();
        let sizes = lists.iter().map(Vec::len).collect();
        let faces = lists
            .iter()
            .enumerate()
            .map(|(k, level)| {
                if k == 0 {
                    return Vec::new();
                }
                (0..=k)
                    .map(|i| {
                        level
                            .iter()
                            .map(|s| {
                                let mut f = s.clone();
                                f.remove(i);
                                lists[k - 1].binary_search(&f).expect("closed under faces")
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        SemiSimplicialSet::new(sizes, faces).expect("valid")
    }

    fn trim(&mut self) {
        while self.sizes.last() == Some(&0) {
            self.sizes.pop();
            self.faces.pop();
        }
    }

    /// Highest nonempty level, or `None` for the empty set.
    pub fn dim(&self) -> Option<usize> {
        self.sizes.len().checked_sub(1)
    }

    pub fn size(&self, level: usize) -> usize {
        self.sizes.get(level).copied().unwrap_or(0)
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn num_levels(&self) -> usize {
        self.sizes.len()
    }

    /// `d_i` of simplex `simplex` on `level >= 1`.
    pub fn face(&self, level: usize, i: usize, simplex: usize) -> usize {
        self.faces[level][i][simplex]
    }

    pub fn face_map(&self, level: usize, i: usize) -> &[usize] {
        &self.faces[level][i]
    }

    pub fn disjoint_union(&self, other: &SemiSimplicialSet) -> SemiSimplicialSet {
        let levels = self.sizes.len().max(other.sizes.len());
        let sizes: Vec<usize> = (0..levels).map(|k| self.size(k) + other.size(k)).collect();
        let faces = (0..levels)
            .map(|k| {
                if k == 0 {
                    return Vec::new();
                }
                (0..=k)
                    .map(|i| {
                        let mut f: Vec<usize> =
                            if k < self.sizes.len() { self.faces[k][i].clone() } else { Vec::new() };
                        if k < other.sizes.len() {
                            let off = self.size(k - 1);
                            f.extend(other.faces[k][i].iter().map(|t| t + off));
                        }
                        f
                    })
                    .collect()
            })
            .collect();
        SemiSimplicialSet::new(sizes, faces).expect("union of valid sets")
    }
}

/// Exhaustive check of `d_i d_j = d_{j-1} d_i` for `i < j`, reporting the
/// first failure in order of level, `i`, `j`, simplex.
pub fn validate(x: &SemiSimplicialSet) -> Result<(), SsetError> {
    for k in 2..x.num_levels() {
        for i in 0..k {
            for j in i + 1..=k {
                for s in 0..x.size(k) {
                    let lhs = x.face(k - 1, i, x.face(k, j, s));
                    let rhs = x.face(k - 1, j - 1, x.face(k, i, s));
                    if lhs != rhs {
                        return Err(SsetError::Identity { level: k, i, j, simplex: s });
                    }
                }
            }
        }
    }
    Ok(())
}

/// Free chain complex on the simplices with `∂ = Σ (-1)^i d_i`.
pub fn chain_complex_of(x: &SemiSimplicialSet) -> Result<ChainComplex, SsetError> {
    validate(x)?;
    Ok(chains_on(x, |_, _| true))
}

fn sign(i: usize) -> BigInt {
    if i % 2 == 0 {
        BigInt::from(1)
    } else {
        BigInt::from(-1)
    }
}

/// Chain complex on the simplices accepted by `keep`, dropping faces that
/// land outside it.
fn chains_on(x: &SemiSimplicialSet, keep: impl Fn(usize, usize) -> bool) -> ChainComplex {
    let index: Vec<Vec<Option<usize>>> = (0..x.num_levels())
        .map(|k| {
            let mut next = 0;
            (0..x.size(k))
                .map(|s| {
                    keep(k, s).then(|| {
                        next += 1;
                        next - 1
                    })
                })
                .collect()
        })
        .collect();
    let ranks: Vec<usize> = index.iter().map(|l| l.iter().flatten().count()).collect();
    let maps = (1..x.num_levels())
        .map(|k| {
            let mut triplets = Vec::new();
            for s in 0..x.size(k) {
                let Some(col) = index[k][s] else { continue };
                for i in 0..=k {
                    if let Some(row) = index[k - 1][x.face(k, i, s)] {
                        triplets.push((row, col, sign(i)));
                    }
                }
            }
            IntegerMatrix::from_triplets(ranks[k - 1], ranks[k], triplets).expect("indices in range")
        })
        .collect();
    ChainComplex::new(0, ranks, maps).expect("shapes consistent")
}

/// Skeletal filtration: every k-simplex sits in filtration level k.
pub fn skeletal_filtration(x: &SemiSimplicialSet) -> Result<FilteredComplex, SsetError> {
    let c = chain_complex_of(x)?;
    let levels = (0..x.num_levels()).map(|k| vec![k as u32; x.size(k)]).collect();
    Ok(FilteredComplex::new(c, levels)?)
}

/// Semi-simplicial set with a basepoint simplex in every level, preserved by
/// all faces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointedSemiSimplicialSet {
    set: SemiSimplicialSet,
    basepoints: Vec<usize>,
}

impl PointedSemiSimplicialSet {
    pub fn new(set: SemiSimplicialSet, basepoints: Vec<usize>) -> Result<Self, SsetError> {
        if basepoints.len() != set.num_levels() {
            return Err(SsetError::MissingBasepoint(basepoints.len().min(set.num_levels())));
        }
        if let Some(k) = (0..set.num_levels()).find(|&k| basepoints[k] >= set.size(k)) {
            return Err(SsetError::MissingBasepoint(k));
        }
        Ok(PointedSemiSimplicialSet { set, basepoints })
    }

    /// `X_+`: a disjoint basepoint added in every level up to the dimension of `x`.
    pub fn with_disjoint_basepoint(x: &SemiSimplicialSet) -> Self {
        let levels = x.num_levels().max(1);
        let base_faces = (0..levels).map(|k| if k == 0 { Vec::new() } else { vec![vec![0]; k + 1] }).collect();
        let base = SemiSimplicialSet::new(vec![1; levels], base_faces).expect("valid");
        let set = base.disjoint_union(x);
        PointedSemiSimplicialSet { set, basepoints: vec![0; levels] }
    }

    pub fn set(&self) -> &SemiSimplicialSet {
        &self.set
    }

    pub fn basepoint(&self, level: usize) -> usize {
        self.basepoints[level]
    }

    pub fn validate(&self) -> Result<(), SsetError> {
        validate(&self.set)?;
        for k in 1..self.set.num_levels() {
            for i in 0..=k {
                if self.set.face(k, i, self.basepoints[k]) != self.basepoints[k - 1] {
                    return Err(SsetError::BasepointNotPreserved { level: k, face: i });
                }
            }
        }
        Ok(())
    }
}

/// Chains on the non-basepoint simplices; faces hitting a basepoint vanish.
pub fn reduced_chain_complex_of(x: &PointedSemiSimplicialSet) -> Result<ChainComplex, SsetError> {
    x.validate()?;
    Ok(chains_on(&x.set, |k, s| s != x.basepoints[k]))
}
