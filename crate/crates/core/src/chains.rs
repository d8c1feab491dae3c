//! Chain complexes of free abelian groups, chain maps, mapping cones,
//! filtrations and the spectral sequence of a filtered complex.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::exact_linalg::field::{self, Field, FieldMatrix, PrimeField, Rationals};
use crate::exact_linalg::{
    elementary_divisors, rank_in, smith_normal_form, AbelianGroupInvariants, Characteristic, IntegerMatrix,
    LinalgError,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChainError {
    #[error("boundary into degree {degree} has shape {found:?}, expected {expected:?}")]
    BoundaryShape { degree: i64, expected: (usize, usize), found: (usize, usize) },
    #[error("d∘d is nonzero at degree {degree}")]
    NotAComplex { degree: i64 },
    #[error("chain map block in degree {degree} has shape {found:?}, expected {expected:?}")]
    MapShape { degree: i64, expected: (usize, usize), found: (usize, usize) },
    #[error("chain map does not commute with boundaries in degree {degree}")]
    NotAChainMap { degree: i64 },
    #[error("filtration does not respect the boundary at degree {degree}, generator {index}")]
    FiltrationRaised { degree: i64, index: usize },
    #[error("filtration has {found} levels in degree {degree}, expected {expected}")]
    FiltrationShape { degree: i64, expected: usize, found: usize },
    #[error("augmentation is not a chain map (sum of coefficients of a boundary is nonzero)")]
    NotAugmentable,
    #[error("complex has generators in negative degree {0}")]
    NegativeDegree(i64),
    #[error("spectral sequences are only computed over fields")]
    IntegralCoefficients,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Bounded chain complex of finitely generated free abelian groups.
///
/// Degrees run from `bottom_degree` to `bottom_degree + ranks.len() - 1`;
/// everything outside that window is zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    bottom_degree: i64,
    ranks: Vec<usize>,
    // boundaries[j]: degree bottom+j -> bottom+j-1
    boundaries: Vec<IntegerMatrix>,
}

impl ChainComplex {
    pub fn zero() -> Self {
        ChainComplex { bottom_degree: 0, ranks: Vec::new(), boundaries: Vec::new() }
    }

    /// `maps[j]` is the boundary from degree `bottom_degree + j + 1` to
    /// `bottom_degree + j`, of shape `ranks[j] x ranks[j + 1]`.
    pub fn new(bottom_degree: i64, ranks: Vec<usize>, maps: Vec<IntegerMatrix>) -> Result<Self, ChainError> {
        let expected_maps = ranks.len().saturating_sub(1);
        if maps.len() != expected_maps {
            let degree = bottom_degree + maps.len() as i64 + 1;
            return Err(ChainError::BoundaryShape { degree, expected: (0, 0), found: (maps.len(), expected_maps) });
        }
        let mut boundaries = Vec::with_capacity(ranks.len());
        if let Some(&r0) = ranks.first() {
            boundaries.push(IntegerMatrix::zeros(0, r0));
        }
        for (j, m) in maps.into_iter().enumerate() {
            let expected = (ranks[j], ranks[j + 1]);
            if m.shape() != expected {
                return Err(ChainError::BoundaryShape {
                    degree: bottom_degree + j as i64 + 1,
                    expected,
                    found: m.shape(),
                });
            }
            boundaries.push(m);
        }
        Ok(ChainComplex { bottom_degree, ranks, boundaries })
    }

    pub fn bottom_degree(&self) -> i64 {
        self.bottom_degree
    }

    /// Largest degree with a stored group; `bottom_degree - 1` when empty.
    pub fn top_degree(&self) -> i64 {
        self.bottom_degree + self.ranks.len() as i64 - 1
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> {
        self.bottom_degree..=self.top_degree()
    }

    pub fn rank(&self, degree: i64) -> usize {
        self.index(degree).map_or(0, |j| self.ranks[j])
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    fn index(&self, degree: i64) -> Option<usize> {
        let j = degree - self.bottom_degree;
        (j >= 0 && (j as usize) < self.ranks.len()).then_some(j as usize)
    }

    /// Boundary out of `degree`, shape `rank(degree - 1) x rank(degree)`.
    pub fn boundary(&self, degree: i64) -> IntegerMatrix {
        match self.index(degree) {
            Some(j) if j > 0 => self.boundaries[j].clone(),
            _ => IntegerMatrix::zeros(self.rank(degree - 1), self.rank(degree)),
        }
    }

    fn boundary_ref(&self, degree: i64) -> Option<&IntegerMatrix> {
        self.index(degree).filter(|&j| j > 0).map(|j| &self.boundaries[j])
    }

    pub fn total_rank(&self) -> usize {
        self.ranks.iter().sum()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.degrees().map(|k| if k.rem_euclid(2) == 0 { 1 } else { -1 } * self.rank(k) as i64).sum()
    }

    /// Shifts every degree by `by`; boundaries change sign when `by` is odd.
    pub fn shift(&self, by: i64) -> ChainComplex {
        let boundaries = if by.rem_euclid(2) == 1 {
            self.boundaries.iter().map(IntegerMatrix::neg).collect()
        } else {
            self.boundaries.clone()
        };
        ChainComplex { bottom_degree: self.bottom_degree + by, ranks: self.ranks.clone(), boundaries }
    }

    /// Appends a rank-one group in degree -1 and the augmentation sending
    /// every degree-0 generator to 1. The input must live in degrees >= 0.
    pub fn augmented(&self) -> Result<ChainComplex, ChainError> {
        if self.ranks.iter().enumerate().any(|(j, r)| *r > 0 && self.bottom_degree + (j as i64) < 0) {
            return Err(ChainError::NegativeDegree(self.bottom_degree));
        }
        let top = self.top_degree();
        let mut ranks = vec![1];
        let mut maps = Vec::new();
        for k in 0..=top {
            ranks.push(self.rank(k));
            if k == 0 {
                let ones = (0..self.rank(0)).map(|c| (0, c, BigInt::one()));
                maps.push(IntegerMatrix::from_triplets(1, self.rank(0), ones)?);
            } else {
                maps.push(self.boundary(k));
            }
        }
        let out = ChainComplex::new(-1, ranks, maps)?;
        match validate_complex(&out) {
            Ok(()) => Ok(out),
            Err(ChainError::NotAComplex { degree: 1 }) if validate_complex(self).is_ok() => Err(ChainError::NotAugmentable),
            Err(e) => Err(e),
        }
    }
}

/// First degree `k` with `∂_{k-1} ∘ ∂_k ≠ 0`, if any.
pub fn validate_complex(c: &ChainComplex) -> Result<(), ChainError> {
    for k in c.degrees() {
        if let (Some(lower), Some(upper)) = (c.boundary_ref(k - 1), c.boundary_ref(k)) {
            if !lower.mul(upper)?.is_zero() {
                return Err(ChainError::NotAComplex { degree: k });
            }
        }
    }
    Ok(())
}

/// Integral homology in every degree of the complex, computing each
/// boundary's invariant factors once.
pub fn homology_integral_all(c: &ChainComplex) -> Result<Vec<(i64, AbelianGroupInvariants)>, ChainError> {
    validate_complex(c)?;
    let divisors: BTreeMap<i64, Vec<BigInt>> =
        c.degrees().map(|k| (k, c.boundary_ref(k).map(elementary_divisors).unwrap_or_default())).collect();
    Ok(c.degrees()
        .map(|k| {
            let out_rank = divisors.get(&k).map_or(0, Vec::len);
            let incoming = divisors.get(&(k + 1)).cloned().unwrap_or_default();
            let free_rank = c.rank(k) - out_rank - incoming.len();
            let torsion = incoming.into_iter().filter(|d| !d.is_one()).collect();
            (k, AbelianGroupInvariants { free_rank, torsion })
        })
        .collect())
}

/// `H_k = ker ∂_k / im ∂_{k+1}` over Z.
pub fn homology_integral(c: &ChainComplex, k: i64) -> Result<AbelianGroupInvariants, ChainError> {
    validate_complex(c)?;
    let out_rank = c.boundary_ref(k).map_or(0, |m| elementary_divisors(m).len());
    let incoming = c.boundary_ref(k + 1).map(elementary_divisors).unwrap_or_default();
    let free_rank = c.rank(k) - out_rank - incoming.len();
    let torsion = incoming.into_iter().filter(|d| !d.is_one()).collect();
    Ok(AbelianGroupInvariants { free_rank, torsion })
}

/// Homology dimensions over the field of characteristic `char`, one entry
/// per degree from `bottom_degree` to `top_degree`.
pub fn homology_field_dims(c: &ChainComplex, char: u64) -> Result<Vec<usize>, ChainError> {
    let ch = Characteristic::new(char)?;
    validate_complex(c)?;
    let ranks: BTreeMap<i64, usize> =
        c.degrees().map(|k| (k, c.boundary_ref(k).map_or(0, |m| rank_in(m, ch)))).collect();
    Ok(c.degrees()
        .map(|k| c.rank(k) - ranks[&k] - ranks.get(&(k + 1)).copied().unwrap_or(0))
        .collect())
}

/// Reduced homology dimensions of `c` regarded as a complex in degrees >= 0:
/// homology of the augmented complex, reported from degree 0 up.
pub fn reduced_field_dims(c: &ChainComplex, char: u64) -> Result<Vec<usize>, ChainError> {
    let dims = homology_field_dims(&c.augmented()?, char)?;
    Ok(dims.into_iter().skip(1).collect())
}

/// Lattice basis of the integral cycles `ker ∂_k`, as columns.
pub fn integral_cycle_basis(c: &ChainComplex, k: i64) -> IntegerMatrix {
    let d = c.boundary(k);
    let snf = smith_normal_form(&d);
    let rank = snf.rank();
    let cols: Vec<usize> = (rank..d.ncols()).collect();
    let entries = cols.iter().enumerate().flat_map(|(new_c, &old_c)| {
        (0..d.ncols()).filter_map({
            let right = &snf.right;
            move |r| {
                let v = right.get(r, old_c).expect("in range");
                (!v.is_zero()).then_some((r, new_c, v))
            }
        })
    });
    IntegerMatrix::from_triplets(d.ncols(), cols.len(), entries.collect::<Vec<_>>()).expect("in range")
}

/// Degreewise homomorphism between two chain complexes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap {
    source: ChainComplex,
    target: ChainComplex,
    blocks: BTreeMap<i64, IntegerMatrix>,
}

impl ChainMap {
    /// Blocks missing from `blocks` are zero. Shapes are checked; the chain
    /// map condition is checked by [`ChainMap::validate`].
    pub fn new(source: ChainComplex, target: ChainComplex, blocks: BTreeMap<i64, IntegerMatrix>) -> Result<Self, ChainError> {
        for (&k, m) in &blocks {
            let expected = (target.rank(k), source.rank(k));
            if m.shape() != expected {
                return Err(ChainError::MapShape { degree: k, expected, found: m.shape() });
            }
        }
        Ok(ChainMap { source, target, blocks })
    }

    pub fn identity(c: &ChainComplex) -> Self {
        let blocks = c.degrees().map(|k| (k, IntegerMatrix::identity(c.rank(k)))).collect();
        ChainMap { source: c.clone(), target: c.clone(), blocks }
    }

    pub fn zero(source: &ChainComplex, target: &ChainComplex) -> Self {
        ChainMap { source: source.clone(), target: target.clone(), blocks: BTreeMap::new() }
    }

    pub fn source(&self) -> &ChainComplex {
        &self.source
    }

    pub fn target(&self) -> &ChainComplex {
        &self.target
    }

    pub fn block(&self, k: i64) -> IntegerMatrix {
        self.blocks
            .get(&k)
            .cloned()
            .unwrap_or_else(|| IntegerMatrix::zeros(self.target.rank(k), self.source.rank(k)))
    }

    fn degree_range(&self) -> std::ops::RangeInclusive<i64> {
        let lo = self.source.bottom_degree().min(self.target.bottom_degree());
        let hi = self.source.top_degree().max(self.target.top_degree());
        lo..=hi + 1
    }

    /// Checks `∂ f = f ∂` in every degree.
    pub fn validate(&self) -> Result<(), ChainError> {
        validate_complex(&self.source)?;
        validate_complex(&self.target)?;
        for k in self.degree_range() {
            let lhs = self.target.boundary(k).mul(&self.block(k))?;
            let rhs = self.block(k - 1).mul(&self.source.boundary(k))?;
            if lhs != rhs {
                return Err(ChainError::NotAChainMap { degree: k });
            }
        }
        Ok(())
    }

    pub fn compose(&self, after: &ChainMap) -> Result<ChainMap, ChainError> {
        let mut blocks = BTreeMap::new();
        for k in self.degree_range() {
            let m = after.block(k).mul(&self.block(k))?;
            if !m.is_zero() {
                blocks.insert(k, m);
            }
        }
        ChainMap::new(self.source.clone(), after.target.clone(), blocks)
    }
}

/// Mapping cone: degree `k` is `target_k ⊕ source_{k-1}` with boundary
/// `[[∂ᵗ, f], [0, -∂ˢ]]`.
pub fn mapping_cone(f: &ChainMap) -> Result<ChainComplex, ChainError> {
    f.validate()?;
    let (s, t) = (&f.source, &f.target);
    let lo = t.bottom_degree().min(s.bottom_degree() + 1);
    let hi = t.top_degree().max(s.top_degree() + 1);
    if hi < lo {
        return Ok(ChainComplex::zero());
    }
    let ranks: Vec<usize> = (lo..=hi).map(|k| t.rank(k) + s.rank(k - 1)).collect();
    let mut maps = Vec::new();
    for k in lo + 1..=hi {
        let zero = IntegerMatrix::zeros(s.rank(k - 2), t.rank(k));
        let dt = t.boundary(k);
        let fk = f.block(k - 1);
        let ds = s.boundary(k - 1).neg();
        maps.push(IntegerMatrix::block(&[vec![&dt, &fk], vec![&zero, &ds]])?);
    }
    ChainComplex::new(lo, ranks, maps)
}

/// Chain-level suspension of reduced data: the augmented complex shifted up
/// by one, so that `H_{k+1}(Σc) = H̃_k(c)`.
pub fn suspension(c: &ChainComplex) -> Result<ChainComplex, ChainError> {
    Ok(c.augmented()?.shift(1))
}

/// A chain complex whose generators carry filtration levels that boundaries
/// never raise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilteredComplex {
    ambient: ChainComplex,
    // levels[j][i]: level of generator i in degree bottom + j
    levels: Vec<Vec<u32>>,
}

impl FilteredComplex {
    pub fn new(ambient: ChainComplex, levels: Vec<Vec<u32>>) -> Result<Self, ChainError> {
        if levels.len() != ambient.ranks.len() {
            return Err(ChainError::FiltrationShape {
                degree: ambient.bottom_degree(),
                expected: ambient.ranks.len(),
                found: levels.len(),
            });
        }
        for (j, lv) in levels.iter().enumerate() {
            if lv.len() != ambient.ranks[j] {
                return Err(ChainError::FiltrationShape {
                    degree: ambient.bottom_degree() + j as i64,
                    expected: ambient.ranks[j],
                    found: lv.len(),
                });
            }
        }
        let fc = FilteredComplex { ambient, levels };
        fc.validate()?;
        Ok(fc)
    }

    pub fn ambient(&self) -> &ChainComplex {
        &self.ambient
    }

    pub fn level(&self, degree: i64, index: usize) -> u32 {
        self.levels[(degree - self.ambient.bottom_degree()) as usize][index]
    }

    fn levels_in(&self, degree: i64) -> &[u32] {
        self.ambient.index(degree).map_or(&[], |j| &self.levels[j])
    }

    pub fn validate(&self) -> Result<(), ChainError> {
        validate_complex(&self.ambient)?;
        for k in self.ambient.degrees() {
            let d = self.ambient.boundary(k);
            let lower = self.levels_in(k - 1);
            for (r, c, _) in d.entries() {
                if lower[r] > self.levels_in(k)[c] {
                    return Err(ChainError::FiltrationRaised { degree: k, index: c });
                }
            }
        }
        Ok(())
    }

    /// Smallest and largest level present, if any generator exists.
    pub fn level_range(&self) -> Option<(u32, u32)> {
        let all = self.levels.iter().flatten();
        Some((*all.clone().min()?, *all.max()?))
    }

    /// Number of pages after which every differential vanishes.
    pub fn length(&self) -> u32 {
        self.level_range().map_or(0, |(lo, hi)| hi - lo)
    }
}

/// Coefficients for spectral-sequence computations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coefficients {
    Integers,
    Field(Characteristic),
}

impl Coefficients {
    pub fn field(char: u64) -> Result<Self, ChainError> {
        Ok(Coefficients::Field(Characteristic::new(char)?))
    }
}

/// One page `E^r` of the spectral sequence of a filtration, indexed by
/// filtration degree `s` and complementary degree `t = n - s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectralPage {
    pub r: u32,
    pub characteristic: Characteristic,
    /// Nonzero entries only.
    pub dims: BTreeMap<(i64, i64), usize>,
}

impl SpectralPage {
    pub fn get(&self, s: i64, t: i64) -> usize {
        self.dims.get(&(s, t)).copied().unwrap_or(0)
    }

    /// Sum of `dim E_{s,t}` over `s + t = n`.
    pub fn total(&self, n: i64) -> usize {
        self.dims.iter().filter(|((s, t), _)| s + t == n).map(|(_, d)| d).sum()
    }

    pub fn is_first_quadrant(&self) -> bool {
        self.dims.keys().all(|&(s, t)| s >= 0 && t >= 0)
    }
}

/// Pages `E^1, ..., E^{r_max}` over a field.
///
/// With `F_p` the span of generators of level at most `p`,
/// `Z^r_p = F_p ∩ ∂⁻¹(F_{p-r})`, `B^r_p = F_p ∩ ∂(F_{p+r})` and
/// `E^r_p = Z^r_p / (Z^{r-1}_{p-1} + B^{r-1}_p)`. All dimensions are exact
/// ranks over the field.
pub fn spectral_pages(fc: &FilteredComplex, coefficients: Coefficients, r_max: u32) -> Result<Vec<SpectralPage>, ChainError> {
    let Coefficients::Field(ch) = coefficients else {
        return Err(ChainError::IntegralCoefficients);
    };
    fc.validate()?;
    Ok((1..=r_max).map(|r| page_in(fc, ch, r)).collect())
}

/// The limiting page `E^∞`.
pub fn e_infinity(fc: &FilteredComplex, coefficients: Coefficients) -> Result<SpectralPage, ChainError> {
    let r = fc.length() + 1;
    Ok(spectral_pages(fc, coefficients, r)?.pop().expect("at least one page"))
}

fn page_in(fc: &FilteredComplex, ch: Characteristic, r: u32) -> SpectralPage {
    let dims = if ch.is_rational() {
        PageBuilder { field: Rationals, fc }.page(r)
    } else {
        PageBuilder { field: PrimeField::new(ch.get()), fc }.page(r)
    };
    SpectralPage { r, characteristic: ch, dims }
}

struct PageBuilder<'a, F: Field> {
    field: F,
    fc: &'a FilteredComplex,
}

impl<F: Field> PageBuilder<'_, F> {
    fn dense(&self, m: &IntegerMatrix) -> FieldMatrix<F::Elem> {
        let mut out = field::zeros(&self.field, m.nrows(), m.ncols());
        for (r, c, v) in m.entries() {
            out[r][c] = self.field.from_bigint(v);
        }
        out
    }

    /// Generators of `degree` with level at most `p` (`p < 0` selects none).
    fn sub(&self, degree: i64, p: i64) -> Vec<usize> {
        self.fc
            .levels_in(degree)
            .iter()
            .enumerate()
            .filter(|(_, &l)| i64::from(l) <= p)
            .map(|(i, _)| i)
            .collect()
    }

    /// Generators of `degree` with level strictly above `p`.
    fn above(&self, degree: i64, p: i64) -> Vec<usize> {
        self.fc
            .levels_in(degree)
            .iter()
            .enumerate()
            .filter(|(_, &l)| i64::from(l) > p)
            .map(|(i, _)| i)
            .collect()
    }

    fn restrict(&self, d: &FieldMatrix<F::Elem>, rows: &[usize], cols: &[usize]) -> FieldMatrix<F::Elem> {
        rows.iter().map(|&r| cols.iter().map(|&c| d[r][c].clone()).collect()).collect()
    }

    /// Basis of `{x ∈ F_p C_n : ∂x ∈ F_q C_{n-1}}`, as vectors in `C_n`.
    fn relative_cycles(&self, d: &FieldMatrix<F::Elem>, n: i64, p: i64, q: i64) -> Vec<Vec<F::Elem>> {
        let cols = self.sub(n, p);
        let rows = self.above(n - 1, q);
        let block = self.restrict(d, &rows, &cols);
        let dim = self.fc.ambient.rank(n);
        field::kernel_basis(&self.field, &block, cols.len())
            .into_iter()
            .map(|v| {
                let mut full = vec![self.field.zero(); dim];
                for (k, &c) in cols.iter().enumerate() {
                    full[c] = v[k].clone();
                }
                full
            })
            .collect()
    }

    fn apply(&self, d: &FieldMatrix<F::Elem>, v: &[F::Elem]) -> Vec<F::Elem> {
        d.iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .fold(self.field.zero(), |acc, (a, b)| self.field.add(&acc, &self.field.mul(a, b)))
            })
            .collect()
    }

    fn page(&self, r: u32) -> BTreeMap<(i64, i64), usize> {
        let mut dims = BTreeMap::new();
        let Some((lo, hi)) = self.fc.level_range() else {
            return dims;
        };
        let r = i64::from(r);
        let amb = &self.fc.ambient;
        for n in amb.degrees() {
            let d_n = self.dense(&amb.boundary(n));
            let d_up = self.dense(&amb.boundary(n + 1));
            for p in i64::from(lo)..=i64::from(hi) {
                let z = self.relative_cycles(&d_n, n, p, p - r);
                if z.is_empty() {
                    continue;
                }
                let mut denominator = self.relative_cycles(&d_n, n, p - 1, p - r);
                let pre = self.relative_cycles(&d_up, n + 1, p + r - 1, p);
                denominator.extend(pre.iter().map(|v| self.apply(&d_up, v)));
                let dim = z.len() - field::span_rank(&self.field, &denominator);
                if dim > 0 {
                    dims.insert((p, n - p), dim);
                }
            }
        }
        dims
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle() -> ChainComplex {
        ChainComplex::new(0, vec![1, 1], vec![IntegerMatrix::zeros(1, 1)]).unwrap()
    }

    fn rp2() -> ChainComplex {
        ChainComplex::new(0, vec![1, 1, 1], vec![IntegerMatrix::zeros(1, 1), IntegerMatrix::from_i64(&[&[2]])]).unwrap()
    }

    fn point() -> ChainComplex {
        ChainComplex::new(0, vec![1], vec![]).unwrap()
    }

    fn groups(c: &ChainComplex) -> Vec<String> {
        homology_integral_all(c).unwrap().into_iter().map(|(_, g)| g.to_string()).collect()
    }

    #[test]
    fn validation() {
        assert!(validate_complex(&circle()).is_ok());
        assert!(validate_complex(&ChainComplex::zero()).is_ok());
        let bad = ChainComplex::new(
            0,
            vec![1, 1, 1],
            vec![IntegerMatrix::from_i64(&[&[1]]), IntegerMatrix::from_i64(&[&[1]])],
        )
        .unwrap();
        assert_eq!(validate_complex(&bad), Err(ChainError::NotAComplex { degree: 2 }));
        assert!(matches!(homology_integral(&bad, 1), Err(ChainError::NotAComplex { degree: 2 })));
    }

    #[test]
    fn boundary_shapes_are_checked() {
        let err = ChainComplex::new(0, vec![1, 2], vec![IntegerMatrix::zeros(2, 1)]);
        assert!(matches!(err, Err(ChainError::BoundaryShape { degree: 1, .. })));
    }

    #[test]
    fn integral_homology_examples() {
        assert_eq!(groups(&circle()), ["Z", "Z"]);
        assert_eq!(groups(&rp2()), ["Z", "Z/2", "0"]);
        assert_eq!(homology_integral(&rp2(), 1).unwrap(), AbelianGroupInvariants::cyclic(2));
        assert!(homology_integral(&rp2(), 7).unwrap().is_trivial());
    }

    #[test]
    fn field_homology_examples() {
        assert_eq!(homology_field_dims(&rp2(), 2).unwrap(), vec![1, 1, 1]);
        assert_eq!(homology_field_dims(&rp2(), 0).unwrap(), vec![1, 0, 0]);
        assert_eq!(homology_field_dims(&circle(), 5).unwrap(), vec![1, 1]);
        assert!(matches!(homology_field_dims(&circle(), 6), Err(ChainError::Linalg(_))));
    }

    #[test]
    fn cones() {
        let id = ChainMap::identity(&circle());
        let cone = mapping_cone(&id).unwrap();
        assert!(homology_integral_all(&cone).unwrap().iter().all(|(_, g)| g.is_trivial()));

        let z = point();
        let times_two = ChainMap::new(z.clone(), z.clone(), BTreeMap::from([(0, IntegerMatrix::from_i64(&[&[2]]))])).unwrap();
        let cone = mapping_cone(&times_two).unwrap();
        assert_eq!(groups(&cone), ["Z/2", "0"]);

        let zero = ChainMap::zero(&circle(), &circle());
        let cone = mapping_cone(&zero).unwrap();
        assert_eq!(homology_field_dims(&cone, 0).unwrap(), vec![1, 2, 1]);
    }

    #[test]
    fn cone_ranks_and_block_signs() {
        let c = rp2();
        let cone = mapping_cone(&ChainMap::identity(&c)).unwrap();
        assert_eq!(cone.ranks(), &[1, 2, 2, 1]);
        // degree 3 boundary is [[id_2], [-∂_2]] = [[1], [-2]]
        assert_eq!(cone.boundary(3), IntegerMatrix::from_i64(&[&[1], &[-2]]));
    }

    #[test]
    fn non_chain_map_rejected() {
        let c = rp2();
        let blocks = BTreeMap::from([(1, IntegerMatrix::from_i64(&[&[1]]))]);
        let f = ChainMap::new(c.clone(), c, blocks).unwrap();
        assert!(matches!(mapping_cone(&f), Err(ChainError::NotAChainMap { .. })));
    }

    #[test]
    fn suspensions() {
        let s = suspension(&circle()).unwrap();
        assert_eq!(s.bottom_degree(), 0);
        assert_eq!(homology_field_dims(&s, 0).unwrap(), vec![0, 0, 1]);
        let s = suspension(&point()).unwrap();
        assert!(homology_field_dims(&s, 0).unwrap().iter().all(|&d| d == 0));
        // empty space suspends to S^0, reduced
        let s = suspension(&ChainComplex::zero()).unwrap();
        assert_eq!(homology_field_dims(&s, 0).unwrap(), vec![1]);
        let s = suspension(&rp2()).unwrap();
        assert_eq!(groups(&s), ["0", "0", "Z/2", "0"]);
    }

    #[test]
    fn augmentation_requires_balanced_boundaries() {
        let c = ChainComplex::new(0, vec![1, 1], vec![IntegerMatrix::from_i64(&[&[1]])]).unwrap();
        assert_eq!(c.augmented(), Err(ChainError::NotAugmentable));
        let neg = circle().shift(-1);
        assert!(matches!(neg.augmented(), Err(ChainError::NegativeDegree(-1))));
    }

    #[test]
    fn circle_pages() {
        let fc = FilteredComplex::new(circle(), vec![vec![0], vec![1]]).unwrap();
        let pages = spectral_pages(&fc, Coefficients::field(2).unwrap(), 3).unwrap();
        assert_eq!(pages[0].get(0, 0), 1);
        assert_eq!(pages[0].get(1, 0), 1);
        for page in &pages {
            assert_eq!(page.total(0), 1);
            assert_eq!(page.total(1), 1);
        }
        assert!(matches!(spectral_pages(&fc, Coefficients::Integers, 2), Err(ChainError::IntegralCoefficients)));
    }

    #[test]
    fn d1_kills_an_interval() {
        // interval: two vertices at level 0, edge at level 1; d1 has rank 1.
        let c = ChainComplex::new(0, vec![2, 1], vec![IntegerMatrix::from_i64(&[&[-1], &[1]])]).unwrap();
        let fc = FilteredComplex::new(c, vec![vec![0, 0], vec![1]]).unwrap();
        let pages = spectral_pages(&fc, Coefficients::field(3).unwrap(), 2).unwrap();
        assert_eq!(pages[0].get(0, 0), 2);
        assert_eq!(pages[0].get(1, 0), 1);
        assert_eq!(pages[1].get(0, 0), 1);
        assert_eq!(pages[1].get(1, 0), 0);
    }

    #[test]
    fn higher_differential() {
        // x in degree 1 at level 2 with ∂x = y, y in degree 0 at level 0:
        // survives E^1 and E^2, killed by d^2.
        let c = ChainComplex::new(0, vec![1, 1], vec![IntegerMatrix::from_i64(&[&[1]])]).unwrap();
        let fc = FilteredComplex::new(c, vec![vec![0], vec![2]]).unwrap();
        let pages = spectral_pages(&fc, Coefficients::field(0).unwrap(), 3).unwrap();
        assert_eq!(pages[0].get(2, -1), 1);
        assert_eq!(pages[1].get(2, -1), 1);
        assert_eq!(pages[2].get(2, -1), 0);
        assert_eq!(pages[2].get(0, 0), 0);
    }

    #[test]
    fn filtration_must_not_rise() {
        let c = ChainComplex::new(0, vec![1, 1], vec![IntegerMatrix::from_i64(&[&[1]])]).unwrap();
        assert!(matches!(
            FilteredComplex::new(c, vec![vec![3], vec![1]]),
            Err(ChainError::FiltrationRaised { degree: 1, index: 0 })
        ));
    }

    #[test]
    fn cycle_basis_of_circle_edges() {
        // two vertices, two edges both from v0 to v1: cycle e0 - e1.
        let c = ChainComplex::new(0, vec![2, 2], vec![IntegerMatrix::from_i64(&[&[-1, -1], &[1, 1]])]).unwrap();
        let z = integral_cycle_basis(&c, 1);
        assert_eq!(z.shape(), (2, 1));
        assert!(c.boundary(1).mul(&z).unwrap().is_zero());
        let v = (z.get(0, 0).unwrap(), z.get(1, 0).unwrap());
        assert_eq!(v.0, -v.1.clone());
        assert!(num_traits::Signed::abs(&v.0).is_one());
    }
}
