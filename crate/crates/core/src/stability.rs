//! Stability systems over the rationals, stabilisation onsets of computed
//! tables, and the τ divisibility experiment.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::chains::{homology_integral, integral_cycle_basis, ChainComplex, ChainError, ChainMap};
use crate::exact_linalg::field::{self, Rationals};
use crate::exact_linalg::{cokernel_invariants, AbelianGroupInvariants, IntegerMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StabilityError {
    #[error("shape mismatch in {what}: expected {expected:?}, found {found:?}")]
    Shape { what: String, expected: (usize, usize), found: (usize, usize) },
    #[error("t_n i_(n-1) = i_(n-2) t_(n-1) + Id fails at n = {0}")]
    RelationFails(usize),
    #[error("iterated transfer needs m <= n <= N, got n = {n}, m = {m}, N = {len}")]
    TransferRange { n: usize, m: usize, len: usize },
    #[error("{given} summand dimensions given for a system of length {len}")]
    TooManySummands { given: usize, len: usize },
    #[error("table rows have different lengths")]
    RaggedTable,
    #[error("dimension must be at least 2, got {0}")]
    Dimension(usize),
    #[error(transparent)]
    Chain(#[from] ChainError),
}

/// Dense matrix over `Q` with explicit shape.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix { rows, cols, data: vec![BigRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, BigRational::one())
    }

    pub fn scalar(n: usize, k: BigRational) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = k.clone();
        }
        m
    }

    pub fn from_i64(rows: usize, cols: usize, values: &[i64]) -> Self {
        assert_eq!(values.len(), rows * cols, "value count");
        RationalMatrix { rows, cols, data: values.iter().map(|&v| BigRational::from_integer(v.into())).collect() }
    }

    fn from_field(rows: usize, cols: usize, m: field::FieldMatrix<BigRational>) -> Self {
        RationalMatrix { rows, cols, data: m.into_iter().flatten().collect() }
    }

    fn to_field(&self) -> field::FieldMatrix<BigRational> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, r: usize, c: usize) -> &BigRational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigRational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[BigRational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn mul(&self, other: &RationalMatrix) -> Result<RationalMatrix, StabilityError> {
        if self.cols != other.rows {
            return Err(StabilityError::Shape {
                what: "product".into(),
                expected: (self.cols, other.cols),
                found: other.shape(),
            });
        }
        // integer product over a common denominator, reduced once per entry
        let (a, da) = self.integral_parts();
        let (b, db) = other.integral_parts();
        let denom = da * db;
        let mut data = Vec::with_capacity(self.rows * other.cols);
        let mut acc = vec![BigInt::zero(); other.cols];
        for i in 0..self.rows {
            acc.iter_mut().for_each(|x| x.set_zero());
            for k in 0..self.cols {
                let x = &a[i * self.cols + k];
                if x.is_zero() {
                    continue;
                }
                for (j, y) in b[k * other.cols..(k + 1) * other.cols].iter().enumerate() {
                    if !y.is_zero() {
                        acc[j] += x * y;
                    }
                }
            }
            data.extend(acc.iter().map(|v| BigRational::new(v.clone(), denom.clone())));
        }
        Ok(RationalMatrix { rows: self.rows, cols: other.cols, data })
    }

    /// Integer entries and a common denominator `d` with `self = entries / d`.
    fn integral_parts(&self) -> (Vec<BigInt>, BigInt) {
        let d = self.data.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let entries = self.data.iter().map(|x| x.numer() * (&d / x.denom())).collect();
        (entries, d)
    }

    pub fn add(&self, other: &RationalMatrix) -> Result<RationalMatrix, StabilityError> {
        if self.shape() != other.shape() {
            return Err(StabilityError::Shape { what: "sum".into(), expected: self.shape(), found: other.shape() });
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(RationalMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, k: &BigRational) -> RationalMatrix {
        RationalMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * k).collect() }
    }

    pub fn rank(&self) -> usize {
        field::rank(&Rationals, &self.to_field())
    }

    pub fn inverse(&self) -> Option<RationalMatrix> {
        if self.rows != self.cols {
            return None;
        }
        field::inverse(&Rationals, &self.to_field()).map(|m| Self::from_field(self.rows, self.cols, m))
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    /// Rows `start..end` as a new matrix.
    pub fn row_block(&self, start: usize, end: usize) -> RationalMatrix {
        RationalMatrix { rows: end - start, cols: self.cols, data: self.data[start * self.cols..end * self.cols].to_vec() }
    }

    /// Vertical concatenation; all blocks must have `cols` columns.
    pub fn stack(cols: usize, blocks: &[RationalMatrix]) -> RationalMatrix {
        let mut data = Vec::new();
        let mut rows = 0;
        for b in blocks {
            assert_eq!(b.cols, cols, "stacked blocks need equal widths");
            rows += b.rows;
            data.extend_from_slice(&b.data);
        }
        RationalMatrix { rows, cols, data }
    }
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(ToString::to_string).collect();
            write!(f, "{}[{}]", if r > 0 { ", " } else { "" }, row.join(" "))?;
        }
        write!(f, "]")
    }
}

/// Spaces `A_0..A_N` with stabilisation `i_n : A_n -> A_{n+1}` and transfer
/// `t_n : A_n -> A_{n-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoldSystem {
    dims: Vec<usize>,
    // stab[n] = i_n, n = 0..N-1
    stab: Vec<RationalMatrix>,
    // trans[n-1] = t_n, n = 1..N
    trans: Vec<RationalMatrix>,
}

impl DoldSystem {
    pub fn new(dims: Vec<usize>, stab: Vec<RationalMatrix>, trans: Vec<RationalMatrix>) -> Result<Self, StabilityError> {
        let len = dims.len().saturating_sub(1);
        if dims.is_empty() || stab.len() != len || trans.len() != len {
            return Err(StabilityError::Shape {
                what: "map counts".into(),
                expected: (len, len),
                found: (stab.len(), trans.len()),
            });
        }
        for n in 0..len {
            if stab[n].shape() != (dims[n + 1], dims[n]) {
                return Err(StabilityError::Shape {
                    what: format!("i_{n}"),
                    expected: (dims[n + 1], dims[n]),
                    found: stab[n].shape(),
                });
            }
            if trans[n].shape() != (dims[n], dims[n + 1]) {
                return Err(StabilityError::Shape {
                    what: format!("t_{}", n + 1),
                    expected: (dims[n], dims[n + 1]),
                    found: trans[n].shape(),
                });
            }
        }
        Ok(DoldSystem { dims, stab, trans })
    }

    /// `a_n = 1`, `i_n = (1)`, `t_n = (n)`: the system on `H_0`.
    pub fn h0(len: usize) -> Self {
        let stab = (0..len).map(|_| RationalMatrix::identity(1)).collect();
        let trans = (1..=len).map(|n| RationalMatrix::from_i64(1, 1, &[n as i64])).collect();
        DoldSystem { dims: vec![1; len + 1], stab, trans }
    }

    /// `N`.
    pub fn len(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn stab(&self, n: usize) -> &RationalMatrix {
        &self.stab[n]
    }

    pub fn trans(&self, n: usize) -> &RationalMatrix {
        &self.trans[n - 1]
    }

    pub fn trans_mut(&mut self, n: usize) -> &mut RationalMatrix {
        &mut self.trans[n - 1]
    }
}

/// Checks `t_n i_{n-1} = i_{n-2} t_{n-1} + Id` for `n = 1..N`, where the
/// middle term is absent for `n = 1`.
pub fn verify_dold_relations(s: &DoldSystem) -> Result<(), StabilityError> {
    for n in 1..=s.len() {
        let lhs = s.trans(n).mul(s.stab(n - 1))?;
        let id = RationalMatrix::identity(s.dims[n - 1]);
        let rhs = if n == 1 { id } else { s.stab(n - 2).mul(s.trans(n - 1))?.add(&id)? };
        if lhs != rhs {
            return Err(StabilityError::RelationFails(n));
        }
    }
    Ok(())
}

fn factorial(k: usize) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, j| acc * j)
}

fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// `t_{n,m} = (t_{m+1} ⋯ t_n) / (n - m)!`, a map `A_n -> A_m`.
pub fn iterated_transfer(s: &DoldSystem, n: usize, m: usize) -> Result<RationalMatrix, StabilityError> {
    if m > n || n > s.len() {
        return Err(StabilityError::TransferRange { n, m, len: s.len() });
    }
    let mut acc = RationalMatrix::identity(s.dims[n]);
    for j in (m + 1..=n).rev() {
        acc = s.trans(j).mul(&acc)?;
    }
    Ok(acc.scale(&BigRational::new(BigInt::one(), factorial(n - m))))
}

/// `[t_{n,0}, t_{n,1}, ..., t_{n,n}]`, sharing the partial products.
pub fn iterated_transfers_from(s: &DoldSystem, n: usize) -> Result<Vec<RationalMatrix>, StabilityError> {
    if n > s.len() {
        return Err(StabilityError::TransferRange { n, m: 0, len: s.len() });
    }
    let mut acc = RationalMatrix::identity(s.dims[n]);
    let mut out = vec![acc.clone()];
    for m in (0..n).rev() {
        acc = s.trans(m + 1).mul(&acc)?;
        out.push(acc.scale(&BigRational::new(BigInt::one(), factorial(n - m))));
    }
    out.reverse();
    Ok(out)
}

/// Checks `t_{m,k} t_{n,m} = binom(n-k, n-m) t_{n,k}` for all `k <= m <= n <= N`.
pub fn check_transfer_composition(s: &DoldSystem) -> Result<(), StabilityError> {
    let len = s.len();
    let mut t: BTreeMap<(usize, usize), RationalMatrix> = BTreeMap::new();
    for n in 0..=len {
        for (m, tm) in iterated_transfers_from(s, n)?.into_iter().enumerate() {
            t.insert((n, m), tm);
        }
    }
    for n in 0..=len {
        for m in 0..=n {
            for k in 0..=m {
                let lhs = t[&(m, k)].mul(&t[&(n, m)])?;
                let rhs = t[&(n, k)].scale(&BigRational::from_integer(binomial(n - k, n - m)));
                if lhs != rhs {
                    return Err(StabilityError::RelationFails(n));
                }
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoldDecomposition {
    /// `b_n = dim coker(i_{n-1})`.
    pub b_dims: Vec<usize>,
    /// `A_n -> B_n`, killing the image of `i_{n-1}`.
    pub projections: Vec<RationalMatrix>,
    /// `Φ_n : A_n -> B_n ⊕ B_{n-1} ⊕ ⋯ ⊕ B_0`.
    pub phi: Vec<RationalMatrix>,
    /// Every `Φ_n` is invertible.
    pub iso: bool,
    /// Every `t_{n+1} i_n` is invertible.
    pub composites_invertible: bool,
    /// `observed_scalars[n][m]`: the scalar by which `t_{n+1} i_n` acts on
    /// the `B_m` summand in `Φ_n` coordinates, if it acts by a scalar.
    pub observed_scalars: Vec<Vec<Option<BigRational>>>,
}

/// Projection `A_n -> B_n` with kernel `im(i)`; the complement is spanned by
/// the unit vectors that are pivots of `[i | Id]` past the columns of `i`.
fn cokernel_projection(i: &RationalMatrix) -> RationalMatrix {
    let (a, prev) = i.shape();
    let mut aug: field::FieldMatrix<BigRational> = (0..a)
        .map(|r| {
            let mut row = i.row(r).to_vec();
            row.extend((0..a).map(|c| if c == r { BigRational::one() } else { BigRational::zero() }));
            row
        })
        .collect();
    let pivots = field::rref(&Rationals, &mut aug);
    let image_cols: Vec<usize> = pivots.iter().copied().filter(|&c| c < prev).collect();
    let complement: Vec<usize> = pivots.iter().copied().filter(|&c| c >= prev).map(|c| c - prev).collect();
    let mut basis = RationalMatrix::zeros(a, a);
    for (j, &c) in image_cols.iter().enumerate() {
        for r in 0..a {
            basis.set(r, j, i.get(r, c).clone());
        }
    }
    for (j, &c) in complement.iter().enumerate() {
        basis.set(c, image_cols.len() + j, BigRational::one());
    }
    let inv = basis.inverse().expect("image columns plus complement form a basis");
    inv.row_block(image_cols.len(), a)
}

/// Reads off the scalar by which a block-diagonal matrix acts on each block.
fn block_scalars(m: &RationalMatrix, blocks: &[usize]) -> Vec<Option<BigRational>> {
    let mut offsets = Vec::with_capacity(blocks.len());
    let mut o = 0;
    for &b in blocks {
        offsets.push(o);
        o += b;
    }
    blocks
        .iter()
        .zip(&offsets)
        .map(|(&b, &start)| {
            if b == 0 {
                return None;
            }
            let k = m.get(start, start).clone();
            let ok = (0..m.shape().0).all(|r| {
                (start..start + b).all(|c| {
                    let expected = if r == c { k.clone() } else { BigRational::zero() };
                    *m.get(r, c) == expected
                })
            });
            ok.then_some(k)
        })
        .collect()
}

pub fn dold_decompose(s: &DoldSystem) -> Result<DoldDecomposition, StabilityError> {
    verify_dold_relations(s)?;
    let len = s.len();
    let mut projections = Vec::with_capacity(len + 1);
    projections.push(RationalMatrix::identity(s.dims[0]));
    for n in 1..=len {
        projections.push(cokernel_projection(s.stab(n - 1)));
    }
    let b_dims: Vec<usize> = projections.iter().map(|p| p.shape().0).collect();

    let mut phi = Vec::with_capacity(len + 1);
    for n in 0..=len {
        let transfers = iterated_transfers_from(s, n)?;
        let components = (0..=n)
            .rev()
            .map(|m| projections[m].mul(&transfers[m]))
            .collect::<Result<Vec<_>, _>>()?;
        phi.push(RationalMatrix::stack(s.dims[n], &components));
    }
    let iso = phi.iter().all(RationalMatrix::is_invertible);

    let mut composites_invertible = true;
    let mut observed_scalars = Vec::with_capacity(len);
    for n in 0..len {
        let composite = s.trans(n + 1).mul(s.stab(n))?;
        composites_invertible &= composite.is_invertible();
        let blocks: Vec<usize> = (0..=n).rev().map(|m| b_dims[m]).collect();
        let mut scalars = match phi[n].inverse() {
            Some(inv) => block_scalars(&phi[n].mul(&composite)?.mul(&inv)?, &blocks),
            None => vec![None; n + 1],
        };
        scalars.reverse();
        observed_scalars.push(scalars);
    }
    Ok(DoldDecomposition { b_dims, projections, phi, iso, composites_invertible, observed_scalars })
}

fn padded_b_dims(len: usize, b_dims: &[usize]) -> Result<Vec<usize>, StabilityError> {
    if b_dims.len() > len + 1 {
        return Err(StabilityError::TooManySummands { given: b_dims.len(), len });
    }
    let mut b = b_dims.to_vec();
    b.resize(len + 1, 0);
    Ok(b)
}

/// `A_n = ⊕_{m<=n} B_m`, `i_n` the inclusion, `t_n` the scalar `n - m` on `B_m`.
pub fn canonical_dold_system(len: usize, b_dims: &[usize]) -> Result<DoldSystem, StabilityError> {
    let b = padded_b_dims(len, b_dims)?;
    let dims: Vec<usize> = (0..=len).map(|n| b[..=n].iter().sum()).collect();
    let stab = (0..len)
        .map(|n| {
            let mut m = RationalMatrix::zeros(dims[n + 1], dims[n]);
            for j in 0..dims[n] {
                m.set(j, j, BigRational::one());
            }
            m
        })
        .collect();
    let trans = (1..=len)
        .map(|n| {
            let mut m = RationalMatrix::zeros(dims[n - 1], dims[n]);
            let mut offset = 0;
            for (summand, &size) in b[..n].iter().enumerate() {
                for j in offset..offset + size {
                    m.set(j, j, BigRational::from_integer(BigInt::from(n - summand)));
                }
                offset += size;
            }
            m
        })
        .collect();
    DoldSystem::new(dims, stab, trans)
}

/// Invertible matrix with every entry in `{-3, ..., 3} \ {0}`.
fn random_invertible(rng: &mut ChaCha8Rng, n: usize) -> (RationalMatrix, RationalMatrix) {
    loop {
        let values: Vec<i64> = (0..n * n)
            .map(|_| {
                let v: i64 = rng.gen_range(1..=3);
                if rng.gen_bool(0.5) { v } else { -v }
            })
            .collect();
        let p = RationalMatrix::from_i64(n, n, &values);
        if let Some(inv) = p.inverse() {
            return (p, inv);
        }
    }
}

/// The canonical system conjugated by seeded random invertible matrices
/// `P_n`; deterministic in `seed`.
pub fn random_dold_system(seed: u64, len: usize, b_dims: &[usize]) -> Result<DoldSystem, StabilityError> {
    let canonical = canonical_dold_system(len, b_dims)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let conj: Vec<(RationalMatrix, RationalMatrix)> =
        canonical.dims.iter().map(|&a| random_invertible(&mut rng, a)).collect();
    let stab = (0..len)
        .map(|n| conj[n + 1].0.mul(canonical.stab(n))?.mul(&conj[n].1))
        .collect::<Result<Vec<_>, _>>()?;
    let trans = (1..=len)
        .map(|n| conj[n - 1].0.mul(canonical.trans(n))?.mul(&conj[n].1))
        .collect::<Result<Vec<_>, _>>()?;
    DoldSystem::new(canonical.dims, stab, trans)
}

/// `dims[i][n - first_n]` for degrees `i` and consecutive `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilityTable {
    first_n: usize,
    dims: Vec<Vec<usize>>,
    label: String,
}

impl StabilityTable {
    pub fn new(first_n: usize, dims: Vec<Vec<usize>>, label: &str) -> Result<Self, StabilityError> {
        if dims.windows(2).any(|w| w[0].len() != w[1].len()) {
            return Err(StabilityError::RaggedTable);
        }
        Ok(StabilityTable { first_n, dims, label: label.to_string() })
    }

    pub fn first_n(&self) -> usize {
        self.first_n
    }

    pub fn last_n(&self) -> Option<usize> {
        let cols = self.num_columns();
        (cols > 0).then(|| self.first_n + cols - 1)
    }

    pub fn num_columns(&self) -> usize {
        self.dims.first().map_or(0, Vec::len)
    }

    pub fn degrees(&self) -> usize {
        self.dims.len()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.dims[i]
    }

    pub fn get(&self, i: usize, n: usize) -> usize {
        self.dims[i][n - self.first_n]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilityOnset {
    pub degree: usize,
    /// Smallest `N` with the row constant from `N` to the last column, or
    /// `None` if the last two columns differ or there is only one column.
    pub onset: Option<usize>,
    /// The table does not contradict stability from `n = 2i` on.
    pub within_bound: bool,
    /// The row is nondecreasing in `n`.
    pub monotone: bool,
}

pub fn stability_range(t: &StabilityTable) -> Vec<StabilityOnset> {
    let cols = t.num_columns();
    (0..t.degrees())
        .map(|i| {
            let row = t.row(i);
            let onset = if cols < 2 || row[cols - 1] != row[cols - 2] {
                None
            } else {
                let start = (0..cols).rev().take_while(|&c| row[c] == row[cols - 1]).last().unwrap_or(cols - 1);
                Some(t.first_n + start)
            };
            let within_bound = match onset {
                Some(n) => n <= (2 * i).max(t.first_n),
                None => cols > 0 && 2 * i >= t.first_n + cols - 1,
            };
            let monotone = row.windows(2).all(|w| w[0] <= w[1]);
            StabilityOnset { degree: i, onset, within_bound, monotone }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TauImage {
    Zero,
    Index(BigInt),
    InfiniteIndex,
}

impl fmt::Display for TauImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TauImage::Zero => write!(f, "zero"),
            TauImage::Index(k) => write!(f, "index {k}"),
            TauImage::InfiniteIndex => write!(f, "infinite index"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TauResult {
    pub d: usize,
    pub source_group: AbelianGroupInvariants,
    pub target_group: AbelianGroupInvariants,
    pub image: TauImage,
}

/// `S^{d-1}` with cells `e_k, T e_k` for `k = 0..d`, ordered `(e_k, T e_k)`, and
/// `∂ e_k = e_{k-1} + (-1)^k T e_{k-1}`.
pub fn equivariant_sphere(d: usize) -> ChainComplex {
    let maps = (1..d)
        .map(|k| {
            let s = if k % 2 == 0 { 1 } else { -1 };
            IntegerMatrix::from_i64(&[&[1, s], &[s, 1]])
        })
        .collect();
    ChainComplex::new(0, vec![2; d], maps).expect("consistent shapes")
}

/// `RP^{d-1}` with one cell per degree and `∂_k = 1 + (-1)^k`.
pub fn projective_space(d: usize) -> ChainComplex {
    let maps = (1..d).map(|k| IntegerMatrix::from_i64(&[&[if k % 2 == 0 { 2 } else { 0 }]])).collect();
    ChainComplex::new(0, vec![1; d], maps).expect("consistent shapes")
}

/// The quotient map `S^{d-1} -> RP^{d-1}`.
pub fn sphere_quotient(d: usize) -> Result<ChainMap, StabilityError> {
    let source = equivariant_sphere(d);
    let target = projective_space(d);
    let blocks = (0..d as i64).map(|k| (k, IntegerMatrix::from_i64(&[&[1, 1]]))).collect();
    let q = ChainMap::new(source, target, blocks)?;
    q.validate()?;
    Ok(q)
}

/// Coordinates of `y` in the columns of `basis`, which must have full
/// column rank; `None` unless they exist and are integral.
fn integral_coordinates(basis: &IntegerMatrix, y: &[BigInt]) -> Option<Vec<BigInt>> {
    let (rows, cols) = basis.shape();
    let dense = basis.to_dense();
    let mut aug: field::FieldMatrix<BigRational> = (0..rows)
        .map(|r| {
            let mut row: Vec<BigRational> = dense[r].iter().map(|v| BigRational::from_integer(v.clone())).collect();
            row.push(BigRational::from_integer(y[r].clone()));
            row
        })
        .collect();
    let pivots = field::rref(&Rationals, &mut aug);
    if pivots.len() != cols || pivots.contains(&cols) {
        return None;
    }
    pivots
        .iter()
        .enumerate()
        .map(|(r, _)| {
            let v = &aug[r][cols];
            v.is_integer().then(|| v.to_integer())
        })
        .collect()
}

/// Image of `H_{d-1}(S^{d-1}) -> H_{d-1}(RP^{d-1})` under the quotient map.
pub fn tau_experiment(d: usize) -> Result<TauResult, StabilityError> {
    if d < 2 {
        return Err(StabilityError::Dimension(d));
    }
    let q = sphere_quotient(d)?;
    let top = d as i64 - 1;
    let source_group = homology_integral(q.source(), top)?;
    let target_group = homology_integral(q.target(), top)?;
    // nothing above the top degree, so top homology is the cycle lattice
    let z_source = integral_cycle_basis(q.source(), top);
    let z_target = integral_cycle_basis(q.target(), top);
    let pushed = q.block(top).mul(&z_source).map_err(ChainError::from)?.to_dense();
    let (t_rows, t_cols) = z_target.shape();
    let mut triplets = Vec::new();
    for c in 0..z_source.ncols() {
        let y: Vec<BigInt> = (0..t_rows).map(|r| pushed[r][c].clone()).collect();
        let coords = integral_coordinates(&z_target, &y).expect("image of a cycle is a cycle");
        triplets.extend(coords.into_iter().enumerate().map(|(r, v)| (r, c, v)));
    }
    let image = IntegerMatrix::from_triplets(t_cols, z_source.ncols(), triplets).map_err(ChainError::from)?;
    let image = if image.is_zero() {
        TauImage::Zero
    } else {
        let coker = cokernel_invariants(&image);
        if coker.free_rank > 0 {
            TauImage::InfiniteIndex
        } else {
            TauImage::Index(coker.torsion.iter().fold(BigInt::one(), |acc, t| acc * t))
        }
    };
    Ok(TauResult { d, source_group, target_group, image })
}

impl TauResult {
    /// The index as a machine integer, `Some(0)` for the zero image.
    pub fn index_value(&self) -> Option<u64> {
        match &self.image {
            TauImage::Zero => Some(0),
            TauImage::Index(k) => k.to_u64(),
            TauImage::InfiniteIndex => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> BigRational {
        BigRational::from_integer(v.into())
    }

    #[test]
    fn h0_system() {
        let s = DoldSystem::h0(5);
        assert!(verify_dold_relations(&s).is_ok());
        for n in 0..=5 {
            assert_eq!(iterated_transfer(&s, n, 0).unwrap(), RationalMatrix::identity(1));
            assert_eq!(iterated_transfer(&s, n, n).unwrap(), RationalMatrix::identity(1));
        }
        let dec = dold_decompose(&s).unwrap();
        assert_eq!(dec.b_dims, vec![1, 0, 0, 0, 0, 0]);
        assert!(dec.iso && dec.composites_invertible);
        assert_eq!(dec.observed_scalars[2], vec![Some(q(3)), None, None]);
        assert!(matches!(iterated_transfer(&s, 2, 3), Err(StabilityError::TransferRange { .. })));
    }

    #[test]
    fn canonical_transfers_are_binomials() {
        let s = canonical_dold_system(5, &[1, 1, 1, 1, 1, 1]).unwrap();
        check_transfer_composition(&s).unwrap();
        for n in 0..=5 {
            for m in 0..=n {
                let t = iterated_transfer(&s, n, m).unwrap();
                for j in 0..=m {
                    let expected = BigRational::from_integer(binomial(n - j, n - m));
                    assert_eq!(t.get(j, j), &expected, "n={n} m={m} j={j}");
                }
            }
        }
    }

    #[test]
    fn canonical_decomposition() {
        let s = canonical_dold_system(3, &[1, 2, 0, 3]).unwrap();
        assert_eq!(s.dims(), &[1, 3, 3, 6]);
        let dec = dold_decompose(&s).unwrap();
        assert_eq!(dec.b_dims, vec![1, 2, 0, 3]);
        assert!(dec.iso && dec.composites_invertible);
        // t_{n+1} i_n acts by n + 1 - m on B_m
        assert_eq!(dec.observed_scalars[2], vec![Some(q(3)), Some(q(2)), None]);
    }

    #[test]
    fn perturbation_detected() {
        let mut s = canonical_dold_system(4, &[1, 1, 1, 1, 1]).unwrap();
        let v = s.trans(3).get(0, 3).clone();
        s.trans_mut(3).set(0, 3, v + q(1));
        assert!(matches!(verify_dold_relations(&s), Err(StabilityError::RelationFails(3 | 4))));
        assert!(dold_decompose(&s).is_err());
    }

    #[test]
    fn random_systems() {
        let a = random_dold_system(7, 5, &[1, 2, 0, 3]).unwrap();
        assert_eq!(a, random_dold_system(7, 5, &[1, 2, 0, 3]).unwrap());
        assert_ne!(a, random_dold_system(8, 5, &[1, 2, 0, 3]).unwrap());
        verify_dold_relations(&a).unwrap();
        let dec = dold_decompose(&a).unwrap();
        assert_eq!(dec.b_dims, vec![1, 2, 0, 3, 0, 0]);
        assert!(dec.iso && dec.composites_invertible);
        assert_eq!(dec.observed_scalars[3], vec![Some(q(4)), Some(q(3)), None, Some(q(1))]);
        assert!(matches!(random_dold_system(1, 1, &[1, 1, 1]), Err(StabilityError::TooManySummands { .. })));

        let one = random_dold_system(3, 4, &[1]).unwrap();
        assert_eq!(one.dims(), &[1, 1, 1, 1, 1]);
        for n in 1..=4 {
            assert_eq!(one.trans(n).mul(one.stab(n - 1)).unwrap(), RationalMatrix::from_i64(1, 1, &[n as i64]));
        }
    }

    #[test]
    fn shapes_checked() {
        let bad = DoldSystem::new(vec![1, 2], vec![RationalMatrix::zeros(2, 1)], vec![RationalMatrix::zeros(2, 1)]);
        assert!(matches!(bad, Err(StabilityError::Shape { .. })));
    }

    #[test]
    fn onsets() {
        let constant = StabilityTable::new(1, vec![vec![1, 1, 1, 1]], "c").unwrap();
        assert_eq!(stability_range(&constant)[0].onset, Some(1));
        let t = StabilityTable::new(1, vec![vec![1, 1, 1, 1], vec![0, 1, 1, 1], vec![0, 0, 1, 2]], "t").unwrap();
        let r = stability_range(&t);
        assert_eq!(r.iter().map(|o| o.onset).collect::<Vec<_>>(), vec![Some(1), Some(2), None]);
        assert!(r.iter().all(|o| o.within_bound && o.monotone));
        let oscillating = StabilityTable::new(2, vec![vec![1, 0, 0, 1, 0, 0, 1]], "mod 3").unwrap();
        assert_eq!(stability_range(&oscillating)[0].onset, None);
        assert!(!stability_range(&oscillating)[0].monotone);
        assert!(StabilityTable::new(1, vec![vec![1], vec![1, 2]], "x").is_err());
    }

    #[test]
    fn tau_small_dimensions() {
        let r = tau_experiment(2).unwrap();
        assert_eq!((r.target_group.to_string(), r.image.clone()), ("Z".to_string(), TauImage::Index(2.into())));
        let r = tau_experiment(3).unwrap();
        assert_eq!((r.target_group.to_string(), r.image), ("0".to_string(), TauImage::Zero));
        let r = tau_experiment(4).unwrap();
        assert_eq!((r.source_group.to_string(), r.image.to_string()), ("Z".to_string(), "index 2".to_string()));
        assert!(tau_experiment(1).is_err());
    }
}
