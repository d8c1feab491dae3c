use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::LinalgError;

/// Exact integer matrix with row-wise sparse storage.
///
/// Each row keeps its nonzero entries sorted by column. Explicit zeros are
/// never stored, so equality of two matrices is equality of their entries.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<(usize, BigInt)>>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix { rows, cols, data: vec![Vec::new(); rows] }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, BigInt::one())
    }

    pub fn scalar(n: usize, value: BigInt) -> Self {
        let mut m = Self::zeros(n, n);
        if !value.is_zero() {
            for (i, row) in m.data.iter_mut().enumerate() {
                row.push((i, value.clone()));
            }
        }
        m
    }

    /// Builds a matrix from dense rows. All rows must have equal length;
    /// `cols` fixes the width when there are no rows.
    pub fn from_rows<T>(rows: &[Vec<T>], cols: usize) -> Result<Self, LinalgError>
    where
        T: Clone + Into<BigInt>,
    {
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(LinalgError::RaggedRows { row: r, expected: cols, found: row.len() });
            }
            for (c, v) in row.iter().enumerate() {
                let v: BigInt = v.clone().into();
                if !v.is_zero() {
                    m.data[r].push((c, v));
                }
            }
        }
        Ok(m)
    }

    /// Convenience constructor for small literal matrices. Panics on ragged input.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let owned: Vec<Vec<i64>> = rows.iter().map(|r| r.to_vec()).collect();
        Self::from_rows(&owned, cols).expect("ragged literal matrix")
    }

    /// Builds a matrix from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets<I>(rows: usize, cols: usize, entries: I) -> Result<Self, LinalgError>
    where
        I: IntoIterator<Item = (usize, usize, BigInt)>,
    {
        let mut data: Vec<Vec<(usize, BigInt)>> = vec![Vec::new(); rows];
        for (r, c, v) in entries {
            if r >= rows || c >= cols {
                return Err(LinalgError::IndexOutOfBounds { row: r, col: c, rows, cols });
            }
            data[r].push((c, v));
        }
        for row in &mut data {
            row.sort_by_key(|(c, _)| *c);
            let mut merged: Vec<(usize, BigInt)> = Vec::with_capacity(row.len());
            for (c, v) in row.drain(..) {
                match merged.last_mut() {
                    Some((lc, lv)) if *lc == c => *lv += v,
                    _ => merged.push((c, v)),
                }
            }
            merged.retain(|(_, v)| !v.is_zero());
            *row = merged;
        }
        Ok(IntegerMatrix { rows, cols, data })
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Vec::is_empty)
    }

    fn check(&self, row: usize, col: usize) -> Result<(), LinalgError> {
        if row >= self.rows || col >= self.cols {
            return Err(LinalgError::IndexOutOfBounds { row, col, rows: self.rows, cols: self.cols });
        }
        Ok(())
    }

    pub fn get(&self, row: usize, col: usize) -> Result<BigInt, LinalgError> {
        self.check(row, col)?;
        let r = &self.data[row];
        Ok(match r.binary_search_by_key(&col, |(c, _)| *c) {
            Ok(i) => r[i].1.clone(),
            Err(_) => BigInt::zero(),
        })
    }

    pub fn set(&mut self, row: usize, col: usize, value: BigInt) -> Result<(), LinalgError> {
        self.check(row, col)?;
        let r = &mut self.data[row];
        match r.binary_search_by_key(&col, |(c, _)| *c) {
            Ok(i) if value.is_zero() => {
                r.remove(i);
            }
            Ok(i) => r[i].1 = value,
            Err(_) if value.is_zero() => {}
            Err(i) => r.insert(i, (col, value)),
        }
        Ok(())
    }

    /// Nonzero entries of one row, sorted by column.
    pub fn row_entries(&self, row: usize) -> &[(usize, BigInt)] {
        &self.data[row]
    }

    /// All nonzero entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &BigInt)> + '_ {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |(c, v)| (r, *c, v)))
    }

    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        let mut out = vec![vec![BigInt::zero(); self.cols]; self.rows];
        for (r, c, v) in self.entries() {
            out[r][c] = v.clone();
        }
        out
    }

    pub fn from_dense(rows: Vec<Vec<BigInt>>, cols: usize) -> Result<Self, LinalgError> {
        Self::from_rows(&rows, cols)
    }

    pub fn transpose(&self) -> Self {
        let mut data: Vec<Vec<(usize, BigInt)>> = vec![Vec::new(); self.cols];
        for (r, c, v) in self.entries() {
            data[c].push((r, v.clone()));
        }
        IntegerMatrix { rows: self.cols, cols: self.rows, data }
    }

    pub fn mul(&self, other: &IntegerMatrix) -> Result<IntegerMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::ShapeMismatch {
                op: "mul",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut data = Vec::with_capacity(self.rows);
        let mut acc: Vec<BigInt> = vec![BigInt::zero(); other.cols];
        let mut touched: Vec<usize> = Vec::new();
        for row in &self.data {
            for (k, a) in row {
                for (c, b) in &other.data[*k] {
                    if acc[*c].is_zero() {
                        touched.push(*c);
                    }
                    acc[*c] += a * b;
                }
            }
            touched.sort_unstable();
            touched.dedup();
            let mut out_row = Vec::new();
            for &c in &touched {
                let v = std::mem::take(&mut acc[c]);
                if !v.is_zero() {
                    out_row.push((c, v));
                }
            }
            touched.clear();
            data.push(out_row);
        }
        Ok(IntegerMatrix { rows: self.rows, cols: other.cols, data })
    }

    pub fn add(&self, other: &IntegerMatrix) -> Result<IntegerMatrix, LinalgError> {
        if self.shape() != other.shape() {
            return Err(LinalgError::ShapeMismatch {
                op: "add",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let entries = self
            .entries()
            .chain(other.entries())
            .map(|(r, c, v)| (r, c, v.clone()));
        Self::from_triplets(self.rows, self.cols, entries)
    }

    pub fn scale(&self, k: &BigInt) -> IntegerMatrix {
        if k.is_zero() {
            return Self::zeros(self.rows, self.cols);
        }
        let data = self
            .data
            .iter()
            .map(|row| row.iter().map(|(c, v)| (*c, v * k)).collect())
            .collect();
        IntegerMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn neg(&self) -> IntegerMatrix {
        self.scale(&BigInt::from(-1))
    }

    /// Places `blocks[i][j]` in a block grid. Row heights come from the first
    /// block column, column widths from the first block row; every block
    /// must agree with them.
    pub fn block(blocks: &[Vec<&IntegerMatrix>]) -> Result<IntegerMatrix, LinalgError> {
        let heights: Vec<usize> = blocks.iter().map(|row| row.first().map_or(0, |b| b.rows)).collect();
        let widths: Vec<usize> = blocks.first().map_or(Vec::new(), |row| row.iter().map(|b| b.cols).collect());
        let total_rows: usize = heights.iter().sum();
        let total_cols: usize = widths.iter().sum();
        let mut triplets = Vec::new();
        let mut r0 = 0;
        for (bi, row) in blocks.iter().enumerate() {
            if row.len() != widths.len() {
                return Err(LinalgError::ShapeMismatch {
                    op: "block",
                    left: (bi, row.len()),
                    right: (bi, widths.len()),
                });
            }
            let mut c0 = 0;
            for (bj, b) in row.iter().enumerate() {
                if b.shape() != (heights[bi], widths[bj]) {
                    return Err(LinalgError::ShapeMismatch {
                        op: "block",
                        left: b.shape(),
                        right: (heights[bi], widths[bj]),
                    });
                }
                for (r, c, v) in b.entries() {
                    triplets.push((r0 + r, c0 + c, v.clone()));
                }
                c0 += widths[bj];
            }
            r0 += heights[bi];
        }
        Self::from_triplets(total_rows, total_cols, triplets)
    }

    /// Diagonal matrix of the given shape.
    pub fn diagonal(rows: usize, cols: usize, diag: &[BigInt]) -> Result<IntegerMatrix, LinalgError> {
        Self::from_triplets(rows, cols, diag.iter().enumerate().map(|(i, d)| (i, i, d.clone())))
    }

    /// Determinant by fraction-free (Bareiss) elimination. Square matrices only.
    pub fn determinant(&self) -> Result<BigInt, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::ShapeMismatch { op: "determinant", left: self.shape(), right: self.shape() });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a = self.to_dense();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                    a[i][j] = v;
                }
            }
            prev = a[k][k].clone();
        }
        Ok(sign * &a[n - 1][n - 1])
    }
}

impl fmt::Debug for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntegerMatrix({}x{})", self.rows, self.cols)?;
        if self.rows * self.cols <= 64 {
            write!(f, " [")?;
            for (i, row) in self.to_dense().iter().enumerate() {
                if i > 0 {
                    write!(f, "; ")?;
                }
                let s: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                write!(f, "{}", s.join(" "))?;
            }
            write!(f, "]")?;
        } else {
            write!(f, " nnz={}", self.nnz())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn out_of_range_access_is_an_error() {
        let m = IntegerMatrix::zeros(2, 3);
        assert!(m.get(1, 2).is_ok());
        assert!(matches!(m.get(2, 0), Err(LinalgError::IndexOutOfBounds { .. })));
        assert!(matches!(m.get(0, 3), Err(LinalgError::IndexOutOfBounds { .. })));
        let mut m = m;
        assert!(m.set(5, 5, BigInt::one()).is_err());
    }

    #[test]
    fn set_zero_removes_entry() {
        let mut m = IntegerMatrix::zeros(2, 2);
        m.set(0, 1, BigInt::from(3)).unwrap();
        assert_eq!(m.nnz(), 1);
        m.set(0, 1, BigInt::zero()).unwrap();
        assert_eq!(m, IntegerMatrix::zeros(2, 2));
    }

    #[test]
    fn triplets_sum_duplicates_and_drop_zeros() {
        let m = IntegerMatrix::from_triplets(
            1,
            2,
            vec![(0, 0, BigInt::from(2)), (0, 0, BigInt::from(-2)), (0, 1, BigInt::from(1)), (0, 1, BigInt::from(4))],
        )
        .unwrap();
        assert_eq!(m, IntegerMatrix::from_i64(&[&[0, 5]]));
    }

    #[test]
    fn product_and_transpose() {
        let a = IntegerMatrix::from_i64(&[&[1, 2], &[3, 4]]);
        let b = IntegerMatrix::from_i64(&[&[0, 1], &[1, 0]]);
        assert_eq!(a.mul(&b).unwrap(), IntegerMatrix::from_i64(&[&[2, 1], &[4, 3]]));
        assert_eq!(a.transpose(), IntegerMatrix::from_i64(&[&[1, 3], &[2, 4]]));
        assert!(a.mul(&IntegerMatrix::zeros(3, 1)).is_err());
    }

    #[test]
    fn empty_shapes_multiply() {
        let a = IntegerMatrix::zeros(2, 0);
        let b = IntegerMatrix::zeros(0, 3);
        assert_eq!(a.mul(&b).unwrap(), IntegerMatrix::zeros(2, 3));
    }

    #[test]
    fn bareiss_determinant() {
        let a = IntegerMatrix::from_i64(&[&[2, 4], &[6, 8]]);
        assert_eq!(a.determinant().unwrap(), BigInt::from(-8));
        let b = IntegerMatrix::from_i64(&[&[0, 1, 2], &[1, 0, 3], &[4, -3, 8]]);
        assert_eq!(b.determinant().unwrap(), BigInt::from(-2));
    }

    #[test]
    fn block_layout() {
        let a = IntegerMatrix::from_i64(&[&[1]]);
        let z = IntegerMatrix::zeros(1, 2);
        let b = IntegerMatrix::from_i64(&[&[2, 3]]);
        let zc = IntegerMatrix::zeros(1, 1);
        let m = IntegerMatrix::block(&[vec![&a, &b], vec![&zc, &z]]).unwrap();
        assert_eq!(m, IntegerMatrix::from_i64(&[&[1, 2, 3], &[0, 0, 0]]));
    }
}
