use std::fmt;

use crate::algebra::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::limits::check_dim;

/// A matrix whose every column is a unit vector, `δ_s[i_1, …, i_r]`.
///
/// Stored as the row index of the single 1 in each column. Row indices are
/// 1-based to match δ notation; the slice position is the (0-based) column.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LogicalMatrix {
    rows: usize,
    indices: Vec<usize>,
}

impl LogicalMatrix {
    /// `δ_rows[indices…]`. Every index must lie in `[1, rows]`.
    pub fn new(rows: usize, indices: Vec<usize>) -> Result<Self> {
        if rows == 0 || indices.is_empty() {
            return Err(Error::shape(
                "LogicalMatrix::new",
                "dimensions must be positive",
            ));
        }
        check_dim("logical matrix", &[rows])?;
        check_dim("logical matrix", &[indices.len()])?;
        if let Some(&bad) = indices.iter().find(|&&i| i == 0 || i > rows) {
            return Err(Error::OutOfRange {
                value: bad,
                min: 1,
                max: rows,
            });
        }
        Ok(LogicalMatrix { rows, indices })
    }

    pub(crate) fn from_parts(rows: usize, indices: Vec<usize>) -> Self {
        debug_assert!(indices.iter().all(|&i| i >= 1 && i <= rows));
        LogicalMatrix { rows, indices }
    }

    pub fn identity(n: usize) -> Result<Self> {
        check_dim("identity", &[n])?;
        Self::new(n, (1..=n).collect())
    }

    /// The unit column vector `δ_k^i` (1-based `i`).
    pub fn unit(k: usize, i: usize) -> Result<Self> {
        Self::new(k, vec![i])
    }

    /// `1_nᵀ` as the logical matrix `δ_1[1, …, 1]`.
    pub fn ones_row(n: usize) -> Result<Self> {
        check_dim("ones row", &[n])?;
        Self::new(1, vec![1; n])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.indices.len()
    }

    /// 1-based row index of the 1 in each column.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// 1-based row index of the 1 in the zero-based column `col`.
    #[inline]
    pub fn index(&self, col: usize) -> usize {
        self.indices[col]
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let cols = self.cols();
        let mut data = vec![0.0; self.rows * cols];
        for (c, &r) in self.indices.iter().enumerate() {
            data[(r - 1) * cols + c] = 1.0;
        }
        DenseMatrix::from_parts(self.rows, cols, data)
    }

    /// Recognizes a dense 0/1 matrix with exactly one 1 per column.
    pub fn from_dense(m: &DenseMatrix) -> Option<Self> {
        let mut indices = Vec::with_capacity(m.cols());
        for c in 0..m.cols() {
            let mut hit = None;
            for r in 0..m.rows() {
                match m.get(r, c) {
                    0.0 => {}
                    v if v == 1.0 && hit.is_none() => hit = Some(r + 1),
                    _ => return None,
                }
            }
            indices.push(hit?);
        }
        Some(LogicalMatrix::from_parts(m.rows(), indices))
    }

    /// True when this is a square matrix with distinct column indices.
    pub fn is_permutation(&self) -> bool {
        if self.rows != self.cols() {
            return false;
        }
        let mut seen = vec![false; self.rows];
        self.indices
            .iter()
            .all(|&i| !std::mem::replace(&mut seen[i - 1], true))
    }

    /// `self ⊗ I_n`.
    pub fn kron_identity(&self, n: usize) -> Result<Self> {
        let rows = check_dim("kron with identity", &[self.rows, n])?;
        check_dim("kron with identity", &[self.cols(), n])?;
        let indices = self
            .indices
            .iter()
            .flat_map(|&r| (0..n).map(move |v| (r - 1) * n + v + 1))
            .collect();
        Ok(LogicalMatrix::from_parts(rows, indices))
    }

    /// Logical Kronecker product: also a logical matrix.
    pub fn kron(&self, other: &LogicalMatrix) -> Result<Self> {
        let rows = check_dim("logical kron", &[self.rows, other.rows])?;
        check_dim("logical kron", &[self.cols(), other.cols()])?;
        let indices = self
            .indices
            .iter()
            .flat_map(|&a| other.indices.iter().map(move |&b| (a - 1) * other.rows + b))
            .collect();
        Ok(LogicalMatrix::from_parts(rows, indices))
    }
}

impl fmt::Display for LogicalMatrix {
    /// Prints as `delta 4 [1,3,2,4]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "delta {} [", self.rows)?;
        for (n, i) in self.indices.iter().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for LogicalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
