//! Sparse matrices and finite chain complexes.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Column-major sparse matrix. Each column is sorted by row with no zero
/// entries and no duplicate rows.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseMatrix<T> {
    rows: usize,
    cols: usize,
    columns: Vec<Vec<(u32, T)>>,
}

/// Integer matrix with arbitrary-precision entries.
pub type SparseIntMatrix = SparseMatrix<BigInt>;

impl<T> SparseMatrix<T>
where
    T: Clone + Zero + std::ops::AddAssign,
{
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            columns: vec![Vec::new(); cols],
        }
    }

    /// Builds a matrix from `(row, col, value)` triples, summing duplicates
    /// and dropping zeros.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, T)>,
    ) -> Self {
        let mut acc: Vec<BTreeMap<u32, T>> = vec![BTreeMap::new(); cols];
        for (r, c, v) in triplets {
            assert!(r < rows && c < cols, "entry ({r}, {c}) outside {rows}x{cols}");
            let slot = acc[c].entry(r as u32).or_insert_with(T::zero);
            *slot += v;
        }
        let columns = acc
            .into_iter()
            .map(|col| col.into_iter().filter(|(_, v)| !v.is_zero()).collect())
            .collect();
        SparseMatrix {
            rows,
            cols,
            columns,
        }
    }

    /// Builds a matrix from already-sorted, zero-free columns.
    pub fn from_columns(rows: usize, columns: Vec<Vec<(u32, T)>>) -> Self {
        debug_assert!(columns.iter().all(|c| {
            c.windows(2).all(|w| w[0].0 < w[1].0)
                && c.iter().all(|(r, v)| (*r as usize) < rows && !v.is_zero())
        }));
        SparseMatrix {
            rows,
            cols: columns.len(),
            columns,
        }
    }
}

impl<T> SparseMatrix<T> {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, c: usize) -> &[(u32, T)] {
        &self.columns[c]
    }

    pub fn columns(&self) -> &[Vec<(u32, T)>] {
        &self.columns
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &T)> + '_ {
        self.columns
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |(r, v)| (*r as usize, c, v)))
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> SparseMatrix<U> {
        SparseMatrix {
            rows: self.rows,
            cols: self.cols,
            columns: self
                .columns
                .iter()
                .map(|col| col.iter().map(|(r, v)| (*r, f(v))).collect())
                .collect(),
        }
    }
}

impl SparseMatrix<i64> {
    pub fn to_bigint(&self) -> SparseIntMatrix {
        self.map(|&v| BigInt::from(v))
    }

    /// `self * rhs`, or an error when the inner dimensions disagree.
    pub fn compose(&self, rhs: &SparseMatrix<i64>) -> Result<SparseMatrix<i64>> {
        if self.cols != rhs.rows {
            return Err(Error::Inconsistent(format!(
                "cannot compose {}x{} with {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut columns = Vec::with_capacity(rhs.cols);
        for col in &rhs.columns {
            let mut acc: BTreeMap<u32, i64> = BTreeMap::new();
            for &(k, a) in col {
                for &(r, b) in &self.columns[k as usize] {
                    *acc.entry(r).or_insert(0) += a * b;
                }
            }
            columns.push(acc.into_iter().filter(|(_, v)| *v != 0).collect());
        }
        Ok(SparseMatrix {
            rows: self.rows,
            cols: rhs.cols,
            columns,
        })
    }
}

/// A finite chain complex `C_top -> ... -> C_1 -> C_0 -> 0` with integer
/// boundary matrices; `boundary(k)` maps `C_k` to `C_{k-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainComplex {
    dims: Vec<usize>,
    // boundaries[k] : C_k -> C_{k-1}; boundaries[0] is the zero map to 0.
    boundaries: Vec<SparseMatrix<i64>>,
}

impl ChainComplex {
    /// `boundaries[k-1]` is the map `C_k -> C_{k-1}` for `k = 1..dims.len()`.
    pub fn new(dims: Vec<usize>, boundaries: Vec<SparseMatrix<i64>>) -> Result<Self> {
        if dims.is_empty() {
            return Ok(ChainComplex {
                dims,
                boundaries: Vec::new(),
            });
        }
        if boundaries.len() + 1 != dims.len() {
            return Err(Error::Inconsistent(format!(
                "{} chain groups need {} boundary maps, got {}",
                dims.len(),
                dims.len() - 1,
                boundaries.len()
            )));
        }
        let mut all = Vec::with_capacity(dims.len());
        all.push(SparseMatrix::zeros(0, dims[0]));
        for (k, b) in boundaries.into_iter().enumerate() {
            if b.rows() != dims[k] || b.cols() != dims[k + 1] {
                return Err(Error::Inconsistent(format!(
                    "boundary {} has shape {}x{}, expected {}x{}",
                    k + 1,
                    b.rows(),
                    b.cols(),
                    dims[k],
                    dims[k + 1]
                )));
            }
            all.push(b);
        }
        Ok(ChainComplex {
            dims,
            boundaries: all,
        })
    }

    pub fn empty() -> Self {
        ChainComplex {
            dims: Vec::new(),
            boundaries: Vec::new(),
        }
    }

    /// Number of chain groups (top degree + 1).
    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.iter().all(|&d| d == 0)
    }

    pub fn dim(&self, k: usize) -> usize {
        self.dims.get(k).copied().unwrap_or(0)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// `C_k -> C_{k-1}`, or `None` when `k` is zero or out of range.
    pub fn boundary(&self, k: usize) -> Option<&SparseMatrix<i64>> {
        if k == 0 {
            None
        } else {
            self.boundaries.get(k)
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims
            .iter()
            .enumerate()
            .map(|(k, &d)| if k % 2 == 0 { d as i64 } else { -(d as i64) })
            .sum()
    }

    /// Verifies that consecutive boundary maps compose to zero.
    pub fn check_d_squared(&self) -> Result<()> {
        for k in 2..self.dims.len() {
            let prod = self.boundaries[k - 1].compose(&self.boundaries[k])?;
            if prod.nnz() != 0 {
                return Err(Error::Inconsistent(format!(
                    "boundary squared is nonzero in degree {k}"
                )));
            }
        }
        Ok(())
    }
}
