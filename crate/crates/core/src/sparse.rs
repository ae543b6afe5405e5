//! Minimal compressed sparse row matrix.
//!
//! All benchmark operators are banded (tridiagonal or 5-point stencils), so a
//! plain CSR with matrix-vector products and a dense conversion covers every
//! need of the offline phase. Row access is exposed for stencil analysis.

use ndarray::{Array1, Array2, ArrayView1};

/// Immutable sparse matrix in compressed sparse row format.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Build from (row, col, value) triplets. Duplicate entries are summed.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut per_row: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nrows];
        for &(r, c, v) in triplets {
            assert!(r < nrows && c < ncols, "triplet ({r}, {c}) out of bounds");
            per_row[r].push((c, v));
        }
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for row in &mut per_row {
            row.sort_by_key(|&(c, _)| c);
            let mut last: Option<usize> = None;
            for &(c, v) in row.iter() {
                if last == Some(c) {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_idx.push(c);
                    values.push(v);
                    last = Some(c);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self { nrows, ncols, row_ptr, col_idx, values }
    }

    /// Zero matrix with no stored entries.
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            row_ptr: vec![0; nrows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Identity of size `n`.
    pub fn identity(n: usize) -> Self {
        Self {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Number of stored entries.
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of row `r`.
    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let lo = self.row_ptr[r];
        let hi = self.row_ptr[r + 1];
        (&self.col_idx[lo..hi], &self.values[lo..hi])
    }

    /// `y = self * x`.
    pub fn matvec(&self, x: ArrayView1<'_, f64>) -> Array1<f64> {
        assert_eq!(x.len(), self.ncols, "matvec dimension mismatch");
        let mut y = Array1::zeros(self.nrows);
        self.matvec_into(x, &mut y);
        y
    }

    /// `y = self * x` into a preallocated vector.
    pub fn matvec_into(&self, x: ArrayView1<'_, f64>, y: &mut Array1<f64>) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            let mut acc = 0.0;
            for (&c, &v) in cols.iter().zip(vals) {
                acc += v * x[c];
            }
            y[r] = acc;
        }
    }

    /// `y += alpha * self * x`.
    pub fn matvec_acc(&self, alpha: f64, x: ArrayView1<'_, f64>, y: &mut Array1<f64>) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            let mut acc = 0.0;
            for (&c, &v) in cols.iter().zip(vals) {
                acc += v * x[c];
            }
            y[r] += alpha * acc;
        }
    }

    /// Dense product `self * M` for a tall-skinny dense right factor.
    pub fn matmul_dense(&self, m: &Array2<f64>) -> Array2<f64> {
        assert_eq!(m.nrows(), self.ncols, "matmul dimension mismatch");
        let k = m.ncols();
        let mut out = Array2::zeros((self.nrows, k));
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                for j in 0..k {
                    out[[r, j]] += v * m[[c, j]];
                }
            }
        }
        out
    }

    /// Dense copy.
    pub fn to_dense(&self) -> Array2<f64> {
        let mut out = Array2::zeros((self.nrows, self.ncols));
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                out[[r, c]] += v;
            }
        }
        out
    }

    /// Half bandwidth: max |i - j| over stored entries (0 for diagonal).
    pub fn half_bandwidth(&self) -> usize {
        let mut b = 0usize;
        for r in 0..self.nrows {
            let (cols, _) = self.row(r);
            for &c in cols {
                b = b.max(r.abs_diff(c));
            }
        }
        b
    }

    /// Scale all stored values by `alpha`, returning a new matrix.
    pub fn scaled(&self, alpha: f64) -> Self {
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= alpha;
        }
        out
    }
}
