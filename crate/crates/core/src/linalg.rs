//! Small dense/banded eigenvalue helpers.
//!
//! The error estimator needs extreme eigenvalues of symmetric parts of
//! operators. For general matrices this is a dense symmetric eigensolve; for
//! tridiagonal symmetric parts (the 1D stencils evaluated at every time step
//! of every selected trajectory) a Sturm-sequence bisection is used instead,
//! which is orders of magnitude cheaper.

use ndarray::{Array2, ArrayView2};
use ndarray_linalg::{Eigh, UPLO};

use crate::error::{CoreError, Result};
use crate::sparse::CsrMatrix;

/// Extreme eigenvalues (min, max) of a dense symmetric matrix.
pub fn sym_eig_extremes_dense(sym: ArrayView2<'_, f64>) -> Result<(f64, f64)> {
    let (vals, _) = sym.eigh(UPLO::Lower).map_err(|e| CoreError::Numeric {
        context: "symmetric eigensolve",
        detail: e.to_string(),
    })?;
    // eigh returns ascending eigenvalues
    Ok((vals[0], vals[vals.len() - 1]))
}

/// Extreme eigenvalues (min, max) of the symmetric part `(A + A^T)/2` of a
/// sparse matrix. Dispatches to the tridiagonal bisection when the symmetric
/// part is tridiagonal.
pub fn sym_part_extremes(a: &CsrMatrix) -> Result<(f64, f64)> {
    assert_eq!(a.nrows(), a.ncols(), "square matrix required");
    let n = a.nrows();
    if n == 0 {
        return Ok((0.0, 0.0));
    }
    if a.half_bandwidth() <= 1 {
        let (diag, off) = sym_tridiagonal_part(a);
        return Ok(sym_tridiagonal_extremes(&diag, &off));
    }
    let dense = a.to_dense();
    let sym = 0.5 * (&dense + &dense.t());
    sym_eig_extremes_dense(sym.view())
}

/// Extreme eigenvalues of the symmetric part of a dense matrix.
pub fn sym_part_extremes_dense(a: ArrayView2<'_, f64>) -> Result<(f64, f64)> {
    assert_eq!(a.nrows(), a.ncols(), "square matrix required");
    let sym: Array2<f64> = 0.5 * (&a + &a.t());
    sym_eig_extremes_dense(sym.view())
}

/// Diagonal and off-diagonal of the symmetric part of a matrix with half
/// bandwidth <= 1.
fn sym_tridiagonal_part(a: &CsrMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = a.nrows();
    let mut diag = vec![0.0; n];
    let mut upper = vec![0.0; n.saturating_sub(1)];
    let mut lower = vec![0.0; n.saturating_sub(1)];
    for r in 0..n {
        let (cols, vals) = a.row(r);
        for (&c, &v) in cols.iter().zip(vals) {
            if c == r {
                diag[r] = v;
            } else if c == r + 1 {
                upper[r] = v;
            } else if c + 1 == r {
                lower[c] = v;
            }
        }
    }
    let off: Vec<f64> = upper
        .iter()
        .zip(&lower)
        .map(|(u, l)| 0.5 * (u + l))
        .collect();
    (diag, off)
}

/// Number of eigenvalues of the symmetric tridiagonal matrix strictly below
/// `x`, by counting sign changes in the Sturm sequence.
fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let n = diag.len();
    let mut count = 0;
    let mut q = diag[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..n {
        let e2 = off[i - 1] * off[i - 1];
        let denom = if q == 0.0 { f64::MIN_POSITIVE } else { q };
        q = diag[i] - x - e2 / denom;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Extreme eigenvalues of a symmetric tridiagonal matrix via bisection on
/// Sturm counts. Gershgorin discs bracket the spectrum.
pub fn sym_tridiagonal_extremes(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let n = diag.len();
    assert!(n >= 1 && off.len() + 1 == n);
    if n == 1 {
        return (diag[0], diag[0]);
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let mut radius = 0.0;
        if i > 0 {
            radius += off[i - 1].abs();
        }
        if i + 1 < n {
            radius += off[i].abs();
        }
        lo = lo.min(diag[i] - radius);
        hi = hi.max(diag[i] + radius);
    }
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    let bisect = |want_below: usize| -> f64 {
        let (mut a, mut b) = (lo, hi);
        // ~80 iterations reach f64 resolution for any bracket
        for _ in 0..80 {
            let mid = 0.5 * (a + b);
            if sturm_count(diag, off, mid) >= want_below {
                b = mid;
            } else {
                a = mid;
            }
            if b - a <= 1e-15 * scale {
                break;
            }
        }
        0.5 * (a + b)
    };
    let lambda_min = bisect(1);
    let lambda_max = bisect(n);
    (lambda_min, lambda_max)
}
