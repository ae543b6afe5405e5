//! Empirical interpolation of nonlinear flux snapshots.
//!
//! The interpolation basis is obtained from a POD of the flux snapshot matrix
//! and the interpolation ("magic") indices from the discrete greedy rule:
//! each new index is the largest-magnitude component of the residual of
//! interpolating the next basis vector with the current operator. The
//! operator order `m` is the smallest one for which the worst training
//! snapshot is approximated below the requested tolerance.

use ndarray::{s, Array1, Array2, ArrayView1, ArrayView2};
use ndarray_linalg::{Inverse, JobSvd, SVDDC};

use crate::error::{CoreError, Result};
use crate::pod::RANK_CUTOFF;

/// Interpolation operator for a nonlinear flux on a time-independent basis.
#[derive(Debug, Clone)]
pub struct EimOperator {
    /// Interpolation basis, `d x m`.
    basis: Array2<f64>,
    /// Interpolation indices, pairwise distinct.
    magic_indices: Vec<usize>,
    /// Combined operator `basis * (P^T basis)^{-1}`, `d x m`.
    combined: Array2<f64>,
    tolerance: f64,
    achieved_error: f64,
    converged: bool,
    condition: f64,
    /// `(order, max training error)` at each order where the error was
    /// evaluated.
    error_history: Vec<(usize, f64)>,
}

impl EimOperator {
    pub fn order(&self) -> usize {
        self.magic_indices.len()
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> ArrayView2<'_, f64> {
        self.basis.view()
    }

    pub fn magic_indices(&self) -> &[usize] {
        &self.magic_indices
    }

    /// `U_m = H_m (P^T H_m)^{-1}`.
    pub fn combined(&self) -> ArrayView2<'_, f64> {
        self.combined.view()
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Worst training-snapshot error at the final order.
    pub fn achieved_error(&self) -> f64 {
        self.achieved_error
    }

    pub fn converged(&self) -> bool {
        self.converged
    }

    /// Condition number of `P^T H_m` at the final order.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn error_history(&self) -> &[(usize, f64)] {
        &self.error_history
    }

    /// Sampled values `P^T v` of a full-space vector.
    pub fn sample(&self, v: ArrayView1<'_, f64>) -> Array1<f64> {
        Array1::from_iter(self.magic_indices.iter().map(|&j| v[j]))
    }

    /// Full-space interpolant `U_m w` from sampled values `w`.
    pub fn lift(&self, sampled: ArrayView1<'_, f64>) -> Array1<f64> {
        self.combined.dot(&sampled)
    }

    /// Interpolant `U_m P^T v` of a full-space vector.
    pub fn interpolate(&self, v: ArrayView1<'_, f64>) -> Array1<f64> {
        self.lift(self.sample(v).view())
    }

    /// Rebuild with given parts; used by artifact deserialization.
    pub fn from_parts(
        basis: Array2<f64>,
        magic_indices: Vec<usize>,
        combined: Array2<f64>,
        tolerance: f64,
        achieved_error: f64,
        converged: bool,
        condition: f64,
        error_history: Vec<(usize, f64)>,
    ) -> Self {
        Self {
            basis,
            magic_indices,
            combined,
            tolerance,
            achieved_error,
            converged,
            condition,
            error_history,
        }
    }
}

/// Apply a precomputed `r x m` premultiplier to sampled flux values; this is
/// the whole online cost of the nonlinear term.
pub fn eim_reduced_apply(
    premultiplier: ArrayView2<'_, f64>,
    sampled: ArrayView1<'_, f64>,
) -> Result<Array1<f64>> {
    if premultiplier.ncols() != sampled.len() {
        return Err(CoreError::Shape {
            context: "eim_reduced_apply",
            expected: format!("{} sampled values", premultiplier.ncols()),
            actual: sampled.len().to_string(),
        });
    }
    Ok(premultiplier.dot(&sampled))
}

/// Snapshot count below which the training error is evaluated at every order
/// (above it, orders that a cheap lower bound already rules out are skipped).
const EXHAUSTIVE_ERROR_LIMIT: usize = 512;

/// Build an interpolation operator from flux snapshots.
///
/// The order grows until the worst training-snapshot error drops below
/// `tolerance` (absolute state-space norm), capped at the numerical rank of
/// the snapshot matrix; an unreachable tolerance yields the full-rank
/// operator with `converged() == false`.
pub fn build_eim(snapshots: ArrayView2<'_, f64>, tolerance: f64) -> Result<EimOperator> {
    let (d, num_snaps) = snapshots.dim();
    if num_snaps == 0 || d == 0 {
        return Err(CoreError::Validation {
            context: "eim snapshots",
            detail: "need at least one snapshot".into(),
        });
    }
    if !(tolerance > 0.0) {
        return Err(CoreError::Validation {
            context: "eim tolerance",
            detail: format!("tolerance must be positive, got {tolerance}"),
        });
    }

    let (u, sv, vt) = snapshots
        .to_owned()
        .svddc(JobSvd::Some)
        .map_err(|e| CoreError::Numeric { context: "eim svd", detail: e.to_string() })?;
    let u = u.expect("left vectors requested");
    let vt = vt.expect("right vectors requested");
    let s0 = sv.first().copied().unwrap_or(0.0);
    if s0 == 0.0 {
        return Err(CoreError::Numeric {
            context: "eim construction",
            detail: "all snapshots are zero".into(),
        });
    }
    let rank = sv.iter().take_while(|s| **s > RANK_CUTOFF * s0 && **s > 0.0).count();
    let full = sv.len();

    // coefficients of every snapshot in the left-singular basis:
    // snapshots = U * diag(sv) * Vt, so gamma = diag(sv) * Vt
    let mut gamma = vt.to_owned();
    for (i, s) in sv.iter().enumerate() {
        gamma.row_mut(i).mapv_inplace(|v| v * s);
    }
    // suffix energy: tail2[m][j] = sum_{i >= m} gamma[i][j]^2
    let mut tail2 = vec![vec![0.0; num_snaps]; full + 1];
    for m in (0..full).rev() {
        for j in 0..num_snaps {
            tail2[m][j] = tail2[m + 1][j] + gamma[[m, j]] * gamma[[m, j]];
        }
    }
    let exhaustive = num_snaps <= EXHAUSTIVE_ERROR_LIMIT;

    let mut magic: Vec<usize> = Vec::new();
    let mut history: Vec<(usize, f64)> = Vec::new();
    let mut achieved_error = f64::INFINITY;
    let mut converged = false;

    for l in 0..rank {
        let hl = u.column(l);
        let residual: Array1<f64> = if l == 0 {
            hl.to_owned()
        } else {
            // interpolate mode l with the current operator and keep the defect
            let a = submatrix(&u, &magic, l);
            let rhs = Array1::from_iter(magic.iter().map(|&j| hl[j]));
            let coeffs = solve_small(&a, &rhs)?;
            &hl - &u.slice(s![.., ..l]).dot(&coeffs)
        };
        let (jl, max_abs) = argmax_abs(residual.view());
        if max_abs == 0.0 {
            return Err(CoreError::Numeric {
                context: "eim construction",
                detail: format!("vanishing interpolation residual at order {}", l + 1),
            });
        }
        magic.push(jl);
        let m = l + 1;

        // cheap lower bound: the POD truncation part of the error alone
        let tail_bound = tail2[m].iter().cloned().fold(0.0_f64, f64::max).sqrt();
        if !exhaustive && tail_bound >= tolerance && m < rank {
            continue;
        }
        let err = max_training_error(&u, &gamma, &tail2, &magic)?;
        history.push((m, err));
        achieved_error = err;
        if err < tolerance {
            converged = true;
            break;
        }
    }
    if magic.is_empty() {
        return Err(CoreError::Numeric {
            context: "eim construction",
            detail: "empty interpolation basis".into(),
        });
    }
    if !converged && history.last().map(|(m, _)| *m) != Some(magic.len()) {
        let err = max_training_error(&u, &gamma, &tail2, &magic)?;
        history.push((magic.len(), err));
        achieved_error = err;
    }

    let m = magic.len();
    let basis = u.slice(s![.., ..m]).to_owned();
    let pth = submatrix(&u, &magic, m);
    let inv = pth.inv().map_err(|e| CoreError::Numeric {
        context: "eim P^T H inversion",
        detail: e.to_string(),
    })?;
    let combined = basis.dot(&inv);
    let condition = {
        let (_, csv, _) = pth.svddc(JobSvd::None).map_err(|e| CoreError::Numeric {
            context: "eim condition",
            detail: e.to_string(),
        })?;
        let smin = csv[csv.len() - 1];
        if smin > 0.0 {
            csv[0] / smin
        } else {
            f64::INFINITY
        }
    };

    Ok(EimOperator {
        basis,
        magic_indices: magic,
        combined,
        tolerance,
        achieved_error,
        converged,
        condition,
        error_history: history,
    })
}

/// Rows `rows` of the first `cols` columns of `u`.
fn submatrix(u: &Array2<f64>, rows: &[usize], cols: usize) -> Array2<f64> {
    Array2::from_shape_fn((rows.len(), cols), |(i, j)| u[[rows[i], j]])
}

fn solve_small(a: &Array2<f64>, rhs: &Array1<f64>) -> Result<Array1<f64>> {
    use ndarray_linalg::Solve;
    a.solve(rhs).map_err(|e| CoreError::Numeric {
        context: "eim interpolation solve",
        detail: e.to_string(),
    })
}

fn argmax_abs(v: ArrayView1<'_, f64>) -> (usize, f64) {
    let mut best = 0;
    let mut best_val = 0.0;
    for (i, x) in v.iter().enumerate() {
        let a = x.abs();
        if a > best_val {
            best_val = a;
            best = i;
        }
    }
    (best, best_val)
}

/// Worst training-snapshot interpolation error for the current index set,
/// evaluated in the coefficient space of the left-singular basis.
fn max_training_error(
    u: &Array2<f64>,
    gamma: &Array2<f64>,
    tail2: &[Vec<f64>],
    magic: &[usize],
) -> Result<f64> {
    let m = magic.len();
    let num_snaps = gamma.ncols();
    let full = gamma.nrows();
    // sampled coefficients of all snapshots: (P^T U_full) gamma
    let g_rows = submatrix(u, magic, full);
    let sampled = g_rows.dot(gamma); // m x M
    let a = g_rows.slice(s![.., ..m]).to_owned();
    let inv = a.inv().map_err(|e| CoreError::Numeric {
        context: "eim training error",
        detail: e.to_string(),
    })?;
    let coeffs = inv.dot(&sampled); // m x M
    let mut worst = 0.0_f64;
    for j in 0..num_snaps {
        let mut e2 = tail2[m][j];
        for i in 0..m {
            let diff = gamma[[i, j]] - coeffs[[i, j]];
            e2 += diff * diff;
        }
        worst = worst.max(e2.sqrt());
    }
    Ok(worst)
}
