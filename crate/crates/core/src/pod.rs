//! Weighted proper orthogonal decomposition.
//!
//! Given snapshots `s_1, ..., s_M` and nonnegative weights `w_j`, the POD of
//! order `l` is the `l`-dimensional subspace minimizing
//! `sum_j w_j ||s_j - Pi s_j||^2`, obtained from the left singular vectors of
//! the column-scaled matrix `[sqrt(w_j) s_j]`.

use ndarray::{Array1, Array2, ArrayView2};
use ndarray_linalg::{JobSvd, SVDDC};

use crate::error::{CoreError, Result};

/// Relative singular-value cutoff below which modes are treated as noise.
pub const RANK_CUTOFF: f64 = 1e-12;

/// Result of a weighted POD.
#[derive(Debug, Clone)]
pub struct PodResult {
    /// Orthonormal modes, `d x achieved`.
    pub modes: Array2<f64>,
    /// Singular values of the scaled snapshot matrix, nonincreasing, one per
    /// achieved mode plus the discarded tail.
    pub singular_values: Vec<f64>,
    /// Cumulative normalized squared singular values.
    pub energy_ratios: Vec<f64>,
    /// Number of modes actually returned.
    pub achieved: usize,
    /// True when the request exceeded the numerical rank.
    pub rank_limited: bool,
}

/// Weighted POD of order `requested`.
///
/// Returns at most the numerical rank of the scaled snapshot matrix; when the
/// request exceeds it, `rank_limited` is set and the achievable modes are
/// returned instead of fabricated ones.
pub fn pod(snapshots: ArrayView2<'_, f64>, weights: &[f64], requested: usize) -> Result<PodResult> {
    let (d, m) = snapshots.dim();
    if weights.len() != m {
        return Err(CoreError::Shape {
            context: "pod weights",
            expected: m.to_string(),
            actual: weights.len().to_string(),
        });
    }
    if let Some(w) = weights.iter().find(|w| !(**w >= 0.0)) {
        return Err(CoreError::Validation {
            context: "pod weights",
            detail: format!("negative or non-finite weight {w}"),
        });
    }
    if requested > d.min(m) {
        return Err(CoreError::Validation {
            context: "pod order",
            detail: format!("requested {requested} exceeds min(d, M) = {}", d.min(m)),
        });
    }

    let mut scaled = snapshots.to_owned();
    for (j, w) in weights.iter().enumerate() {
        let s = w.sqrt();
        scaled.column_mut(j).mapv_inplace(|v| v * s);
    }
    let (u, sv, _) = scaled.svddc(JobSvd::Some).map_err(|e| CoreError::Numeric {
        context: "pod svd",
        detail: e.to_string(),
    })?;
    let u = u.expect("left singular vectors requested");

    let s0 = sv.first().copied().unwrap_or(0.0);
    let rank = sv.iter().take_while(|s| **s > RANK_CUTOFF * s0 && **s > 0.0).count();
    let achieved = requested.min(rank);

    let total: f64 = sv.iter().map(|s| s * s).sum();
    let mut energy_ratios = Vec::with_capacity(sv.len());
    let mut acc = 0.0;
    for s in sv.iter() {
        acc += s * s;
        energy_ratios.push(if total > 0.0 { acc / total } else { 1.0 });
    }

    Ok(PodResult {
        modes: u.slice(ndarray::s![.., ..achieved]).to_owned(),
        singular_values: sv.to_vec(),
        energy_ratios,
        achieved,
        rank_limited: achieved < requested,
    })
}

/// Weighted orthogonal projection error `sqrt(sum_j w_j ||s_j - V V^T s_j||^2)`
/// of snapshots onto the span of orthonormal columns `v`.
pub fn weighted_projection_error(
    snapshots: ArrayView2<'_, f64>,
    weights: &[f64],
    v: ArrayView2<'_, f64>,
) -> f64 {
    let mut acc = 0.0;
    for (j, w) in weights.iter().enumerate() {
        let s = snapshots.column(j);
        let coeffs: Array1<f64> = v.t().dot(&s);
        let proj = v.dot(&coeffs);
        let diff = &s - &proj;
        acc += w * diff.dot(&diff);
    }
    acc.sqrt()
}
