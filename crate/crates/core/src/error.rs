//! Error type shared across the library.

use thiserror::Error;

/// Errors produced by model evaluation, integration, basis construction and
/// the online phase.
#[derive(Debug, Error)]
pub enum CoreError {
    /// A vector or matrix had an unexpected shape.
    #[error("shape mismatch in {context}: expected {expected}, got {actual}")]
    Shape {
        context: &'static str,
        expected: String,
        actual: String,
    },

    /// A time index or component index was out of range.
    #[error("index out of range in {context}: {index} not in [0, {bound})")]
    IndexOutOfRange {
        context: &'static str,
        index: usize,
        bound: usize,
    },

    /// Duplicate index in a sampling index set.
    #[error("duplicate index {index} in {context}")]
    DuplicateIndex { context: &'static str, index: usize },

    /// A linear solve hit a singular or numerically singular matrix.
    #[error("singular step matrix at step {step} (xi = {xi:?}): {detail}")]
    SingularStep {
        step: usize,
        xi: Vec<f64>,
        detail: String,
    },

    /// A trajectory or reduced trajectory produced a non-finite value.
    #[error("divergence detected at step {step}: non-finite state entry")]
    Divergence { step: usize },

    /// Snapshots to orthonormalize were (numerically) linearly dependent.
    #[error(
        "rank deficiency while orthonormalizing trajectory {trajectory} at step {step}: \
         residual norm {residual:.3e} below threshold"
    )]
    RankDeficient {
        step: usize,
        trajectory: usize,
        residual: f64,
    },

    /// Input failed a validation check (non-orthonormal basis, negative
    /// weight, inconsistent grids, ...).
    #[error("validation failed in {context}: {detail}")]
    Validation { context: &'static str, detail: String },

    /// A required ingredient was missing (e.g. interpolation operator for a
    /// nonlinear model).
    #[error("configuration error: {0}")]
    Configuration(String),

    /// The error-estimate recursion became invalid (1 - dt * L <= 0).
    #[error("estimator stability violated at step {step}: 1 - dt*L = {value:.3e} <= 0")]
    EstimatorStability { step: usize, value: f64 },

    /// The online residual expansion evaluated to a negative value beyond
    /// round-off, indicating inconsistent offline blocks.
    #[error("online residual norm inconsistency at step {step}: value {value:.3e}")]
    ResidualInconsistency { step: usize, value: f64 },

    /// A dense eigensolver or factorization failed.
    #[error("numeric backend failure in {context}: {detail}")]
    Numeric { context: &'static str, detail: String },

    /// The greedy loop re-selected an already selected point above tolerance.
    #[error(
        "greedy stagnation: parameter {xi:?} (training index {index}) re-selected \
         with indicator {indicator:.3e}"
    )]
    GreedyStagnation {
        xi: Vec<f64>,
        index: usize,
        indicator: f64,
    },

    /// Relative error undefined because the reference norm vanishes.
    #[error("relative error undefined: reference trajectory has zero norm")]
    ZeroReference,
}

/// Convenience alias.
pub type Result<T> = std::result::Result<T, CoreError>;
