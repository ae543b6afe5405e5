//! Projection-based model order reduction for parameter-dependent dynamical
//! systems using time-dependent reduced spaces.
//!
//! The library solves systems of the form
//!
//! ```text
//! u'(t, xi) = A(t, xi) u + h(u, t, xi) + g(t, xi),   u(0, xi) = u0(xi),
//! ```
//!
//! with `u(t, xi)` in `R^d`, by Galerkin projection onto a low-dimensional
//! subspace that is allowed to vary with time. The main ingredients are:
//!
//! * [`model`] — the decomposed full-order system with affine representations
//!   of the linear part and the source,
//! * [`testcases`] — builders for the three finite-difference benchmarks
//!   (1D advection, 2D advection-diffusion, 1D viscous Burgers),
//! * [`integrate`] — semi-implicit / explicit Euler time integration,
//! * [`pod`] — weighted proper orthogonal decomposition,
//! * [`eim`] — empirical interpolation of the nonlinear flux,
//! * [`reduced`] — time-dependent reduced bases, offline precomputation and
//!   the dimension-independent online solver / residual norm,
//! * [`estimator`] — logarithmic Lipschitz constants and the a posteriori
//!   error estimate,
//! * [`greedy`] — adaptive parameter selection driving the offline phase.

extern crate blas_src;

pub mod eim;
pub mod error;
pub mod estimator;
pub mod greedy;
pub mod integrate;
pub mod linalg;
pub mod model;
pub mod pod;
pub mod reduced;
pub mod sparse;
pub mod testcases;

pub use error::CoreError;
pub use model::{FullOrderModel, ParameterDomain, TimeGrid};
