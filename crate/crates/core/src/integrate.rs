//! Full-order time integration.
//!
//! The semi-implicit scheme treats the affine linear part implicitly and the
//! nonlinear flux and source explicitly:
//!
//! ```text
//! (I - dt A^{k+1}(xi)) u^{k+1} = u^k + dt h(u^k, t^k, xi) + dt g(t^k, xi)
//! ```
//!
//! For time-invariant operators the step matrix is factorized once per
//! parameter value and reused across all steps. The explicit variant performs
//! one operator application per step instead of a linear solve.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use ndarray_linalg::{Factorize, LUFactorized, ReciprocalConditionNum, Solve};

use crate::error::{CoreError, Result};
use crate::model::{FullOrderModel, Scheme, TimeGrid};

/// States of a full-order solve at every grid node, stored column-wise.
#[derive(Debug, Clone)]
pub struct Trajectory {
    states: Array2<f64>,
    grid: TimeGrid,
}

impl Trajectory {
    /// Wrap a `d x (K+1)` state matrix; every entry must be finite.
    pub fn from_states(states: Array2<f64>, grid: TimeGrid) -> Result<Self> {
        if states.ncols() != grid.num_nodes() {
            return Err(CoreError::Shape {
                context: "trajectory",
                expected: format!("{} columns", grid.num_nodes()),
                actual: format!("{} columns", states.ncols()),
            });
        }
        if let Some(k) = (0..states.ncols()).find(|&k| !states.column(k).iter().all(|v| v.is_finite())) {
            return Err(CoreError::Divergence { step: k });
        }
        Ok(Self { states, grid })
    }

    pub fn dim(&self) -> usize {
        self.states.nrows()
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    /// State at time index `k`.
    pub fn state(&self, k: usize) -> ArrayView1<'_, f64> {
        self.states.column(k)
    }

    /// All states as a `d x (K+1)` snapshot matrix.
    pub fn states(&self) -> ArrayView2<'_, f64> {
        self.states.view()
    }
}

fn check_finite(u: &Array1<f64>, step: usize) -> Result<()> {
    if u.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(CoreError::Divergence { step })
    }
}

const RCOND_FLOOR: f64 = 1e-14;

fn factorize_step_matrix(
    model: &FullOrderModel,
    k: usize,
    t: f64,
    xi: &[f64],
    dt: f64,
    step: usize,
) -> Result<LUFactorized<ndarray::OwnedRepr<f64>>> {
    let dim = model.dim();
    let mut m = model
        .operator()
        .assemble_dense(dim, k, t, xi)
        .map_err(|e| annotate_step(e, step, xi))?;
    m.mapv_inplace(|v| -dt * v);
    for i in 0..dim {
        m[[i, i]] += 1.0;
    }
    let f = m.factorize().map_err(|e| CoreError::SingularStep {
        step,
        xi: xi.to_vec(),
        detail: e.to_string(),
    })?;
    let rcond = f.rcond().map_err(|e| CoreError::Numeric {
        context: "rcond",
        detail: e.to_string(),
    })?;
    if rcond < RCOND_FLOOR {
        return Err(CoreError::SingularStep {
            step,
            xi: xi.to_vec(),
            detail: format!("reciprocal condition {rcond:.3e} below {RCOND_FLOOR:.0e}"),
        });
    }
    Ok(f)
}

fn annotate_step(e: CoreError, step: usize, xi: &[f64]) -> CoreError {
    match e {
        CoreError::IndexOutOfRange { .. } => CoreError::SingularStep {
            step,
            xi: xi.to_vec(),
            detail: e.to_string(),
        },
        other => other,
    }
}

/// Integrate the full-order model over `grid` at parameter `xi`.
///
/// The grid may differ from the model's own (e.g. a finer reference run) as
/// long as all affine terms are time-constant matrices/vectors.
pub fn solve_full(
    model: &FullOrderModel,
    xi: &[f64],
    grid: &TimeGrid,
    scheme: Scheme,
) -> Result<Trajectory> {
    let dim = model.dim();
    let steps = grid.steps();
    let dt = grid.dt();
    if grid.steps() != model.grid().steps() {
        let seq_ok = model.operator().terms().iter().all(|(m, _)| m.is_constant())
            && model.source().terms().iter().all(|(v, _)| v.is_constant());
        if !seq_ok {
            return Err(CoreError::Validation {
                context: "solve_full",
                detail: "per-step affine sequences require the model's own time grid".into(),
            });
        }
    }

    let mut states = Array2::zeros((dim, steps + 1));
    let u0 = model.initial_state().eval(xi);
    if u0.len() != dim {
        return Err(CoreError::Shape {
            context: "initial state",
            expected: dim.to_string(),
            actual: u0.len().to_string(),
        });
    }
    check_finite(&u0, 0)?;
    states.column_mut(0).assign(&u0);

    let time_invariant = model.operator().time_invariant();
    let reusable = match scheme {
        Scheme::SemiImplicit if time_invariant => {
            Some(factorize_step_matrix(model, 0, grid.node(1), xi, dt, 0)?)
        }
        _ => None,
    };

    let mut u = u0;
    let flux = model.flux();
    let has_flux = !flux.is_zero();
    for k in 0..steps {
        let t = grid.node(k);
        let mut rhs = u.clone();
        if has_flux {
            let h = flux.eval(u.view(), t, xi);
            rhs.scaled_add(dt, &h);
        }
        let mut g_acc = Array1::zeros(dim);
        model.source().apply_acc(k, t, xi, &mut g_acc)?;
        rhs.scaled_add(dt, &g_acc);

        let next = match scheme {
            Scheme::Explicit => {
                let mut y = rhs;
                let mut au = Array1::zeros(dim);
                model.operator().apply_acc(k, t, xi, u.view(), &mut au)?;
                y.scaled_add(dt, &au);
                y
            }
            Scheme::SemiImplicit => {
                let solve = |f: &LUFactorized<ndarray::OwnedRepr<f64>>, rhs: &Array1<f64>| {
                    f.solve(rhs).map_err(|e| CoreError::SingularStep {
                        step: k,
                        xi: xi.to_vec(),
                        detail: e.to_string(),
                    })
                };
                match &reusable {
                    Some(f) => solve(f, &rhs)?,
                    None => {
                        let f = factorize_step_matrix(model, k + 1, grid.node(k + 1), xi, dt, k)?;
                        solve(&f, &rhs)?
                    }
                }
            }
        };
        check_finite(&next, k + 1)?;
        states.column_mut(k + 1).assign(&next);
        u = next;
    }
    Ok(Trajectory { states, grid: *grid })
}

/// Discrete `L^q(0,T; X)` norm of a trajectory: rectangle rule with weight
/// `dt` on all nodes for `q = 2`, maximum over nodes for `q = inf`.
pub fn trajectory_norm(states: ArrayView2<'_, f64>, dt: f64, q: crate::estimator::TimeNorm) -> f64 {
    match q {
        crate::estimator::TimeNorm::L2 => {
            let mut acc = 0.0;
            for k in 0..states.ncols() {
                let col = states.column(k);
                acc += col.dot(&col);
            }
            (dt * acc).sqrt()
        }
        crate::estimator::TimeNorm::LInf => {
            let mut best: f64 = 0.0;
            for k in 0..states.ncols() {
                let col = states.column(k);
                best = best.max(col.dot(&col).sqrt());
            }
            best
        }
    }
}
