//! Online phase: reduced time stepping and the residual norm, both with
//! per-step cost independent of the full dimension.

use ndarray::{Array1, Array2, ArrayView1};
use ndarray_linalg::Solve;

use crate::error::{CoreError, Result};
use crate::integrate::Trajectory;
use crate::model::{FullOrderModel, Scheme, TimeGrid};
use crate::reduced::basis::TimeDependentBasis;
use crate::reduced::offline::{InitialData, OfflineQuantities};

/// Reduced coordinates at every grid node, plus the sampled flux values used
/// at each step (reused by the error estimator).
#[derive(Debug, Clone)]
pub struct ReducedTrajectory {
    /// `r x (K+1)` coefficient matrix.
    coeffs: Array2<f64>,
    /// `m x K` sampled flux values, empty for linear models.
    sampled_flux: Array2<f64>,
}

impl ReducedTrajectory {
    pub fn rank(&self) -> usize {
        self.coeffs.nrows()
    }

    pub fn num_nodes(&self) -> usize {
        self.coeffs.ncols()
    }

    pub fn coeff(&self, k: usize) -> ArrayView1<'_, f64> {
        self.coeffs.column(k)
    }

    pub fn coeffs(&self) -> &Array2<f64> {
        &self.coeffs
    }

    /// Sampled flux values consumed by step `k -> k+1`.
    pub fn sampled_flux(&self, k: usize) -> ArrayView1<'_, f64> {
        self.sampled_flux.column(k)
    }

    pub fn from_parts(coeffs: Array2<f64>, sampled_flux: Array2<f64>) -> Self {
        Self { coeffs, sampled_flux }
    }
}

/// Sampled flux values `P_m^T h(V^k alpha, t^k, xi)` computed from the stored
/// basis rows only.
fn sample_flux(
    offline: &OfflineQuantities,
    model: &FullOrderModel,
    k: usize,
    alpha: ArrayView1<'_, f64>,
    xi: &[f64],
) -> Array1<f64> {
    let plan = match &offline.sampling {
        Some(p) => p,
        None => return Array1::zeros(0),
    };
    let u_dep = plan.vsub.at(k).dot(&alpha);
    let t = k as f64 * offline.dt();
    let flux = model.flux();
    let get = |i: usize| u_dep[plan.positions[&i]];
    Array1::from_iter(plan.magic.iter().map(|&c| flux.eval_component(c, &get, t, xi)))
}

/// Step the reduced system over the whole grid.
///
/// The model supplies only the affine coefficient functions and the sampled
/// flux arithmetic; no `d`-dimensional quantity is touched unless the initial
/// state is parameter-dependent.
pub fn solve_reduced(
    offline: &OfflineQuantities,
    model: &FullOrderModel,
    xi: &[f64],
) -> Result<ReducedTrajectory> {
    let r = offline.rank();
    let m = offline.eim_order();
    let steps = offline.steps();
    let dt = offline.dt();

    let mut coeffs = Array2::zeros((r, steps + 1));
    let mut sampled = Array2::zeros((m, steps));

    let alpha0 = match &offline.initial {
        InitialData::Fixed { alpha0, .. } => alpha0.clone(),
        InitialData::Parametric { v0 } => v0.t().dot(&model.initial_state().eval(xi)),
    };
    coeffs.column_mut(0).assign(&alpha0);

    let mut alpha = alpha0;
    for k in 0..steps {
        let blocks = offline.storage.at(k);
        let t_src = k as f64 * dt;
        let t_op = offline.operator_time(k);

        let w = if m > 0 {
            let w = sample_flux(offline, model, k, alpha.view(), xi);
            sampled.column_mut(k).assign(&w);
            w
        } else {
            Array1::zeros(0)
        };

        let mut rhs = alpha.clone();
        if m > 0 {
            rhs.scaled_add(dt, &blocks.eim_proj.dot(&w));
        }
        let theta_src = model.source().coefficients(t_src, xi);
        for (j, theta) in theta_src.iter().enumerate() {
            if *theta != 0.0 {
                rhs.scaled_add(dt * theta, &blocks.src_proj[j]);
            }
        }
        rhs.scaled_add(-dt, &blocks.drift_proj.dot(&alpha));

        let theta_op = model.operator().coefficients(t_op, xi);
        let next = match offline.scheme() {
            Scheme::Explicit => {
                let mut y = rhs;
                for (i, theta) in theta_op.iter().enumerate() {
                    if *theta != 0.0 {
                        y.scaled_add(dt * theta, &blocks.op_proj[i].dot(&alpha));
                    }
                }
                y
            }
            Scheme::SemiImplicit => {
                let mut mat = Array2::eye(r);
                for (i, theta) in theta_op.iter().enumerate() {
                    if *theta != 0.0 {
                        mat.scaled_add(-dt * theta, &blocks.op_proj[i]);
                    }
                }
                if r == 0 {
                    Array1::zeros(0)
                } else {
                    mat.solve(&rhs).map_err(|e| CoreError::SingularStep {
                        step: k,
                        xi: xi.to_vec(),
                        detail: e.to_string(),
                    })?
                }
            }
        };
        if !next.iter().all(|v| v.is_finite()) {
            return Err(CoreError::Divergence { step: k + 1 });
        }
        coeffs.column_mut(k + 1).assign(&next);
        alpha = next;
    }

    Ok(ReducedTrajectory { coeffs, sampled_flux: sampled })
}

/// Lift reduced coordinates at node `k` back to the state space.
pub fn reconstruct(
    basis: &TimeDependentBasis,
    reduced: &ReducedTrajectory,
    k: usize,
) -> Array1<f64> {
    basis.at(k).dot(&reduced.coeff(k))
}

/// Lift a whole reduced trajectory back to the state space.
pub fn reconstruct_trajectory(
    basis: &TimeDependentBasis,
    reduced: &ReducedTrajectory,
    grid: &TimeGrid,
) -> Result<Trajectory> {
    let d = basis.dim();
    let mut states = Array2::zeros((d, reduced.num_nodes()));
    for k in 0..reduced.num_nodes() {
        states.column_mut(k).assign(&reconstruct(basis, reduced, k));
    }
    Trajectory::from_states(states, *grid)
}

/// Relative clamp for tiny negative values of the squared residual expansion.
/// The Gram blocks are formed from complement-projected factors, so the
/// expansion scale is of residual size already; the clamp absorbs the
/// accumulated round-off of the offline dot products (up to `d` terms each)
/// while still flagging any structural sign error, which shows up at relative
/// size one.
const RESIDUAL_CLAMP: f64 = 1e-9;

/// Online evaluation of the residual norm of step `k -> k+1`.
///
/// `theta_op` are the operator coefficients at the scheme's operator time
/// (`t^{k+1}` semi-implicit, `t^k` explicit) and `theta_src` the source
/// coefficients at `t^k`. The expansion is a difference of Gram quadratic
/// forms; values negative beyond round-off indicate inconsistent blocks and
/// are reported as errors.
pub fn residual_norm_online<'a>(
    offline: &OfflineQuantities,
    k: usize,
    alpha_k: ArrayView1<'a, f64>,
    alpha_next: ArrayView1<'a, f64>,
    sampled_flux: ArrayView1<'_, f64>,
    theta_op: &[f64],
    theta_src: &[f64],
) -> Result<f64> {
    if k >= offline.steps() {
        return Err(CoreError::IndexOutOfRange {
            context: "residual step",
            index: k,
            bound: offline.steps(),
        });
    }
    let r = offline.rank();
    let m = offline.eim_order();
    if alpha_k.len() != r || alpha_next.len() != r || sampled_flux.len() != m {
        return Err(CoreError::Shape {
            context: "residual_norm_online",
            expected: format!("alpha ({r}), sampled ({m})"),
            actual: format!(
                "alpha ({}, {}), sampled ({})",
                alpha_k.len(),
                alpha_next.len(),
                sampled_flux.len()
            ),
        });
    }
    if theta_op.len() != offline.num_op_terms() || theta_src.len() != offline.num_src_terms() {
        return Err(CoreError::Shape {
            context: "residual_norm_online coefficients",
            expected: format!("({}, {})", offline.num_op_terms(), offline.num_src_terms()),
            actual: format!("({}, {})", theta_op.len(), theta_src.len()),
        });
    }

    let blocks = offline.storage.at(k);
    let qa = theta_op.len();
    let qg = theta_src.len();
    let a = alpha_k;
    let y = match offline.scheme() {
        Scheme::SemiImplicit => alpha_next,
        Scheme::Explicit => alpha_k,
    };
    let w = sampled_flux;

    // squared norm from the complement-projected Gram blocks; `gross` tracks
    // the total magnitude of the contributions, which sets the round-off
    // scale of the cross-family cancellation
    let mut value = 0.0;
    let mut gross = 0.0;
    let mut add = |term: f64| {
        value += term;
        gross += term.abs();
    };
    add(a.dot(&blocks.drift_drift.dot(&a)));
    for i in 0..qa {
        for j in 0..qa {
            let c = theta_op[i] * theta_op[j];
            if c != 0.0 {
                add(c * y.dot(&blocks.op_op[i * qa + j].dot(&y)));
            }
        }
    }
    if m > 0 {
        add(w.dot(&blocks.eim_eim.dot(&w)));
    }
    for i in 0..qg {
        for j in 0..qg {
            let c = theta_src[i] * theta_src[j];
            if c != 0.0 {
                add(c * blocks.src_src[[i, j]]);
            }
        }
    }
    for i in 0..qa {
        if theta_op[i] != 0.0 {
            add(-2.0 * theta_op[i] * a.dot(&blocks.drift_op[i].dot(&y)));
        }
    }
    if m > 0 {
        add(-2.0 * a.dot(&blocks.drift_eim.dot(&w)));
    }
    for j in 0..qg {
        if theta_src[j] != 0.0 {
            add(-2.0 * theta_src[j] * a.dot(&blocks.drift_src[j]));
        }
    }
    for i in 0..qa {
        if theta_op[i] == 0.0 {
            continue;
        }
        if m > 0 {
            add(2.0 * theta_op[i] * y.dot(&blocks.op_eim[i].dot(&w)));
        }
        for j in 0..qg {
            let c = theta_op[i] * theta_src[j];
            if c != 0.0 {
                add(2.0 * c * y.dot(&blocks.op_src[i * qg + j]));
            }
        }
    }
    if m > 0 {
        for j in 0..qg {
            if theta_src[j] != 0.0 {
                add(2.0 * theta_src[j] * w.dot(&blocks.eim_src[j]));
            }
        }
    }

    let scale = gross.max(f64::MIN_POSITIVE);
    if value < 0.0 {
        if value >= -RESIDUAL_CLAMP * scale {
            return Ok(0.0);
        }
        return Err(CoreError::ResidualInconsistency { step: k, value });
    }
    Ok(value.sqrt())
}

/// Operator/source coefficient pair for step `k`, in the convention expected
/// by [`residual_norm_online`].
pub fn step_coefficients(
    offline: &OfflineQuantities,
    model: &FullOrderModel,
    k: usize,
    xi: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let theta_op = model.operator().coefficients(offline.operator_time(k), xi);
    let theta_src = model.source().coefficients(k as f64 * offline.dt(), xi);
    (theta_op, theta_src)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimator::LipschitzTable;
    use crate::integrate::solve_full;
    use crate::model::InitialState;
    use crate::reduced::basis::build_time_independent_basis;
    use crate::reduced::offline::compute_offline_quantities;
    use crate::testcases::{BenchmarkCase, BenchmarkSpec};
    use approx::assert_abs_diff_eq;
    use ndarray::Array2;

    #[test]
    fn full_identity_basis_reproduces_full_solve() {
        let (model, grid, _) = BenchmarkSpec::new(BenchmarkCase::AdvDiff2d, 7).build().unwrap();
        let d = model.dim();
        let basis = build_time_independent_basis(Array2::eye(d), &grid).unwrap();
        let table = LipschitzTable::for_model(&model).unwrap();
        let offline = compute_offline_quantities(&basis, &model, None, table).unwrap();
        let xi = [0.25, -0.75];
        let reduced = solve_reduced(&offline, &model, &xi).unwrap();
        let full = solve_full(&model, &xi, &grid, model.scheme()).unwrap();
        for k in [0, 5, grid.steps()] {
            let rec = reconstruct(&basis, &reduced, k);
            let diff = (&rec - &full.state(k)).mapv(f64::abs).iter().cloned().fold(0.0, f64::max);
            let norm = full.state(k).dot(&full.state(k)).sqrt();
            assert!(diff <= 1e-10 * (1.0 + norm), "step {k}: {diff}");
        }
    }

    #[test]
    fn reconstruct_basics() {
        let (model, grid, _) = BenchmarkSpec::new(BenchmarkCase::Advection1d, 21).build().unwrap();
        let d = model.dim();
        let mut modes = Array2::zeros((d, 2));
        modes[[0, 0]] = 1.0;
        modes[[3, 1]] = 1.0;
        let basis = build_time_independent_basis(modes, &grid).unwrap();
        let mut coeffs = Array2::zeros((2, grid.num_nodes()));
        coeffs[[0, 1]] = 1.0; // alpha = e_1 at node 1
        let reduced = ReducedTrajectory::from_parts(coeffs, Array2::zeros((0, grid.steps())));
        assert_eq!(reconstruct(&basis, &reduced, 0), Array1::zeros(d));
        let rec = reconstruct(&basis, &reduced, 1);
        assert_eq!(rec[0], 1.0);
        assert_eq!(rec.sum(), 1.0);
        // orthonormal round trip
        let back = basis.at(1).t().dot(&rec);
        assert_abs_diff_eq!(back[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(back[1], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn complete_basis_residual_vanishes() {
        let (model, grid, _) = BenchmarkSpec::new(BenchmarkCase::AdvDiff2d, 6).build().unwrap();
        let d = model.dim();
        let basis = build_time_independent_basis(Array2::eye(d), &grid).unwrap();
        let table = LipschitzTable::for_model(&model).unwrap();
        let offline = compute_offline_quantities(&basis, &model, None, table).unwrap();
        let xi = [0.1, 0.4];
        let reduced = solve_reduced(&offline, &model, &xi).unwrap();
        for k in [0usize, 3, grid.steps() - 1] {
            let (theta_op, theta_src) = step_coefficients(&offline, &model, k, &xi);
            let res = residual_norm_online(
                &offline,
                k,
                reduced.coeff(k),
                reduced.coeff(k + 1),
                reduced.sampled_flux(k),
                &theta_op,
                &theta_src,
            )
            .unwrap();
            // the expansion resolves the squared norm only to ~1e-12 of the
            // un-projected argument, here dominated by ||A u||
            let a = model.assemble_operator(k + 1, &xi).unwrap();
            let au = a.dot(&reconstruct(&basis, &reduced, k + 1));
            let scale = au.dot(&au).sqrt();
            assert!(res <= 1e-5 * (1.0 + scale), "step {k}: residual {res} vs scale {scale}");
        }
    }

    #[test]
    fn empty_basis_is_supported() {
        let (model, grid, _) = BenchmarkSpec::new(BenchmarkCase::AdvDiff2d, 6).build().unwrap();
        let d = model.dim();
        let basis = build_time_independent_basis(Array2::zeros((d, 0)), &grid).unwrap();
        let table = LipschitzTable::for_model(&model).unwrap();
        let offline = compute_offline_quantities(&basis, &model, None, table).unwrap();
        let xi = [0.0, 0.0];
        let reduced = solve_reduced(&offline, &model, &xi).unwrap();
        assert_eq!(reduced.rank(), 0);
        // residual of the zero approximation is ||g|| = 0 for this source-free
        // linear model projected... the operator term vanishes with alpha = 0
        let (theta_op, theta_src) = step_coefficients(&offline, &model, 0, &xi);
        let res = residual_norm_online(
            &offline,
            0,
            reduced.coeff(0),
            reduced.coeff(1),
            reduced.sampled_flux(0),
            &theta_op,
            &theta_src,
        )
        .unwrap();
        assert_eq!(res, 0.0);
    }

    #[test]
    fn parametric_initial_state_projects_online() {
        let (model, grid, _) = BenchmarkSpec::new(BenchmarkCase::Advection1d, 41).build().unwrap();
        let d = model.dim();
        let model = model.with_initial_state(InitialState::Parametric(std::sync::Arc::new(
            move |xi: &[f64]| Array1::from_shape_fn(d, |i| (i as f64 * 0.2).sin() * (1.0 + xi[0])),
        )));
        let mut modes = Array2::zeros((d, 1));
        let u_ref = model.initial_state().eval(&[0.3]);
        let norm = u_ref.dot(&u_ref).sqrt();
        modes.column_mut(0).assign(&(&u_ref / norm));
        let basis = build_time_independent_basis(modes, &grid).unwrap();
        let table = LipschitzTable::for_model(&model).unwrap();
        let offline = compute_offline_quantities(&basis, &model, None, table).unwrap();
        let reduced = solve_reduced(&offline, &model, &[0.3]).unwrap();
        // alpha0 = ||u0|| since u0 is parallel to the single mode
        assert_abs_diff_eq!(reduced.coeff(0)[0], norm, epsilon = 1e-12);
    }
}
