//! A posteriori error estimation.
//!
//! The estimate integrates the scalar recursion
//!
//! ```text
//! D^{k+1} = (1 - dt*L_A^{k+1})^{-1} (D^k + dt*L_h^k D^k + dt*||r^k||)
//! ```
//!
//! from the initial projection error, where `L_A` is an affine upper bound of
//! the logarithmic Lipschitz constant of the operator and `L_h` a
//! nearest-neighbor interpolation of the constants of the linearized flux
//! along the selected trajectories. For linear models the bound is certified;
//! with the flux interpolation it is a (tight) indicator.

use ndarray::ArrayView2;

use crate::error::{CoreError, Result};
use crate::integrate::Trajectory;
use crate::linalg;
use crate::model::{FullOrderModel, Metric, OperatorSequence, ParamPoint};
use crate::reduced::{residual_norm_online, step_coefficients, OfflineQuantities, ReducedTrajectory};

/// Norm in time used for global indicators and relative errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TimeNorm {
    #[default]
    L2,
    LInf,
}

/// How the linearized-flux constant enters the recursion: as a growth rate
/// multiplying the current estimate (consistent with the continuous error
/// equation) or as an additive source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NonlinearGrowthForm {
    #[default]
    Multiplicative,
    Additive,
}

/// Estimator configuration.
#[derive(Debug, Clone, Copy, Default)]
pub struct EstimatorOptions {
    pub time_norm: TimeNorm,
    pub nonlinear_form: NonlinearGrowthForm,
}

/// Extreme-eigenvalue data of one affine operator term: `lambda_max` of the
/// symmetric part and of its negation (for sign-indefinite coefficients).
#[derive(Debug, Clone)]
pub enum TermBound {
    Constant { lambda_max: f64, lambda_max_negated: f64 },
    PerStep(Vec<(f64, f64)>),
}

impl TermBound {
    fn at(&self, k: usize) -> (f64, f64) {
        match self {
            Self::Constant { lambda_max, lambda_max_negated } => (*lambda_max, *lambda_max_negated),
            Self::PerStep(v) => v[k.min(v.len() - 1)],
        }
    }
}

/// Precomputed logarithmic Lipschitz data: per-term operator eigenvalue
/// extremes and per-(selected parameter, node) constants of the linearized
/// flux.
#[derive(Debug, Clone)]
pub struct LipschitzTable {
    op_bounds: Vec<TermBound>,
    flux_params: Vec<ParamPoint>,
    flux_values: Vec<Vec<f64>>,
    metric: Metric,
}

impl LipschitzTable {
    /// Compute the operator bounds of a model; the flux table starts empty.
    pub fn for_model(model: &FullOrderModel) -> Result<Self> {
        let mut op_bounds = Vec::with_capacity(model.operator().num_terms());
        for (seq, _) in model.operator().terms() {
            let bound = match seq {
                OperatorSequence::Constant(m) => {
                    let (lo, hi) = linalg::sym_part_extremes(m)?;
                    TermBound::Constant { lambda_max: hi, lambda_max_negated: -lo }
                }
                OperatorSequence::PerStep(seq) => {
                    let mut vals = Vec::with_capacity(seq.len());
                    for m in seq {
                        let (lo, hi) = linalg::sym_part_extremes(m)?;
                        vals.push((hi, -lo));
                    }
                    TermBound::PerStep(vals)
                }
            };
            op_bounds.push(bound);
        }
        Ok(Self {
            op_bounds,
            flux_params: Vec::new(),
            flux_values: Vec::new(),
            metric: Metric::Euclidean,
        })
    }

    /// Append the linearized-flux constants along a selected trajectory:
    /// `lambda_max` of the symmetric part of the flux gradient at every node.
    pub fn add_selected_trajectory(
        &mut self,
        model: &FullOrderModel,
        xi: &[f64],
        trajectory: &Trajectory,
    ) -> Result<()> {
        if model.flux().is_zero() {
            return Ok(());
        }
        let grid = trajectory.grid();
        let mut values = Vec::with_capacity(grid.num_nodes());
        for k in 0..grid.num_nodes() {
            let grad = model.flux().gradient(trajectory.state(k), grid.node(k), xi);
            let (_, hi) = linalg::sym_part_extremes(&grad)?;
            values.push(hi);
        }
        self.flux_params.push(xi.to_vec());
        self.flux_values.push(values);
        Ok(())
    }

    /// Signed affine upper bound `sum_i |theta_i| L[±A^i]` at node `k`.
    ///
    /// Positive coefficients use `lambda_max(sym A^i)`, negative ones
    /// `lambda_max(-sym A^i)`, so the bound dominates the assembled operator's
    /// constant for any coefficient signs.
    pub fn operator_bound(&self, theta: &[f64], k: usize) -> f64 {
        debug_assert_eq!(theta.len(), self.op_bounds.len());
        theta
            .iter()
            .zip(&self.op_bounds)
            .map(|(t, b)| {
                let (lmax, lmax_neg) = b.at(k);
                if *t >= 0.0 {
                    t * lmax
                } else {
                    -t * lmax_neg
                }
            })
            .sum()
    }

    /// Nearest-neighbor interpolation of the flux constant at `(xi, t^k)`;
    /// ties resolve to the earliest selected parameter.
    pub fn nearest_flux_value(&self, xi: &[f64], k: usize) -> Result<f64> {
        if self.flux_params.is_empty() {
            return Err(CoreError::Configuration(
                "no selected parameters in the Lipschitz table".into(),
            ));
        }
        let mut best = 0usize;
        let mut best_dist = f64::INFINITY;
        for (i, p) in self.flux_params.iter().enumerate() {
            let d = self.metric.distance(xi, p);
            if d < best_dist {
                best_dist = d;
                best = i;
            }
        }
        Ok(self.flux_values[best][k])
    }

    pub fn has_flux_data(&self) -> bool {
        !self.flux_params.is_empty()
    }

    pub fn flux_params(&self) -> &[ParamPoint] {
        &self.flux_params
    }

    pub fn flux_values(&self) -> &[Vec<f64>] {
        &self.flux_values
    }

    pub fn op_bounds(&self) -> &[TermBound] {
        &self.op_bounds
    }

    pub fn from_parts(
        op_bounds: Vec<TermBound>,
        flux_params: Vec<ParamPoint>,
        flux_values: Vec<Vec<f64>>,
    ) -> Self {
        Self { op_bounds, flux_params, flux_values, metric: Metric::Euclidean }
    }
}

/// Logarithmic Lipschitz constant of a matrix: the largest eigenvalue of its
/// symmetric part.
pub fn log_lipschitz_matrix(a: ArrayView2<'_, f64>) -> Result<f64> {
    let (_, hi) = linalg::sym_part_extremes_dense(a)?;
    Ok(hi)
}

/// Affine upper bound of the operator's logarithmic Lipschitz constant from
/// precomputed per-term extremes.
pub fn log_lipschitz_affine_bound(theta: &[f64], table: &LipschitzTable, k: usize) -> f64 {
    table.operator_bound(theta, k)
}

/// Nearest-neighbor interpolation of the linearized-flux constant.
pub fn lipschitz_nn(xi: &[f64], table: &LipschitzTable, k: usize) -> Result<f64> {
    table.nearest_flux_value(xi, k)
}

/// One step of the error recursion.
pub fn step_error_recursion(
    previous: f64,
    dt: f64,
    lip_op: f64,
    lip_flux: f64,
    residual: f64,
    form: NonlinearGrowthForm,
    step: usize,
) -> Result<f64> {
    let denom = 1.0 - dt * lip_op;
    if denom <= 0.0 {
        return Err(CoreError::EstimatorStability { step, value: denom });
    }
    let numer = match form {
        NonlinearGrowthForm::Multiplicative => previous * (1.0 + dt * lip_flux) + dt * residual,
        NonlinearGrowthForm::Additive => previous + dt * lip_flux + dt * residual,
    };
    Ok(numer / denom)
}

/// Per-step error estimate and its global time norm.
#[derive(Debug, Clone)]
pub struct ErrorEstimate {
    /// Estimated error bound at every node, `k = 0..K`.
    pub per_step: Vec<f64>,
    /// Global indicator (time norm of `per_step`).
    pub global: f64,
    /// Online residual norms, one per step.
    pub residual_norms: Vec<f64>,
    /// Operator Lipschitz bounds used, one per step.
    pub lip_op: Vec<f64>,
    /// Flux Lipschitz values used, one per step (zero for linear models).
    pub lip_flux: Vec<f64>,
    pub time_norm: TimeNorm,
}

/// Integrate the error estimate along a reduced trajectory.
pub fn integrate_error_estimate(
    offline: &OfflineQuantities,
    model: &FullOrderModel,
    reduced: &ReducedTrajectory,
    xi: &[f64],
    options: EstimatorOptions,
) -> Result<ErrorEstimate> {
    let steps = offline.steps();
    let dt = offline.dt();
    if reduced.num_nodes() != steps + 1 {
        return Err(CoreError::Shape {
            context: "error estimate",
            expected: format!("{} nodes", steps + 1),
            actual: reduced.num_nodes().to_string(),
        });
    }
    let table = &offline.lipschitz;
    let nonlinear = !model.flux().is_zero();

    let delta0 = match &offline.initial {
        crate::reduced::InitialData::Fixed { delta0, .. } => *delta0,
        crate::reduced::InitialData::Parametric { v0 } => {
            let u0 = model.initial_state().eval(xi);
            let resid = &u0 - &v0.dot(&v0.t().dot(&u0));
            resid.dot(&resid).sqrt()
        }
    };

    let mut per_step = Vec::with_capacity(steps + 1);
    let mut residual_norms = Vec::with_capacity(steps);
    let mut lip_op_used = Vec::with_capacity(steps);
    let mut lip_flux_used = Vec::with_capacity(steps);
    per_step.push(delta0);

    let mut delta = delta0;
    for k in 0..steps {
        // growth factor from the operator at t^{k+1}
        let theta_next = model.operator().coefficients((k + 1) as f64 * dt, xi);
        let lip_op = table.operator_bound(&theta_next, k + 1);
        let lip_flux = if nonlinear && table.has_flux_data() {
            table.nearest_flux_value(xi, k)?
        } else {
            0.0
        };
        let (theta_op, theta_src) = step_coefficients(offline, model, k, xi);
        let residual = residual_norm_online(
            offline,
            k,
            reduced.coeff(k),
            reduced.coeff(k + 1),
            reduced.sampled_flux(k),
            &theta_op,
            &theta_src,
        )?;
        delta = step_error_recursion(delta, dt, lip_op, lip_flux, residual, options.nonlinear_form, k)?;
        per_step.push(delta);
        residual_norms.push(residual);
        lip_op_used.push(lip_op);
        lip_flux_used.push(lip_flux);
    }

    let global = match options.time_norm {
        TimeNorm::L2 => (dt * per_step.iter().map(|d| d * d).sum::<f64>()).sqrt(),
        TimeNorm::LInf => per_step.iter().cloned().fold(0.0, f64::max),
    };
    Ok(ErrorEstimate {
        per_step,
        global,
        residual_norms,
        lip_op: lip_op_used,
        lip_flux: lip_flux_used,
        time_norm: options.time_norm,
    })
}

/// Relative trajectory error `||u_r - u|| / ||u||` in the discrete
/// `L^q(0,T; X)` norm.
pub fn relative_errors(
    reference: &Trajectory,
    approximation: &Trajectory,
    q: TimeNorm,
) -> Result<f64> {
    if reference.grid() != approximation.grid() || reference.dim() != approximation.dim() {
        return Err(CoreError::Validation {
            context: "relative errors",
            detail: "trajectories must share grid and dimension".into(),
        });
    }
    let dt = reference.grid().dt();
    let nodes = reference.grid().num_nodes();
    let (mut num2, mut den2) = (0.0, 0.0);
    let (mut num_inf, mut den_inf) = (0.0_f64, 0.0_f64);
    for k in 0..nodes {
        let u = reference.state(k);
        let ur = approximation.state(k);
        let diff = &ur - &u;
        let dn = diff.dot(&diff);
        let un = u.dot(&u);
        num2 += dn;
        den2 += un;
        num_inf = num_inf.max(dn.sqrt());
        den_inf = den_inf.max(un.sqrt());
    }
    match q {
        TimeNorm::L2 => {
            if den2 == 0.0 {
                return Err(CoreError::ZeroReference);
            }
            Ok(((dt * num2) / (dt * den2)).sqrt())
        }
        TimeNorm::LInf => {
            if den_inf == 0.0 {
                return Err(CoreError::ZeroReference);
            }
            Ok(num_inf / den_inf)
        }
    }
}

/// Per-step effectivity of an estimate against exact errors; steps whose
/// exact error is below `1e-14` are excluded.
#[derive(Debug, Clone)]
pub struct EffectivitySeries {
    pub values: Vec<Option<f64>>,
    pub mean: f64,
    pub included: usize,
}

pub fn effectivity(estimate: &ErrorEstimate, exact: &[f64]) -> EffectivitySeries {
    let mut values = Vec::with_capacity(exact.len());
    let mut sum = 0.0;
    let mut included = 0usize;
    for (d, e) in estimate.per_step.iter().zip(exact) {
        if *e < 1e-14 {
            values.push(None);
        } else {
            let kappa = d / e;
            values.push(Some(kappa));
            sum += kappa;
            included += 1;
        }
    }
    let mean = if included > 0 { sum / included as f64 } else { f64::NAN };
    EffectivitySeries { values, mean, included }
}
