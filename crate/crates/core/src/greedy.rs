//! Adaptive parameter selection.
//!
//! Both algorithms sweep the training set with the online solver and error
//! estimator, solve the full-order model at the worst parameter, and enrich
//! the reduced space: with the whole trajectory (time-dependent spaces) or
//! with leading modes of its projection defect (time-independent spaces).
//! Each iteration performs exactly one full-order solve.

use ndarray::{Array1, Array2};
use rayon::prelude::*;

use crate::eim::{build_eim, EimOperator};
use crate::error::{CoreError, Result};
use crate::estimator::{integrate_error_estimate, EstimatorOptions, LipschitzTable};
use crate::integrate::{solve_full, Trajectory};
use crate::model::{FullOrderModel, ParamPoint, ParameterDomain, TimeGrid};
use crate::pod::pod;
use crate::reduced::{
    build_time_dependent_basis, build_time_independent_basis, compute_offline_quantities,
    solve_reduced, OfflineQuantities, TimeDependentBasis,
};

/// Which enrichment strategy drives the loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreedyMethod {
    /// Enrich with whole trajectories; the reduced space varies in time.
    TimeDependent,
    /// Enrich with leading defect modes; the reduced space is fixed in time.
    PodEnrichment,
}

/// Greedy loop configuration.
#[derive(Debug, Clone)]
pub struct GreedyConfig {
    /// Stop when the worst training indicator falls below this.
    pub tolerance: f64,
    /// Cap on the reduced dimension.
    pub max_dim: Option<usize>,
    /// Cap on the number of iterations (= full-order solves).
    pub max_iterations: Option<usize>,
    /// Modes added per iteration by the defect-mode enrichment.
    pub enrichment: usize,
    /// Tolerance of the flux interpolation operator (nonlinear models).
    pub eim_tolerance: f64,
    pub estimator: EstimatorOptions,
}

impl Default for GreedyConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-6,
            max_dim: None,
            max_iterations: None,
            enrichment: 1,
            eim_tolerance: 1e-10,
            estimator: EstimatorOptions::default(),
        }
    }
}

/// One selection of the greedy loop.
#[derive(Debug, Clone)]
pub struct IterationRecord {
    pub selected: ParamPoint,
    pub training_index: usize,
    /// Worst indicator that drove this selection (infinite for the seed).
    pub indicator: f64,
    /// Cumulative full-order solves after this selection.
    pub full_solves: usize,
}

/// Outcome of a greedy run: history plus the final reduced machinery.
#[derive(Debug)]
pub struct GreedyResult {
    pub method: GreedyMethod,
    pub iterations: Vec<IterationRecord>,
    /// `(reduced dimension, worst training indicator)` after each enrichment.
    pub sweeps: Vec<(usize, f64)>,
    pub final_max_indicator: f64,
    pub converged: bool,
    pub basis: TimeDependentBasis,
    pub offline: OfflineQuantities,
    pub eim: Option<EimOperator>,
    /// Full-order trajectories of the selected parameters, in selection order.
    pub trajectories: Vec<Trajectory>,
    pub full_solve_count: usize,
}

/// Greedy construction of a time-dependent reduced space.
pub fn t_greedy(
    model: &FullOrderModel,
    domain: &ParameterDomain,
    grid: &TimeGrid,
    config: &GreedyConfig,
) -> Result<GreedyResult> {
    run_greedy(model, domain, grid, config, GreedyMethod::TimeDependent)
}

/// Greedy construction of a time-independent reduced space by defect-mode
/// enrichment.
pub fn pod_greedy(
    model: &FullOrderModel,
    domain: &ParameterDomain,
    grid: &TimeGrid,
    config: &GreedyConfig,
) -> Result<GreedyResult> {
    run_greedy(model, domain, grid, config, GreedyMethod::PodEnrichment)
}

fn run_greedy(
    model: &FullOrderModel,
    domain: &ParameterDomain,
    grid: &TimeGrid,
    config: &GreedyConfig,
    method: GreedyMethod,
) -> Result<GreedyResult> {
    let training = domain.training();
    if training.is_empty() {
        return Err(CoreError::Configuration("empty training set".into()));
    }
    if config.enrichment == 0 {
        return Err(CoreError::Configuration("enrichment must be at least 1".into()));
    }
    let nonlinear = !model.flux().is_zero();
    let mut lipschitz = LipschitzTable::for_model(model)?;

    if config.tolerance == f64::INFINITY {
        log::warn!("greedy tolerance is infinite; returning an empty reduced space");
        let basis =
            build_time_independent_basis(Array2::zeros((model.dim(), 0)), grid)?;
        let offline = compute_offline_quantities(&basis, model, None, lipschitz)?;
        return Ok(GreedyResult {
            method,
            iterations: Vec::new(),
            sweeps: Vec::new(),
            final_max_indicator: 0.0,
            converged: true,
            basis,
            offline,
            eim: None,
            trajectories: Vec::new(),
            full_solve_count: 0,
        });
    }

    // Seed: the training point with the largest initial-state norm when the
    // initial state is parameter-dependent, the centroid-nearest point
    // otherwise (the sweep of an empty space carries no information).
    let seed_index = match model.initial_state().fixed() {
        None => {
            let mut best = 0;
            let mut best_norm = f64::NEG_INFINITY;
            for (i, xi) in training.iter().enumerate() {
                let u0 = model.initial_state().eval(xi);
                let n = u0.dot(&u0).sqrt();
                if n > best_norm {
                    best_norm = n;
                    best = i;
                }
            }
            best
        }
        Some(_) => {
            let p = training[0].len();
            let mut centroid = vec![0.0; p];
            for xi in training {
                for (c, x) in centroid.iter_mut().zip(xi) {
                    *c += x / training.len() as f64;
                }
            }
            let mut best = 0;
            let mut best_dist = f64::INFINITY;
            for (i, xi) in training.iter().enumerate() {
                let d = domain.distance(xi, &centroid);
                if d < best_dist {
                    best_dist = d;
                    best = i;
                }
            }
            best
        }
    };

    let mut iterations: Vec<IterationRecord> = Vec::new();
    let mut sweeps: Vec<(usize, f64)> = Vec::new();
    let mut trajectories: Vec<Trajectory> = Vec::new();
    let mut selected_indices: Vec<usize> = Vec::new();
    let mut full_solves = 0usize;
    let mut pod_modes: Array2<f64> = Array2::zeros((model.dim(), 0));
    let mut best_indicator = f64::INFINITY;
    let mut sweeps_without_progress = 0usize;
    let mut converged = false;
    let mut final_max;

    let select = |index: usize,
                      indicator: f64,
                      trajectories: &mut Vec<Trajectory>,
                      selected_indices: &mut Vec<usize>,
                      lipschitz: &mut LipschitzTable,
                      full_solves: &mut usize,
                      iterations: &mut Vec<IterationRecord>|
     -> Result<()> {
        let xi = &training[index];
        let traj = solve_full(model, xi, grid, model.scheme())?;
        *full_solves += 1;
        if nonlinear && !selected_indices.contains(&index) {
            lipschitz.add_selected_trajectory(model, xi, &traj)?;
        }
        trajectories.push(traj);
        selected_indices.push(index);
        iterations.push(IterationRecord {
            selected: xi.clone(),
            training_index: index,
            indicator,
            full_solves: *full_solves,
        });
        log::info!(
            "greedy iter={} xi={:?} indicator={:.6e} full_solves={}",
            iterations.len(),
            xi,
            indicator,
            full_solves
        );
        Ok(())
    };

    select(
        seed_index,
        f64::INFINITY,
        &mut trajectories,
        &mut selected_indices,
        &mut lipschitz,
        &mut full_solves,
        &mut iterations,
    )?;

    let (basis, offline, eim) = loop {
        // rebuild the reduced machinery from all selected trajectories
        let basis = match method {
            GreedyMethod::TimeDependent => build_time_dependent_basis(&trajectories)?,
            GreedyMethod::PodEnrichment => {
                enrich_pod_modes(
                    &mut pod_modes,
                    trajectories.last().expect("at least one trajectory"),
                    config.enrichment,
                    grid,
                )?;
                build_time_independent_basis(pod_modes.clone(), grid)?
            }
        };
        let eim = if nonlinear {
            let params: Vec<ParamPoint> =
                selected_indices.iter().map(|&i| training[i].clone()).collect();
            Some(build_flux_interpolant(
                model,
                &trajectories,
                &params,
                &selected_indices,
                grid,
                config.eim_tolerance,
            )?)
        } else {
            None
        };
        let offline =
            compute_offline_quantities(&basis, model, eim.as_ref(), lipschitz.clone())?;

        // sweep the training set online
        let indicators: Vec<f64> = training
            .par_iter()
            .map(|xi| sweep_indicator(&offline, model, xi, config))
            .collect::<Result<Vec<f64>>>()?;
        let (argmax, max_val) = indicators
            .iter()
            .enumerate()
            .fold((0usize, f64::NEG_INFINITY), |(bi, bv), (i, &v)| {
                if v > bv {
                    (i, v)
                } else {
                    (bi, bv)
                }
            });
        sweeps.push((basis.rank(), max_val));
        final_max = max_val;
        log::info!(
            "greedy sweep dim={} max_indicator={:.6e} argmax_index={} full_solves={}",
            basis.rank(),
            max_val,
            argmax,
            full_solves
        );

        if max_val < config.tolerance {
            converged = true;
            break (basis, offline, eim);
        }
        if let Some(cap) = config.max_dim {
            if basis.rank() >= cap {
                break (basis, offline, eim);
            }
        }
        if let Some(cap) = config.max_iterations {
            if iterations.len() >= cap {
                break (basis, offline, eim);
            }
        }
        match method {
            GreedyMethod::TimeDependent => {
                if selected_indices.contains(&argmax) {
                    return Err(CoreError::GreedyStagnation {
                        xi: training[argmax].clone(),
                        index: argmax,
                        indicator: max_val,
                    });
                }
                if selected_indices.len() == training.len() {
                    break (basis, offline, eim);
                }
            }
            GreedyMethod::PodEnrichment => {
                if max_val < best_indicator {
                    best_indicator = max_val;
                    sweeps_without_progress = 0;
                } else {
                    sweeps_without_progress += 1;
                    if sweeps_without_progress >= training.len() {
                        return Err(CoreError::GreedyStagnation {
                            xi: training[argmax].clone(),
                            index: argmax,
                            indicator: max_val,
                        });
                    }
                }
            }
        }

        select(
            argmax,
            max_val,
            &mut trajectories,
            &mut selected_indices,
            &mut lipschitz,
            &mut full_solves,
            &mut iterations,
        )?;
    };

    Ok(GreedyResult {
        method,
        iterations,
        sweeps,
        final_max_indicator: final_max,
        converged,
        basis,
        offline,
        eim,
        trajectories,
        full_solve_count: full_solves,
    })
}

/// Online indicator of one training parameter; a diverging reduced solve
/// makes the parameter maximally interesting instead of aborting the sweep.
fn sweep_indicator(
    offline: &OfflineQuantities,
    model: &FullOrderModel,
    xi: &[f64],
    config: &GreedyConfig,
) -> Result<f64> {
    let reduced = match solve_reduced(offline, model, xi) {
        Ok(r) => r,
        Err(CoreError::Divergence { step }) => {
            log::warn!("reduced solve diverged at step {step} for xi={xi:?}");
            return Ok(f64::INFINITY);
        }
        Err(CoreError::SingularStep { step, .. }) => {
            log::warn!("reduced step matrix singular at step {step} for xi={xi:?}");
            return Ok(f64::INFINITY);
        }
        Err(e) => return Err(e),
    };
    match integrate_error_estimate(offline, model, &reduced, xi, config.estimator) {
        Ok(est) => Ok(est.global),
        Err(CoreError::EstimatorStability { .. }) => Ok(f64::INFINITY),
        Err(e) => Err(e),
    }
}

/// Append up to `count` leading modes of the projection defect of `traj`
/// against the current time-independent modes.
fn enrich_pod_modes(
    modes: &mut Array2<f64>,
    traj: &Trajectory,
    count: usize,
    grid: &TimeGrid,
) -> Result<()> {
    let dim = traj.dim();
    let nodes = grid.num_nodes();
    let mut defect = traj.states().to_owned();
    if modes.ncols() > 0 {
        let coeffs = modes.t().dot(&defect);
        defect -= &modes.dot(&coeffs);
    }
    let weights = vec![grid.dt(); nodes];
    let p = pod(defect.view(), &weights, count.min(dim.min(nodes)))?;
    if p.achieved < count {
        log::warn!(
            "defect has rank {} < requested enrichment {count}; adding what exists",
            p.achieved
        );
    }
    // re-orthonormalize against the existing modes to curb drift
    let mut new_cols: Vec<Array1<f64>> = Vec::new();
    for j in 0..p.achieved {
        let mut v = p.modes.column(j).to_owned();
        for _pass in 0..2 {
            for c in 0..modes.ncols() {
                let m = modes.column(c).to_owned();
                let proj = m.dot(&v);
                v.scaled_add(-proj, &m);
            }
            for m in &new_cols {
                let proj = m.dot(&v);
                v.scaled_add(-proj, m);
            }
        }
        let norm = v.dot(&v).sqrt();
        if norm <= 1e-10 {
            log::warn!("defect mode {j} lies in the current space; skipping");
            continue;
        }
        v.mapv_inplace(|x| x / norm);
        new_cols.push(v);
    }
    let mut grown = Array2::zeros((dim, modes.ncols() + new_cols.len()));
    grown
        .slice_mut(ndarray::s![.., ..modes.ncols()])
        .assign(modes);
    for (j, v) in new_cols.iter().enumerate() {
        grown.column_mut(modes.ncols() + j).assign(v);
    }
    *modes = grown;
    Ok(())
}

/// Flux snapshots of all distinct selected trajectories, interpolated to the
/// requested tolerance.
fn build_flux_interpolant(
    model: &FullOrderModel,
    trajectories: &[Trajectory],
    params: &[ParamPoint],
    selected_indices: &[usize],
    grid: &TimeGrid,
    tolerance: f64,
) -> Result<EimOperator> {
    let mut distinct: Vec<usize> = Vec::new();
    let mut seen: Vec<usize> = Vec::new();
    for (pos, idx) in selected_indices.iter().enumerate() {
        if !seen.contains(idx) {
            seen.push(*idx);
            distinct.push(pos);
        }
    }
    let nodes = grid.num_nodes();
    let mut snapshots = Array2::zeros((model.dim(), distinct.len() * nodes));
    for (c, &pos) in distinct.iter().enumerate() {
        let traj = &trajectories[pos];
        let xi = &params[pos];
        for k in 0..nodes {
            let h = model.flux().eval(traj.state(k), grid.node(k), xi);
            snapshots.column_mut(c * nodes + k).assign(&h);
        }
    }
    build_eim(snapshots.view(), tolerance)
}
