//! Behavior of the adaptive selection loops on small models.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use rom_core::error::CoreError;
use rom_core::estimator::{relative_errors, TimeNorm};
use rom_core::greedy::{pod_greedy, t_greedy, GreedyConfig, GreedyMethod};
use rom_core::integrate::solve_full;
use rom_core::reduced::{reconstruct_trajectory, solve_reduced};
use rom_core::testcases::{BenchmarkCase, BenchmarkSpec};

fn training_points(lo: f64, hi: f64, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| vec![rng.gen_range(lo..hi)]).collect()
}

#[test]
fn single_training_point_converges_to_interpolation() {
    let (model, grid, domain) = BenchmarkSpec::new(BenchmarkCase::Advection1d, 101).build().unwrap();
    let domain = domain.with_training(vec![vec![0.65]]).unwrap();
    // the indicator at a selected point bottoms out at the residual noise
    // floor of the quadratic expansion, not at machine precision
    let config = GreedyConfig { tolerance: 5e-8, ..GreedyConfig::default() };
    let result = t_greedy(&model, &domain, &grid, &config).unwrap();
    assert!(result.converged);
    assert_eq!(result.iterations.len(), 1);
    assert_eq!(result.full_solve_count, 1);
    assert!(result.final_max_indicator < 5e-8);
    // the one-point ROM reproduces that trajectory
    let reduced = solve_reduced(&result.offline, &model, &[0.65]).unwrap();
    let rec = reconstruct_trajectory(&result.basis, &reduced, &grid).unwrap();
    let full = solve_full(&model, &[0.65], &grid, model.scheme()).unwrap();
    assert!(relative_errors(&full, &rec, TimeNorm::L2).unwrap() <= 1e-12);
}

#[test]
fn infinite_tolerance_returns_empty_result() {
    let (model, grid, domain) = BenchmarkSpec::new(BenchmarkCase::Advection1d, 64).build().unwrap();
    let domain = domain.with_training(training_points(-1.0, 1.0, 5, 1)).unwrap();
    let config = GreedyConfig { tolerance: f64::INFINITY, ..GreedyConfig::default() };
    for run in [t_greedy, pod_greedy] {
        let result = run(&model, &domain, &grid, &config).unwrap();
        assert!(result.converged);
        assert!(result.iterations.is_empty());
        assert_eq!(result.basis.rank(), 0);
        assert_eq!(result.full_solve_count, 0);
    }
}

#[test]
fn t_greedy_converges_and_selected_points_stay_cold() {
    let (model, grid, domain) = BenchmarkSpec::new(BenchmarkCase::Advection1d, 101).build().unwrap();
    let domain = domain.with_training(training_points(-1.0, 1.0, 8, 7)).unwrap();
    let config = GreedyConfig { tolerance: 1e-8, max_dim: Some(8), ..GreedyConfig::default() };
    let result = t_greedy(&model, &domain, &grid, &config).unwrap();
    assert_eq!(result.method, GreedyMethod::TimeDependent);
    // distinct selections
    let mut seen = result
        .iterations
        .iter()
        .map(|it| it.training_index)
        .collect::<Vec<_>>();
    seen.sort_unstable();
    seen.dedup();
    assert_eq!(seen.len(), result.iterations.len());
    // budget accounting: one full solve per iteration
    assert_eq!(result.full_solve_count, result.iterations.len());
    assert_eq!(result.sweeps.len(), result.iterations.len());
    // indicators of selected parameters collapse after selection
    for it in &result.iterations {
        let reduced = solve_reduced(&result.offline, &model, &it.selected).unwrap();
        let rec = reconstruct_trajectory(&result.basis, &reduced, &grid).unwrap();
        let full = solve_full(&model, &it.selected, &grid, model.scheme()).unwrap();
        let e2 = relative_errors(&full, &rec, TimeNorm::L2).unwrap();
        assert!(e2 <= 1e-11, "selected {:?}: E2 = {e2:.3e}", it.selected);
    }
}

#[test]
fn t_greedy_nesting_of_reduced_spaces() {
    let (model, grid, domain) = BenchmarkSpec::new(BenchmarkCase::Burgers1d, 60).build().unwrap();
    let domain = domain
        .with_training(vec![vec![0.012], vec![0.02], vec![0.035], vec![0.05]])
        .unwrap();
    let mut config = GreedyConfig { tolerance: 0.0, max_dim: Some(3), ..GreedyConfig::default() };
    config.max_iterations = Some(3);
    let coarse_cfg = GreedyConfig { max_dim: Some(2), max_iterations: Some(2), ..config.clone() };
    let coarse = t_greedy(&model, &domain, &grid, &coarse_cfg).unwrap();
    let fine = t_greedy(&model, &domain, &grid, &config).unwrap();
    // the first selections agree, so the coarse space embeds in the fine one
    for k in (0..=grid.steps()).step_by(40) {
        let vc = coarse.basis.at(k);
        let vf = fine.basis.at(k);
        let coeff = vf.t().dot(&vc);
        let recon = vf.dot(&coeff);
        let resid = (&recon - &vc).mapv(|v| v * v).sum().sqrt();
        assert!(resid <= 1e-10, "node {k}: nesting residual {resid:.3e}");
    }
}

#[test]
fn pod_greedy_first_enrichment_is_leading_mode() {
    let (model, grid, domain) = BenchmarkSpec::new(BenchmarkCase::Advection1d, 101).build().unwrap();
    let domain = domain.with_training(vec![vec![0.3]]).unwrap();
    let config = GreedyConfig {
        tolerance: 0.0,
        max_iterations: Some(1),
        ..GreedyConfig::default()
    };
    let result = pod_greedy(&model, &domain, &grid, &config).unwrap();
    assert_eq!(result.basis.rank(), 1);
    assert!(result.basis.is_time_independent());
    // against the direct leading mode of the trajectory
    let traj = solve_full(&model, &[0.3], &grid, model.scheme()).unwrap();
    let weights = vec![grid.dt(); grid.num_nodes()];
    let p = rom_core::pod::pod(traj.states(), &weights, 1).unwrap();
    let dot = result.basis.at(0).column(0).dot(&p.modes.column(0));
    assert!((dot.abs() - 1.0).abs() <= 1e-10, "alignment {dot}");
}

#[test]
fn pod_greedy_saturates_single_point() {
    let (model, grid, domain) = BenchmarkSpec::new(BenchmarkCase::AdvDiff2d, 7).build().unwrap();
    let domain = domain.with_training(vec![vec![0.4, -0.3]]).unwrap();
    let config = GreedyConfig {
        tolerance: 1e-8,
        max_dim: Some(20),
        ..GreedyConfig::default()
    };
    let result = pod_greedy(&model, &domain, &grid, &config).unwrap();
    assert!(result.converged, "indicator history: {:?}", result.sweeps);
    // re-selection of the single point is legal and each iteration re-solves
    assert_eq!(result.full_solve_count, result.iterations.len());
    assert!(result.iterations.len() > 1);
    // dimensions grow by one per iteration
    for (i, (dim, _)) in result.sweeps.iter().enumerate() {
        assert_eq!(*dim, i + 1);
    }
}

#[test]
fn t_greedy_stagnation_on_duplicate_training_points() {
    let (model, grid, domain) = BenchmarkSpec::new(BenchmarkCase::Advection1d, 64).build().unwrap();
    let domain = domain.with_training(vec![vec![0.5], vec![0.5]]).unwrap();
    // zero tolerance can never be reached; the argmax falls back onto the
    // already selected duplicate
    let config = GreedyConfig { tolerance: 0.0, ..GreedyConfig::default() };
    match t_greedy(&model, &domain, &grid, &config) {
        Err(CoreError::GreedyStagnation { .. }) => {}
        other => panic!("expected stagnation, got {other:?}"),
    }
}

#[test]
fn greedy_indicator_decreases_overall() {
    let (model, grid, domain) = BenchmarkSpec::new(BenchmarkCase::Burgers1d, 60).build().unwrap();
    let domain = domain.with_training(training_points(0.01, 0.06, 10, 3)).unwrap();
    let config = GreedyConfig { tolerance: 1e-5, max_dim: Some(10), ..GreedyConfig::default() };
    let result = t_greedy(&model, &domain, &grid, &config).unwrap();
    assert!(result.sweeps.len() >= 2);
    let first = result.sweeps.first().unwrap().1;
    let last = result.sweeps.last().unwrap().1;
    assert!(
        last < first,
        "indicator did not decrease: {first:.3e} -> {last:.3e} ({:?})",
        result.sweeps
    );
}
