//! Per-time-step orthonormal bases of the reduced spaces.
//!
//! For time-dependent spaces, the basis at each node is obtained by modified
//! Gram-Schmidt over the selected trajectories in selection order, which keeps
//! each basis vector continuous in time for continuous trajectories. The basis
//! velocity is the forward difference `(V^{k+1} - V^k) / dt`.

use ndarray::{Array1, Array2, ArrayView2};

use crate::error::{CoreError, Result};
use crate::integrate::Trajectory;
use crate::model::TimeGrid;

/// Threshold, relative to the snapshot norm, below which a Gram-Schmidt
/// residual counts as linearly dependent.
const DEFICIENCY_THRESHOLD: f64 = 1e-12;

/// Basis matrices, either one per grid node or a single shared matrix.
#[derive(Debug, Clone)]
pub enum BasisStorage {
    PerStep(Vec<Array2<f64>>),
    Constant(Array2<f64>),
}

/// Orthonormal reduced basis over a time grid.
#[derive(Debug, Clone)]
pub struct TimeDependentBasis {
    storage: BasisStorage,
    steps: usize,
    dt: f64,
    rank: usize,
    /// `(node, column)` pairs where a column had to be completed with a
    /// canonical direction because the trajectories are dependent there.
    completions: Vec<(usize, usize)>,
}

impl TimeDependentBasis {
    /// Basis matrix at node `k`.
    pub fn at(&self, k: usize) -> ArrayView2<'_, f64> {
        match &self.storage {
            BasisStorage::PerStep(v) => v[k].view(),
            BasisStorage::Constant(m) => m.view(),
        }
    }

    /// Discrete velocity `(V^{k+1} - V^k) / dt`, exactly zero for
    /// time-independent bases.
    pub fn velocity(&self, k: usize) -> Array2<f64> {
        match &self.storage {
            BasisStorage::Constant(m) => Array2::zeros(m.dim()),
            BasisStorage::PerStep(v) => (&v[k + 1] - &v[k]) / self.dt,
        }
    }

    pub fn is_time_independent(&self) -> bool {
        matches!(self.storage, BasisStorage::Constant(_))
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.at(0).nrows()
    }

    /// Number of time steps `K` (the basis covers `K + 1` nodes).
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn storage(&self) -> &BasisStorage {
        &self.storage
    }

    pub fn completions(&self) -> &[(usize, usize)] {
        &self.completions
    }

    pub fn from_parts(
        storage: BasisStorage,
        steps: usize,
        dt: f64,
        completions: Vec<(usize, usize)>,
    ) -> Self {
        let rank = match &storage {
            BasisStorage::PerStep(v) => v[0].ncols(),
            BasisStorage::Constant(m) => m.ncols(),
        };
        Self { storage, steps, dt, rank, completions }
    }
}

/// Complete column `i` of a partially filled orthonormal matrix with the
/// first canonical direction that has a substantial residual.
fn complete_with_canonical(q: &mut Array2<f64>, i: usize) {
    let d = q.nrows();
    for c in 0..d {
        let mut v = Array1::zeros(d);
        v[c] = 1.0;
        for _pass in 0..2 {
            for j in 0..i {
                let qj = q.column(j).to_owned();
                let proj = qj.dot(&v);
                v.scaled_add(-proj, &qj);
            }
        }
        let norm = v.dot(&v).sqrt();
        if norm > 0.5 {
            v.mapv_inplace(|x| x / norm);
            q.column_mut(i).assign(&v);
            return;
        }
    }
    unreachable!("canonical completion always succeeds for rank < d");
}

/// Build a time-dependent basis from full-order trajectories, one basis
/// vector per trajectory, orthonormalized in selection order at every node.
///
/// Trajectories may be transiently dependent: all share the initial state,
/// and for operators with polynomial parameter dependence the states at step
/// `k` span at most `k + 1` directions regardless of how many parameters were
/// selected. Dependent columns are completed with deterministic canonical
/// directions; the completed directions carry no snapshot content, so the
/// reduced coordinates of the represented states on them stay at round-off
/// level. A trajectory that contributes no direction at any node (e.g. a
/// duplicate of an earlier one) is an error.
pub fn build_time_dependent_basis(trajectories: &[Trajectory]) -> Result<TimeDependentBasis> {
    if trajectories.is_empty() {
        return Err(CoreError::Validation {
            context: "time-dependent basis",
            detail: "need at least one trajectory".into(),
        });
    }
    let grid = trajectories[0].grid();
    let dim = trajectories[0].dim();
    for t in trajectories {
        if t.grid() != grid || t.dim() != dim {
            return Err(CoreError::Validation {
                context: "time-dependent basis",
                detail: "trajectories must share one grid and dimension".into(),
            });
        }
    }
    let r = trajectories.len();
    if r > dim {
        return Err(CoreError::Validation {
            context: "time-dependent basis",
            detail: format!("{r} trajectories exceed state dimension {dim}"),
        });
    }

    let mut per_step = Vec::with_capacity(grid.num_nodes());
    let mut completions: Vec<(usize, usize)> = Vec::new();
    let mut independent_somewhere = vec![false; r];
    let mut first_deficient = vec![None::<(usize, f64)>; r];
    for k in 0..grid.num_nodes() {
        let mut q = Array2::zeros((dim, r));
        for (i, traj) in trajectories.iter().enumerate() {
            let col = traj.state(k).to_owned();
            let norm_in = col.dot(&col).sqrt();
            let mut v = col;
            for _pass in 0..2 {
                for j in 0..i {
                    let qj = q.column(j).to_owned();
                    let proj = qj.dot(&v);
                    v.scaled_add(-proj, &qj);
                }
            }
            let norm_out = v.dot(&v).sqrt();
            if norm_out <= DEFICIENCY_THRESHOLD * norm_in || norm_out == 0.0 {
                complete_with_canonical(&mut q, i);
                completions.push((k, i));
                if first_deficient[i].is_none() {
                    first_deficient[i] = Some((k, norm_out));
                }
            } else {
                v.mapv_inplace(|x| x / norm_out);
                q.column_mut(i).assign(&v);
                independent_somewhere[i] = true;
            }
        }
        per_step.push(q);
    }
    if let Some(i) = independent_somewhere.iter().position(|ok| !ok) {
        let (step, residual) = first_deficient[i].expect("deficient trajectory has a record");
        return Err(CoreError::RankDeficient { step, trajectory: i, residual });
    }

    Ok(TimeDependentBasis {
        storage: BasisStorage::PerStep(per_step),
        steps: grid.steps(),
        dt: grid.dt(),
        rank: r,
        completions,
    })
}

/// Wrap an orthonormal mode matrix as a time-independent basis.
pub fn build_time_independent_basis(
    modes: Array2<f64>,
    grid: &TimeGrid,
) -> Result<TimeDependentBasis> {
    let r = modes.ncols();
    let gram = modes.t().dot(&modes);
    for i in 0..r {
        for j in 0..r {
            let expect = if i == j { 1.0 } else { 0.0 };
            if (gram[[i, j]] - expect).abs() > 1e-10 {
                return Err(CoreError::Validation {
                    context: "time-independent basis",
                    detail: format!(
                        "input not orthonormal: gram[{i}][{j}] = {:.3e}",
                        gram[[i, j]]
                    ),
                });
            }
        }
    }
    Ok(TimeDependentBasis {
        storage: BasisStorage::Constant(modes),
        steps: grid.steps(),
        dt: grid.dt(),
        rank: r,
        completions: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TimeGrid;
    use approx::assert_abs_diff_eq;
    use ndarray::Array2;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn smooth_trajectory(dim: usize, grid: TimeGrid, seed: u64) -> Trajectory {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amps: Vec<f64> = (0..4).map(|_| rng.gen_range(0.5..1.5)).collect();
        let phases: Vec<f64> = (0..4).map(|_| rng.gen_range(0.0..6.0)).collect();
        let states = Array2::from_shape_fn((dim, grid.num_nodes()), |(i, k)| {
            let x = i as f64 / dim as f64;
            let t = grid.node(k);
            (0..4)
                .map(|m| amps[m] * ((m + 1) as f64 * x * 6.0 + phases[m] + t).sin())
                .sum::<f64>()
                + 2.0
        });
        Trajectory::from_states(states, grid).unwrap()
    }

    #[test]
    fn single_trajectory_is_normalized_states() {
        let grid = TimeGrid::new(1.0, 8).unwrap();
        let t = smooth_trajectory(10, grid, 1);
        let basis = build_time_dependent_basis(std::slice::from_ref(&t)).unwrap();
        assert_eq!(basis.rank(), 1);
        for k in 0..=8 {
            let u = t.state(k);
            let norm = u.dot(&u).sqrt();
            for i in 0..10 {
                assert_abs_diff_eq!(basis.at(k)[[i, 0]], u[i] / norm, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn identical_trajectories_are_rejected() {
        let grid = TimeGrid::new(1.0, 5).unwrap();
        let t = smooth_trajectory(8, grid, 2);
        let err = build_time_dependent_basis(&[t.clone(), t]).unwrap_err();
        assert!(matches!(err, CoreError::RankDeficient { trajectory: 1, .. }));
    }

    #[test]
    fn snapshots_span_is_reproduced() {
        let grid = TimeGrid::new(1.0, 12).unwrap();
        let trajs: Vec<Trajectory> =
            (0..3).map(|s| smooth_trajectory(20, grid, 10 + s)).collect();
        let basis = build_time_dependent_basis(&trajs).unwrap();
        for k in 0..=12 {
            let v = basis.at(k);
            // orthonormality
            let gram = v.t().dot(&v);
            for i in 0..3 {
                for j in 0..3 {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(gram[[i, j]], expect, epsilon = 1e-10);
                }
            }
            // every snapshot projects with negligible residual
            for t in &trajs {
                let u = t.state(k).to_owned();
                let coeff = v.t().dot(&u);
                let resid = &u - &v.dot(&coeff);
                let rel = resid.dot(&resid).sqrt() / u.dot(&u).sqrt();
                assert!(rel <= 1e-10, "projection residual {rel}");
            }
        }
    }

    #[test]
    fn shared_initial_state_is_completed_at_start_only() {
        let grid = TimeGrid::new(1.0, 6).unwrap();
        let dim = 12;
        // trajectories agree at k = 0 and branch afterwards
        let mk = |seed: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let dir: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let states = Array2::from_shape_fn((dim, grid.num_nodes()), |(i, k)| {
                let t = grid.node(k);
                (1.0 + i as f64 * 0.1) + t * dir[i] + t * t * (seed as f64)
            });
            Trajectory::from_states(states, grid).unwrap()
        };
        let trajs = vec![mk(1), mk(2), mk(3)];
        let basis = build_time_dependent_basis(&trajs).unwrap();
        assert_eq!(basis.completions(), &[(0, 1), (0, 2)]);
        // the basis at 0 is orthonormal and contains the shared state
        let v0 = basis.at(0);
        let u0 = trajs[0].state(0).to_owned();
        let coeff = v0.t().dot(&u0);
        let resid = &u0 - &v0.dot(&coeff);
        assert!(resid.dot(&resid).sqrt() <= 1e-12 * u0.dot(&u0).sqrt());
        // and the reduced coordinates on completed columns vanish
        assert_abs_diff_eq!(coeff[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(coeff[2], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn time_independent_wrapper_validates_and_zeroes_velocity() {
        let grid = TimeGrid::new(1.0, 4).unwrap();
        let mut modes = Array2::zeros((6, 2));
        modes[[0, 0]] = 1.0;
        modes[[3, 1]] = 1.0;
        let basis = build_time_independent_basis(modes.clone(), &grid).unwrap();
        assert!(basis.is_time_independent());
        for k in 0..4 {
            assert_eq!(basis.velocity(k), Array2::zeros((6, 2)));
        }
        // coordinate truncation projector
        let u = ndarray::array![1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let alpha = basis.at(0).t().dot(&u);
        assert_eq!(alpha, ndarray::array![1.0, 4.0]);

        let mut bad = modes;
        bad[[1, 0]] = 0.3;
        assert!(build_time_independent_basis(bad, &grid).is_err());
    }

    #[test]
    fn full_pod_basis_reconstructs_snapshots() {
        let grid = TimeGrid::new(1.0, 7).unwrap();
        let t = smooth_trajectory(5, grid, 21);
        // rank of the snapshot family is at most 5 = d here
        let weights = vec![grid.dt(); grid.num_nodes()];
        let p = crate::pod::pod(t.states(), &weights, 5).unwrap();
        let basis = build_time_independent_basis(p.modes.clone(), &grid).unwrap();
        if p.achieved == 5 {
            for k in 0..=7 {
                let u = t.state(k).to_owned();
                let rec = basis.at(k).dot(&basis.at(k).t().dot(&u));
                let err = (&u - &rec).dot(&(&u - &rec)).sqrt();
                assert!(err <= 1e-10 * u.dot(&u).sqrt());
            }
        }
    }
}
