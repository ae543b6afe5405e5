//! `rom table1`: the deterministic 1D-advection study. Builds the benchmark
//! at `xi = 0.65`, constructs time-independent spaces from trajectory modes
//! for a ladder of dimensions plus the one-dimensional time-dependent space,
//! and prints the relative errors next to the published reference values.

use std::path::PathBuf;

use ndarray::s;

use rom_core::estimator::{relative_errors, LipschitzTable, TimeNorm};
use rom_core::integrate::solve_full;
use rom_core::pod::pod;
use rom_core::reduced::{
    build_time_dependent_basis, build_time_independent_basis, compute_offline_quantities,
    reconstruct_trajectory, solve_reduced,
};
use rom_core::testcases::{BenchmarkCase, BenchmarkSpec, InitialCondition};

use crate::report::{fmt, write_csv};
use crate::CliError;

pub struct Table1Args {
    pub resolution: usize,
    pub out: Option<PathBuf>,
}

pub const DIMS: [usize; 8] = [1, 2, 5, 10, 20, 50, 100, 200];

/// Published reference values (E2, Einf) per dimension, continuous initial
/// condition.
pub const REFERENCE_CONTINUOUS: [(f64, f64); 8] = [
    (0.027831, 0.76058),
    (0.024075, 0.95713),
    (0.0078461, 0.26984),
    (0.00021853, 0.0075156),
    (4.8616e-9, 1.6719e-7),
    (4.0924e-17, 1.4074e-15),
    (4.4353e-17, 1.5253e-15),
    (4.5623e-17, 1.569e-15),
];

/// Published reference values (E2, Einf) per dimension, discontinuous initial
/// condition.
pub const REFERENCE_DISCONTINUOUS: [(f64, f64); 8] = [
    (0.022116, 0.76058),
    (0.0135, 0.46427),
    (0.0060424, 0.2078),
    (0.0040044, 0.13771),
    (0.002043, 0.07026),
    (4.7139e-5, 0.0016211),
    (1.3891e-12, 4.7771e-11),
    (6.3966e-17, 2.1998e-15),
];

pub struct Table1Row {
    pub ic: &'static str,
    pub dim: usize,
    pub e2: f64,
    pub einf: f64,
    pub ref_e2: f64,
    pub ref_einf: f64,
}

pub struct Table1Result {
    pub rows: Vec<Table1Row>,
    /// (E2, Einf) of the one-dimensional time-dependent space, per IC.
    pub mtd: Vec<(&'static str, f64, f64)>,
}

pub fn compute(resolution: usize) -> anyhow::Result<Table1Result> {
    let xi = [0.65];
    let mut rows = Vec::new();
    let mut mtd = Vec::new();
    for (ic, ic_name, reference) in [
        (InitialCondition::Continuous, "continuous", &REFERENCE_CONTINUOUS),
        (InitialCondition::Discontinuous, "discontinuous", &REFERENCE_DISCONTINUOUS),
    ] {
        let spec = BenchmarkSpec::new(BenchmarkCase::Advection1d, resolution)
            .with_initial_condition(ic);
        let (model, grid, _) = spec.build()?;
        let full = solve_full(&model, &xi, &grid, model.scheme())?;
        let weights = vec![grid.dt(); grid.num_nodes()];
        let max_dim = DIMS[DIMS.len() - 1]
            .min(model.dim())
            .min(grid.num_nodes());
        let p = pod(full.states(), &weights, max_dim)?;
        let empty_table = LipschitzTable::from_parts(vec![], vec![], vec![]);
        for (i, &r) in DIMS.iter().enumerate() {
            let rr = r.min(p.achieved);
            let modes = p.modes.slice(s![.., ..rr]).to_owned();
            let basis = build_time_independent_basis(modes, &grid)?;
            let offline =
                compute_offline_quantities(&basis, &model, None, empty_table.clone())?;
            let reduced = solve_reduced(&offline, &model, &xi)?;
            let rec = reconstruct_trajectory(&basis, &reduced, &grid)?;
            rows.push(Table1Row {
                ic: ic_name,
                dim: r,
                e2: relative_errors(&full, &rec, TimeNorm::L2)?,
                einf: relative_errors(&full, &rec, TimeNorm::LInf)?,
                ref_e2: reference[i].0,
                ref_einf: reference[i].1,
            });
        }
        // the one-dimensional time-dependent space spanned by the trajectory
        let basis = build_time_dependent_basis(std::slice::from_ref(&full))?;
        let offline = compute_offline_quantities(&basis, &model, None, empty_table.clone())?;
        let reduced = solve_reduced(&offline, &model, &xi)?;
        let rec = reconstruct_trajectory(&basis, &reduced, &grid)?;
        mtd.push((
            ic_name,
            relative_errors(&full, &rec, TimeNorm::L2)?,
            relative_errors(&full, &rec, TimeNorm::LInf)?,
        ));
    }
    Ok(Table1Result { rows, mtd })
}

pub fn run(args: &Table1Args) -> Result<(), CliError> {
    let result = compute(args.resolution).map_err(CliError::Failure)?;
    println!("{:<15} {:>4}  {:>13}  {:>13}  {:>9}  {:>13}  {:>13}  {:>9}", "ic", "dim", "E2", "ref_E2", "ratio", "Einf", "ref_Einf", "ratio");
    for row in &result.rows {
        println!(
            "{:<15} {:>4}  {:>13.6e}  {:>13.6e}  {:>9.3}  {:>13.6e}  {:>13.6e}  {:>9.3}",
            row.ic,
            row.dim,
            row.e2,
            row.ref_e2,
            row.e2 / row.ref_e2,
            row.einf,
            row.ref_einf,
            row.einf / row.ref_einf,
        );
    }
    for (ic, e2, einf) in &result.mtd {
        println!("time-dependent space, r = 1, {ic}: E2 = {e2:.6e}, Einf = {einf:.6e}");
    }
    if let Some(out) = &args.out {
        let rows: Vec<Vec<String>> = result
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.ic.to_string(),
                    r.dim.to_string(),
                    fmt(r.e2),
                    fmt(r.ref_e2),
                    fmt(r.einf),
                    fmt(r.ref_einf),
                ]
            })
            .collect();
        write_csv(
            &out.join("table1.csv"),
            &["ic", "dim", "e2", "ref_e2", "einf", "ref_einf"],
            &rows,
        )?;
    }
    Ok(())
}
