//! `rom validate`: compare the reduced model against full-order solves on a
//! validation set, reporting relative errors, estimates and effectivities.

use std::path::PathBuf;

use rayon::prelude::*;

use rom_core::estimator::{
    effectivity, integrate_error_estimate, relative_errors, EstimatorOptions, TimeNorm,
};
use rom_core::integrate::solve_full;
use rom_core::reduced::{reconstruct, reconstruct_trajectory, solve_reduced};

use crate::artifact::{load_artifact, LoadedArtifact};
use crate::report::{fmt, write_csv, write_series};
use crate::CliError;

pub struct ValidateArgs {
    pub artifact: PathBuf,
    pub count: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub series: bool,
    pub workers: Option<usize>,
    pub seed_override: Option<u64>,
    pub xi: Vec<String>,
}

pub struct ValidateRow {
    pub xi: Vec<f64>,
    pub e2: f64,
    pub einf: f64,
    pub delta: f64,
    pub mean_kappa: f64,
}

pub fn validate_points(
    loaded: &LoadedArtifact,
    points: &[Vec<f64>],
    options: EstimatorOptions,
    out_dir: Option<&std::path::Path>,
    series: bool,
) -> Result<Vec<ValidateRow>, CliError> {
    let results: Vec<anyhow::Result<ValidateRow>> = points
        .par_iter()
        .enumerate()
        .map(|(i, xi)| -> anyhow::Result<_> {
            let full = solve_full(&loaded.model, xi, &loaded.grid, loaded.model.scheme())?;
            let reduced = solve_reduced(&loaded.offline, &loaded.model, xi)?;
            let estimate =
                integrate_error_estimate(&loaded.offline, &loaded.model, &reduced, xi, options)?;
            let rec = reconstruct_trajectory(&loaded.basis, &reduced, &loaded.grid)?;
            let e2 = relative_errors(&full, &rec, TimeNorm::L2)?;
            let einf = relative_errors(&full, &rec, TimeNorm::LInf)?;
            let exact: Vec<f64> = (0..=loaded.grid.steps())
                .map(|k| {
                    let diff = &reconstruct(&loaded.basis, &reduced, k) - &full.state(k);
                    diff.dot(&diff).sqrt()
                })
                .collect();
            let eff = effectivity(&estimate, &exact);
            if series {
                if let Some(dir) = out_dir {
                    write_series(
                        &dir.join(format!("series/validate_{i}.csv")),
                        loaded.grid.dt(),
                        &estimate,
                        Some((&exact, &eff)),
                    )?;
                }
            }
            Ok(ValidateRow {
                xi: xi.clone(),
                e2,
                einf,
                delta: estimate.global,
                mean_kappa: eff.mean,
            })
        })
        .collect();
    let mut rows = Vec::with_capacity(results.len());
    for r in results {
        rows.push(r.map_err(CliError::Failure)?);
    }
    Ok(rows)
}

pub fn run(args: &ValidateArgs) -> Result<(), CliError> {
    let loaded = load_artifact(&args.artifact)?;
    crate::init_workers(args.workers.or(loaded.config.workers));
    let points = super::online::evaluation_points(
        &loaded,
        &args.xi,
        args.count,
        args.seed,
        args.seed_override,
    )?;
    let options = EstimatorOptions {
        time_norm: loaded.config.time_norm().map_err(|e| CliError::Config(e.to_string()))?,
        nonlinear_form: loaded
            .config
            .nonlinear_form()
            .map_err(|e| CliError::Config(e.to_string()))?,
    };
    let out_dir = super::offline::resolve_out_dir(args.out.as_deref(), &loaded.config);

    let rows = validate_points(&loaded, &points, options, Some(&out_dir), args.series)?;

    let p = loaded.domain.bounds().len();
    let mut header: Vec<String> = vec!["index".into()];
    header.extend((0..p).map(|i| format!("xi_{i}")));
    header.extend(["e2", "einf", "delta_0T", "mean_kappa"].map(str::to_string));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = vec![i.to_string()];
            r.extend(row.xi.iter().map(|x| fmt(*x)));
            r.push(fmt(row.e2));
            r.push(fmt(row.einf));
            r.push(fmt(row.delta));
            r.push(fmt(row.mean_kappa));
            r
        })
        .collect();
    write_csv(&out_dir.join("validate_results.csv"), &header_refs, &csv_rows)?;

    let mean = |f: &dyn Fn(&ValidateRow) -> f64| {
        rows.iter().map(|r| f(r)).sum::<f64>() / rows.len().max(1) as f64
    };
    let max = |f: &dyn Fn(&ValidateRow) -> f64| {
        rows.iter().map(|r| f(r)).fold(f64::NEG_INFINITY, f64::max)
    };
    let summary = vec![
        vec!["count".to_string(), rows.len().to_string()],
        vec!["mean_e2".to_string(), fmt(mean(&|r| r.e2))],
        vec!["max_e2".to_string(), fmt(max(&|r| r.e2))],
        vec!["mean_einf".to_string(), fmt(mean(&|r| r.einf))],
        vec!["max_einf".to_string(), fmt(max(&|r| r.einf))],
    ];
    write_csv(&out_dir.join("validate_summary.csv"), &["metric", "value"], &summary)?;

    println!(
        "validate: {} points, mean E2 = {}, max E2 = {}",
        rows.len(),
        fmt(mean(&|r| r.e2)),
        fmt(max(&|r| r.e2))
    );
    Ok(())
}
