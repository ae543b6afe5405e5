//! `rom online`: evaluate the reduced model and error indicator at parameter
//! values, with per-point cost independent of the full dimension.

use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;

use rom_core::estimator::{integrate_error_estimate, ErrorEstimate, EstimatorOptions};
use rom_core::reduced::solve_reduced;

use crate::artifact::{load_artifact, LoadedArtifact};
use crate::report::{fmt, write_csv, write_series};
use crate::sampling::uniform_points;
use crate::CliError;

pub struct OnlineArgs {
    pub artifact: PathBuf,
    pub xi: Vec<String>,
    pub count: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub series: bool,
    pub workers: Option<usize>,
    pub seed_override: Option<u64>,
}

pub fn parse_xi_args(raw: &[String], dim: usize) -> Result<Vec<Vec<f64>>, CliError> {
    raw.iter()
        .map(|s| {
            let parts: Result<Vec<f64>, _> =
                s.split(',').map(|p| p.trim().parse::<f64>()).collect();
            let point =
                parts.map_err(|e| CliError::Config(format!("cannot parse --xi {s:?}: {e}")))?;
            if point.len() != dim {
                return Err(CliError::Config(format!(
                    "--xi {s:?} has {} components, expected {dim}",
                    point.len()
                )));
            }
            Ok(point)
        })
        .collect()
}

/// Evaluation points: explicit `--xi` flags, else `--count/--seed`, else the
/// configuration's validation block.
pub fn evaluation_points(
    loaded: &LoadedArtifact,
    xi: &[String],
    count: Option<usize>,
    seed: Option<u64>,
    seed_override: Option<u64>,
) -> Result<Vec<Vec<f64>>, CliError> {
    let dim = loaded.domain.bounds().len();
    if !xi.is_empty() {
        return parse_xi_args(xi, dim);
    }
    let spec = match (count, &loaded.config.validation) {
        (Some(c), v) => {
            let seed = seed
                .or(seed_override)
                .or(v.map(|s| s.seed))
                .ok_or_else(|| CliError::Config("--count requires --seed".into()))?;
            (c, seed)
        }
        (None, Some(v)) => (v.count, seed_override.or(seed).unwrap_or(v.seed)),
        (None, None) => {
            return Err(CliError::Config(
                "no evaluation points: pass --xi or --count/--seed, or put a validation block in the config"
                    .into(),
            ))
        }
    };
    Ok(uniform_points(loaded.domain.bounds(), spec.0, spec.1))
}

pub struct OnlineRow {
    pub xi: Vec<f64>,
    pub in_bounds: bool,
    pub delta: f64,
    pub runtime_s: f64,
    pub estimate: Option<ErrorEstimate>,
}

pub fn evaluate_online(
    loaded: &LoadedArtifact,
    points: &[Vec<f64>],
    options: EstimatorOptions,
) -> Vec<OnlineRow> {
    points
        .par_iter()
        .map(|xi| {
            let start = Instant::now();
            let outcome = solve_reduced(&loaded.offline, &loaded.model, xi).and_then(|reduced| {
                integrate_error_estimate(&loaded.offline, &loaded.model, &reduced, xi, options)
            });
            let runtime_s = start.elapsed().as_secs_f64();
            match outcome {
                Ok(estimate) => OnlineRow {
                    xi: xi.clone(),
                    in_bounds: loaded.domain.contains(xi),
                    delta: estimate.global,
                    runtime_s,
                    estimate: Some(estimate),
                },
                Err(e) => {
                    log::warn!("online evaluation failed for xi={xi:?}: {e}");
                    OnlineRow {
                        xi: xi.clone(),
                        in_bounds: loaded.domain.contains(xi),
                        delta: f64::INFINITY,
                        runtime_s,
                        estimate: None,
                    }
                }
            }
        })
        .collect()
}

pub fn run(args: &OnlineArgs) -> Result<(), CliError> {
    let loaded = load_artifact(&args.artifact)?;
    crate::init_workers(args.workers.or(loaded.config.workers));
    let points = evaluation_points(&loaded, &args.xi, args.count, args.seed, args.seed_override)?;
    let options = EstimatorOptions {
        time_norm: loaded.config.time_norm().map_err(|e| CliError::Config(e.to_string()))?,
        nonlinear_form: loaded
            .config
            .nonlinear_form()
            .map_err(|e| CliError::Config(e.to_string()))?,
    };
    let out_dir = super::offline::resolve_out_dir(args.out.as_deref(), &loaded.config);

    let rows = evaluate_online(&loaded, &points, options);

    let p = loaded.domain.bounds().len();
    let mut header: Vec<String> = vec!["index".into()];
    header.extend((0..p).map(|i| format!("xi_{i}")));
    header.extend(["in_bounds", "delta_0T", "runtime_s"].map(str::to_string));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = vec![i.to_string()];
            r.extend(row.xi.iter().map(|x| fmt(*x)));
            r.push(if row.in_bounds { "1".into() } else { "0".into() });
            r.push(fmt(row.delta));
            r.push(fmt(row.runtime_s));
            r
        })
        .collect();
    write_csv(&out_dir.join("online_results.csv"), &header_refs, &csv_rows)?;

    if args.series {
        for (i, row) in rows.iter().enumerate() {
            if let Some(est) = &row.estimate {
                write_series(
                    &out_dir.join(format!("series/online_{i}.csv")),
                    loaded.grid.dt(),
                    est,
                    None,
                )?;
            }
        }
    }
    println!(
        "online: {} points, results in {}",
        rows.len(),
        out_dir.join("online_results.csv").display()
    );
    Ok(())
}
