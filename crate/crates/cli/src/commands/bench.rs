//! `rom bench`: time the online phase of an artifact over a parameter sweep.
//! The per-point cost must not depend on the full dimension; comparing two
//! artifacts that differ only in resolution makes that measurable.

use std::path::PathBuf;
use std::time::Instant;

use rom_core::estimator::{integrate_error_estimate, EstimatorOptions};
use rom_core::reduced::solve_reduced;

use crate::artifact::load_artifact;
use crate::report::fmt;
use crate::sampling::uniform_points;
use crate::CliError;

pub struct BenchArgs {
    pub artifact: PathBuf,
    pub count: usize,
    pub seed: u64,
    pub repeat: usize,
}

pub struct BenchOutcome {
    pub per_point_median_s: f64,
    pub per_point_best_s: f64,
}

pub fn measure(args: &BenchArgs) -> Result<BenchOutcome, CliError> {
    let loaded = load_artifact(&args.artifact)?;
    let points = uniform_points(loaded.domain.bounds(), args.count, args.seed);
    let options = EstimatorOptions {
        time_norm: loaded.config.time_norm().map_err(|e| CliError::Config(e.to_string()))?,
        nonlinear_form: loaded
            .config
            .nonlinear_form()
            .map_err(|e| CliError::Config(e.to_string()))?,
    };
    let mut per_rep = Vec::with_capacity(args.repeat);
    for _ in 0..args.repeat.max(1) {
        let start = Instant::now();
        for xi in &points {
            let reduced =
                solve_reduced(&loaded.offline, &loaded.model, xi).map_err(anyhow::Error::from)?;
            let _ = integrate_error_estimate(&loaded.offline, &loaded.model, &reduced, xi, options)
                .map_err(anyhow::Error::from)?;
        }
        per_rep.push(start.elapsed().as_secs_f64() / points.len() as f64);
    }
    per_rep.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(BenchOutcome {
        per_point_median_s: per_rep[per_rep.len() / 2],
        per_point_best_s: per_rep[0],
    })
}

pub fn run(args: &BenchArgs) -> Result<(), CliError> {
    let outcome = measure(args)?;
    println!(
        "bench: points={} repeat={} per_point_median_s={} per_point_best_s={}",
        args.count,
        args.repeat,
        fmt(outcome.per_point_median_s),
        fmt(outcome.per_point_best_s)
    );
    Ok(())
}
