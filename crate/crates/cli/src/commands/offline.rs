//! `rom offline`: run the greedy construction end to end and persist the
//! artifact plus the iteration history.

use std::fs;
use std::path::{Path, PathBuf};

use rom_core::greedy::{pod_greedy, t_greedy};

use crate::artifact::write_artifact;
use crate::config::{ExperimentConfig, Method};
use crate::report::{fmt, write_csv};
use crate::CliError;

pub struct OfflineArgs {
    pub config: PathBuf,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub seed_override: Option<u64>,
}

pub fn run(args: &OfflineArgs) -> Result<(), CliError> {
    let text = fs::read_to_string(&args.config)
        .map_err(|e| CliError::Config(format!("cannot read {:?}: {e}", args.config)))?;
    let config =
        ExperimentConfig::from_json(&text).map_err(|e| CliError::Config(e.to_string()))?;
    let out_dir = resolve_out_dir(args.out.as_deref(), &config);
    fs::create_dir_all(&out_dir).map_err(anyhow::Error::from)?;

    crate::init_workers(args.workers.or(config.workers));

    let (model, grid, domain) = config.build_model().map_err(|e| CliError::Config(e.to_string()))?;
    let training = config.training_points(&domain, args.seed_override);
    let domain = domain
        .with_training(training)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let greedy_config = config.greedy_config().map_err(|e| CliError::Config(e.to_string()))?;

    let result = match config.method().map_err(|e| CliError::Config(e.to_string()))? {
        Method::Mtd => t_greedy(&model, &domain, &grid, &greedy_config),
        Method::Mti => pod_greedy(&model, &domain, &grid, &greedy_config),
    }
    .map_err(anyhow::Error::from)?;

    if result.iterations.is_empty() {
        log::warn!("greedy produced an empty reduced space (tolerance already satisfied)");
    }

    let artifact_path = out_dir.join("artifact.rom");
    write_artifact(&artifact_path, &config, &grid, &result)?;

    let p = domain.bounds().len();
    let mut header: Vec<String> = vec!["iteration".into()];
    header.extend((0..p).map(|i| format!("xi_{i}")));
    header.extend(
        ["indicator", "dim", "max_indicator", "full_solves"].map(str::to_string),
    );
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows: Vec<Vec<String>> = result
        .iterations
        .iter()
        .zip(&result.sweeps)
        .enumerate()
        .map(|(i, (it, (dim, max)))| {
            let mut row = vec![(i + 1).to_string()];
            row.extend(it.selected.iter().map(|x| fmt(*x)));
            row.push(fmt(it.indicator));
            row.push(dim.to_string());
            row.push(fmt(*max));
            row.push(it.full_solves.to_string());
            row
        })
        .collect();
    write_csv(&out_dir.join("greedy_history.csv"), &header_refs, &rows)?;

    println!(
        "offline: method={} dim={} iterations={} converged={} final_max_indicator={} artifact={}",
        config.method,
        result.basis.rank(),
        result.iterations.len(),
        result.converged,
        fmt(result.final_max_indicator),
        artifact_path.display()
    );
    Ok(())
}

pub fn resolve_out_dir(cli_out: Option<&Path>, config: &ExperimentConfig) -> PathBuf {
    cli_out
        .map(Path::to_path_buf)
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."))
}
