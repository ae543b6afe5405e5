use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rom_cli::commands::{bench, offline, online, table1, validate};
use rom_cli::CliError;

/// Reduced-order modeling of parameter-dependent dynamical systems with
/// time-dependent reduced spaces: offline construction, dimension-independent
/// online evaluation, certified error estimation.
#[derive(Parser)]
#[command(name = "rom", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the greedy offline phase and write the artifact.
    Offline {
        /// Experiment configuration (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides the configuration).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for training-set sweeps.
        #[arg(long)]
        workers: Option<usize>,
        /// Override the training sampling seed.
        #[arg(long)]
        seed_override: Option<u64>,
    },
    /// Evaluate the reduced model and error indicator at parameter values.
    Online {
        #[arg(long)]
        artifact: PathBuf,
        /// Explicit parameter point, comma-separated components (repeatable).
        #[arg(long)]
        xi: Vec<String>,
        /// Number of sampled evaluation points.
        #[arg(long)]
        count: Option<usize>,
        /// Seed for sampled evaluation points.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write per-step estimator series files.
        #[arg(long)]
        series: bool,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        seed_override: Option<u64>,
    },
    /// Run full-order solves on a validation set and compare.
    Validate {
        #[arg(long)]
        artifact: PathBuf,
        #[arg(long)]
        xi: Vec<String>,
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write per-step series files (estimate, exact error,
        /// effectivity).
        #[arg(long, default_value_t = true)]
        series: bool,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        seed_override: Option<u64>,
    },
    /// Deterministic 1D-advection error table against reference values.
    Table1 {
        /// Spatial node count.
        #[arg(long, default_value_t = 2001)]
        resolution: usize,
        /// Directory for the CSV copy of the table.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time the online phase of an artifact.
    Bench {
        #[arg(long)]
        artifact: PathBuf,
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, default_value_t = 12345)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        repeat: usize,
    },
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Offline { config, out, workers, seed_override } => {
            offline::run(&offline::OfflineArgs { config, out, workers, seed_override })
        }
        Command::Online { artifact, xi, count, seed, out, series, workers, seed_override } => {
            online::run(&online::OnlineArgs {
                artifact,
                xi,
                count,
                seed,
                out,
                series,
                workers,
                seed_override,
            })
        }
        Command::Validate { artifact, xi, count, seed, out, series, workers, seed_override } => {
            validate::run(&validate::ValidateArgs {
                artifact,
                count,
                seed,
                out,
                series,
                workers,
                seed_override,
                xi,
            })
        }
        Command::Table1 { resolution, out } => table1::run(&table1::Table1Args { resolution, out }),
        Command::Bench { artifact, count, seed, repeat } => {
            bench::run(&bench::BenchArgs { artifact, count, seed, repeat })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("ROM_LOG", "info")).init();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
