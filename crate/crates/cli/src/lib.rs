//! Command-line frontend: experiment configuration, offline/online
//! orchestration, artifact persistence and CSV reporting.

pub mod artifact;
pub mod commands;
pub mod config;
pub mod report;
pub mod sampling;

/// Command outcome with the exit-code split the binary promises:
/// configuration problems exit with 2, numeric/runtime failures with 3.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Failure(anyhow::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Failure(e) => write!(f, "{e}"),
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Failure(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Failure(_) => 3,
        }
    }
}

/// Configure the global worker pool once; later calls are no-ops.
pub fn init_workers(workers: Option<usize>) {
    if let Some(n) = workers {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}
