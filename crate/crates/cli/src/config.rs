//! Experiment configuration: JSON schema, validation and translation to the
//! core types.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use rom_core::estimator::{EstimatorOptions, NonlinearGrowthForm, TimeNorm};
use rom_core::greedy::GreedyConfig;
use rom_core::model::{FullOrderModel, ParameterDomain, TimeGrid};
use rom_core::testcases::{BenchmarkCase, BenchmarkSpec, InitialCondition};

/// Top-level experiment description, deserialized from a JSON file.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ExperimentConfig {
    pub benchmark: BenchmarkConfig,
    /// `"mtd"` (time-dependent spaces) or `"mti"` (time-independent spaces).
    pub method: String,
    pub greedy: GreedySettings,
    pub training: SampleSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validation: Option<SampleSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct BenchmarkConfig {
    /// `"advection1d"`, `"advdiff2d"` or `"burgers1d"`.
    pub case: String,
    /// Node count (per side for the 2D case).
    pub resolution: usize,
    /// `"continuous"` (default) or `"discontinuous"`; 1D advection only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_condition: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GreedySettings {
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<usize>,
    #[serde(default = "default_enrichment")]
    pub enrichment: usize,
    #[serde(default = "default_eim_tolerance")]
    pub eim_tolerance: f64,
    /// `"l2"` (default) or `"linf"`.
    #[serde(default = "default_time_norm")]
    pub time_norm: String,
    /// `"multiplicative"` (default) or `"additive"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nonlinear_form: Option<String>,
}

fn default_enrichment() -> usize {
    1
}

fn default_eim_tolerance() -> f64 {
    1e-10
}

fn default_time_norm() -> String {
    "l2".into()
}

/// Training parameters: an explicit list or a seeded uniform sample.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum SampleSource {
    Points { points: Vec<Vec<f64>> },
    Sample { count: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
pub struct SampleSpec {
    pub count: usize,
    pub seed: u64,
}

/// Greedy method selector mirrored from the config string.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Mtd,
    Mti,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> anyhow::Result<Self> {
        let config: ExperimentConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        self.case()?;
        self.method()?;
        self.time_norm()?;
        self.nonlinear_form()?;
        if let Some(ic) = &self.benchmark.initial_condition {
            if !matches!(ic.as_str(), "continuous" | "discontinuous") {
                anyhow::bail!("unknown initial_condition {ic:?}");
            }
        }
        if self.greedy.enrichment == 0 {
            anyhow::bail!("greedy.enrichment must be at least 1");
        }
        if !(self.greedy.tolerance >= 0.0) {
            anyhow::bail!("greedy.tolerance must be nonnegative");
        }
        if !(self.greedy.eim_tolerance > 0.0) {
            anyhow::bail!("greedy.eim_tolerance must be positive");
        }
        if let SampleSource::Points { points } = &self.training {
            if points.is_empty() {
                anyhow::bail!("training.points must not be empty");
            }
        }
        if let SampleSource::Sample { count, .. } = &self.training {
            if *count == 0 {
                anyhow::bail!("training.count must be positive");
            }
        }
        Ok(())
    }

    pub fn case(&self) -> anyhow::Result<BenchmarkCase> {
        match self.benchmark.case.as_str() {
            "advection1d" => Ok(BenchmarkCase::Advection1d),
            "advdiff2d" => Ok(BenchmarkCase::AdvDiff2d),
            "burgers1d" => Ok(BenchmarkCase::Burgers1d),
            other => anyhow::bail!(
                "unknown benchmark case {other:?}; expected advection1d | advdiff2d | burgers1d"
            ),
        }
    }

    pub fn method(&self) -> anyhow::Result<Method> {
        match self.method.as_str() {
            "mtd" => Ok(Method::Mtd),
            "mti" => Ok(Method::Mti),
            other => anyhow::bail!("unknown method {other:?}; expected mtd | mti"),
        }
    }

    pub fn time_norm(&self) -> anyhow::Result<TimeNorm> {
        match self.greedy.time_norm.as_str() {
            "l2" => Ok(TimeNorm::L2),
            "linf" => Ok(TimeNorm::LInf),
            other => anyhow::bail!("unknown time_norm {other:?}; expected l2 | linf"),
        }
    }

    pub fn nonlinear_form(&self) -> anyhow::Result<NonlinearGrowthForm> {
        match self.greedy.nonlinear_form.as_deref() {
            None | Some("multiplicative") => Ok(NonlinearGrowthForm::Multiplicative),
            Some("additive") => Ok(NonlinearGrowthForm::Additive),
            Some(other) => {
                anyhow::bail!("unknown nonlinear_form {other:?}; expected multiplicative | additive")
            }
        }
    }

    /// Build the benchmark model and domain (without training points).
    pub fn build_model(&self) -> anyhow::Result<(FullOrderModel, TimeGrid, ParameterDomain)> {
        let mut spec = BenchmarkSpec::new(self.case()?, self.benchmark.resolution);
        if let Some(ic) = &self.benchmark.initial_condition {
            spec = spec.with_initial_condition(match ic.as_str() {
                "discontinuous" => InitialCondition::Discontinuous,
                _ => InitialCondition::Continuous,
            });
        }
        Ok(spec.build()?)
    }

    /// Training points, resolving a seeded sample against the domain bounds.
    pub fn training_points(
        &self,
        domain: &ParameterDomain,
        seed_override: Option<u64>,
    ) -> Vec<Vec<f64>> {
        match &self.training {
            SampleSource::Points { points } => points.clone(),
            SampleSource::Sample { count, seed } => {
                crate::sampling::uniform_points(domain.bounds(), *count, seed_override.unwrap_or(*seed))
            }
        }
    }

    pub fn greedy_config(&self) -> anyhow::Result<GreedyConfig> {
        Ok(GreedyConfig {
            tolerance: self.greedy.tolerance,
            max_dim: self.greedy.max_dim,
            max_iterations: self.greedy.max_iterations,
            enrichment: self.greedy.enrichment,
            eim_tolerance: self.greedy.eim_tolerance,
            estimator: EstimatorOptions {
                time_norm: self.time_norm()?,
                nonlinear_form: self.nonlinear_form()?,
            },
        })
    }

    /// Hex SHA-256 of the canonical serialized config.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        let digest = Sha256::digest(&canonical);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
