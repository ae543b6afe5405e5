//! Offline artifact: a single binary container with a JSON header (metadata,
//! shapes, config echo and hash) followed by little-endian IEEE-754 arrays in
//! the order declared by the header. Files round-trip byte-exactly: the
//! header serialization is deterministic and the payload is raw f64 data.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use anyhow::{bail, Context};
use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use rom_core::eim::EimOperator;
use rom_core::estimator::{LipschitzTable, TermBound};
use rom_core::greedy::{GreedyMethod, GreedyResult};
use rom_core::integrate::Trajectory;
use rom_core::model::{FullOrderModel, ParameterDomain, Scheme, TimeGrid};
use rom_core::reduced::{
    BasisStorage, InitialData, OfflineQuantities, SamplingPlan, StepBlocks, StepMatrixStorage,
    StepStorage, TimeDependentBasis,
};

use crate::config::ExperimentConfig;

const MAGIC: &[u8; 8] = b"ROMART\x00\x01";
const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct ArrayEntry {
    name: String,
    shape: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IterationMeta {
    pub xi: Vec<f64>,
    pub training_index: usize,
    /// Indicator that drove the selection; `None` for the seed.
    pub indicator: Option<f64>,
    pub full_solves: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct EimMeta {
    magic: Vec<usize>,
    tolerance: f64,
    achieved_error: f64,
    converged: bool,
    condition: f64,
    error_history: Vec<(usize, f64)>,
}

#[derive(Debug, Serialize, Deserialize)]
struct TermBoundMeta {
    constant: Option<(f64, f64)>,
    per_step: Option<Vec<(f64, f64)>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SamplingMeta {
    magic: Vec<usize>,
    deps: Vec<usize>,
    vsub_constant: bool,
}

#[derive(Debug, Serialize, Deserialize)]
struct Meta {
    method: String,
    scheme: String,
    dim: usize,
    steps: usize,
    horizon: f64,
    rank: usize,
    eim_order: usize,
    num_op_terms: usize,
    num_src_terms: usize,
    basis_constant: bool,
    blocks_constant: bool,
    basis_completions: Vec<(usize, usize)>,
    converged: bool,
    final_max_indicator: f64,
    full_solve_count: usize,
    iterations: Vec<IterationMeta>,
    sweeps: Vec<(usize, f64)>,
    eim: Option<EimMeta>,
    op_bounds: Vec<TermBoundMeta>,
    flux_params: Vec<Vec<f64>>,
    sampling: Option<SamplingMeta>,
    /// Initial projection defect for a parameter-independent initial state.
    initial_delta0: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    format_version: u32,
    config_hash: String,
    config: ExperimentConfig,
    meta: Meta,
    arrays: Vec<ArrayEntry>,
}

/// Everything reconstructed from an artifact file.
pub struct LoadedArtifact {
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub method: GreedyMethod,
    pub model: FullOrderModel,
    pub grid: TimeGrid,
    pub domain: ParameterDomain,
    pub basis: TimeDependentBasis,
    pub offline: OfflineQuantities,
    pub eim: Option<EimOperator>,
    pub trajectories: Vec<Trajectory>,
    pub iterations: Vec<IterationMeta>,
    pub sweeps: Vec<(usize, f64)>,
    pub converged: bool,
    pub final_max_indicator: f64,
    pub full_solve_count: usize,
}

struct ArrayWriter {
    entries: Vec<ArrayEntry>,
    data: Vec<f64>,
}

impl ArrayWriter {
    fn new() -> Self {
        Self { entries: Vec::new(), data: Vec::new() }
    }

    fn push(&mut self, name: &str, shape: Vec<usize>, values: impl IntoIterator<Item = f64>) {
        let before = self.data.len();
        self.data.extend(values);
        let count: usize = shape.iter().product();
        assert_eq!(self.data.len() - before, count, "array {name} shape mismatch");
        self.entries.push(ArrayEntry { name: name.to_string(), shape });
    }

    fn push_mat(&mut self, name: &str, m: &Array2<f64>) {
        self.push(name, vec![m.nrows(), m.ncols()], m.iter().cloned());
    }

    fn push_mats(&mut self, name: &str, mats: &[Array2<f64>], inner: (usize, usize)) {
        let values: Vec<f64> = mats.iter().flat_map(|m| m.iter().cloned()).collect();
        self.push(name, vec![mats.len(), inner.0, inner.1], values);
    }

    fn push_vecs(&mut self, name: &str, vecs: &[Array1<f64>], inner: usize) {
        let values: Vec<f64> = vecs.iter().flat_map(|v| v.iter().cloned()).collect();
        self.push(name, vec![vecs.len(), inner], values);
    }
}

struct ArrayReader {
    entries: Vec<ArrayEntry>,
    data: Vec<f64>,
    offsets: Vec<usize>,
}

impl ArrayReader {
    fn new(entries: Vec<ArrayEntry>, data: Vec<f64>) -> anyhow::Result<Self> {
        let mut offsets = Vec::with_capacity(entries.len());
        let mut at = 0usize;
        for e in &entries {
            offsets.push(at);
            at += e.shape.iter().product::<usize>();
        }
        if at != data.len() {
            bail!("artifact payload length {} does not match declared shapes {at}", data.len());
        }
        Ok(Self { entries, data, offsets })
    }

    fn find(&self, name: &str) -> anyhow::Result<(usize, &[usize])> {
        for (i, e) in self.entries.iter().enumerate() {
            if e.name == name {
                return Ok((i, &e.shape));
            }
        }
        bail!("artifact array {name:?} missing")
    }

    fn slice(&self, idx: usize) -> &[f64] {
        let start = self.offsets[idx];
        let len: usize = self.entries[idx].shape.iter().product();
        &self.data[start..start + len]
    }

    fn mat(&self, name: &str) -> anyhow::Result<Array2<f64>> {
        let (idx, shape) = self.find(name)?;
        anyhow::ensure!(shape.len() == 2, "array {name} is not a matrix");
        Ok(Array2::from_shape_vec((shape[0], shape[1]), self.slice(idx).to_vec())?)
    }

    fn mats(&self, name: &str) -> anyhow::Result<Vec<Array2<f64>>> {
        let (idx, shape) = self.find(name)?;
        anyhow::ensure!(shape.len() == 3, "array {name} is not a matrix sequence");
        let (n, r, c) = (shape[0], shape[1], shape[2]);
        let flat = self.slice(idx);
        (0..n)
            .map(|i| {
                Array2::from_shape_vec((r, c), flat[i * r * c..(i + 1) * r * c].to_vec())
                    .map_err(Into::into)
            })
            .collect()
    }

    fn vecs(&self, name: &str) -> anyhow::Result<Vec<Array1<f64>>> {
        let (idx, shape) = self.find(name)?;
        anyhow::ensure!(shape.len() == 2, "array {name} is not a vector sequence");
        let (n, len) = (shape[0], shape[1]);
        let flat = self.slice(idx);
        Ok((0..n)
            .map(|i| Array1::from_vec(flat[i * len..(i + 1) * len].to_vec()))
            .collect())
    }
}

fn scheme_tag(s: Scheme) -> &'static str {
    match s {
        Scheme::SemiImplicit => "semi_implicit",
        Scheme::Explicit => "explicit",
    }
}

fn push_step_blocks(w: &mut ArrayWriter, blocks: &[&StepBlocks], r: usize, m: usize, qa: usize, qg: usize) {
    let s = blocks.len();
    let cat_mats = |field: fn(&StepBlocks) -> &Vec<Array2<f64>>| -> Vec<Array2<f64>> {
        blocks.iter().flat_map(|b| field(b).iter().cloned()).collect()
    };
    let cat_vecs = |field: fn(&StepBlocks) -> &Vec<Array1<f64>>| -> Vec<Array1<f64>> {
        blocks.iter().flat_map(|b| field(b).iter().cloned()).collect()
    };
    w.push(
        "blocks/op_proj",
        vec![s, qa, r, r],
        cat_mats(|b| &b.op_proj).iter().flat_map(|x| x.iter().cloned()).collect::<Vec<_>>(),
    );
    w.push_mats(
        "blocks/drift_proj",
        &blocks.iter().map(|b| b.drift_proj.clone()).collect::<Vec<_>>(),
        (r, r),
    );
    w.push_mats(
        "blocks/eim_proj",
        &blocks.iter().map(|b| b.eim_proj.clone()).collect::<Vec<_>>(),
        (r, m),
    );
    w.push(
        "blocks/src_proj",
        vec![s, qg, r],
        cat_vecs(|b| &b.src_proj).iter().flat_map(|x| x.iter().cloned()).collect::<Vec<_>>(),
    );
    w.push(
        "blocks/op_op",
        vec![s, qa * qa, r, r],
        cat_mats(|b| &b.op_op).iter().flat_map(|x| x.iter().cloned()).collect::<Vec<_>>(),
    );
    w.push(
        "blocks/drift_op",
        vec![s, qa, r, r],
        cat_mats(|b| &b.drift_op).iter().flat_map(|x| x.iter().cloned()).collect::<Vec<_>>(),
    );
    w.push_mats(
        "blocks/drift_drift",
        &blocks.iter().map(|b| b.drift_drift.clone()).collect::<Vec<_>>(),
        (r, r),
    );
    w.push_mats(
        "blocks/drift_eim",
        &blocks.iter().map(|b| b.drift_eim.clone()).collect::<Vec<_>>(),
        (r, m),
    );
    w.push(
        "blocks/op_eim",
        vec![s, qa, r, m],
        cat_mats(|b| &b.op_eim).iter().flat_map(|x| x.iter().cloned()).collect::<Vec<_>>(),
    );
    w.push_mats(
        "blocks/eim_eim",
        &blocks.iter().map(|b| b.eim_eim.clone()).collect::<Vec<_>>(),
        (m, m),
    );
    w.push(
        "blocks/drift_src",
        vec![s, qg, r],
        cat_vecs(|b| &b.drift_src).iter().flat_map(|x| x.iter().cloned()).collect::<Vec<_>>(),
    );
    w.push(
        "blocks/op_src",
        vec![s, qa * qg, r],
        cat_vecs(|b| &b.op_src).iter().flat_map(|x| x.iter().cloned()).collect::<Vec<_>>(),
    );
    w.push(
        "blocks/eim_src",
        vec![s, qg, m],
        cat_vecs(|b| &b.eim_src).iter().flat_map(|x| x.iter().cloned()).collect::<Vec<_>>(),
    );
    w.push_mats(
        "blocks/src_src",
        &blocks.iter().map(|b| b.src_src.clone()).collect::<Vec<_>>(),
        (qg, qg),
    );
}

fn read_step_blocks(
    r: &ArrayReader,
    s: usize,
    rank: usize,
    m: usize,
    qa: usize,
    qg: usize,
) -> anyhow::Result<Vec<StepBlocks>> {
    let grouped_mats = |name: &str, per: usize, rows: usize, cols: usize| -> anyhow::Result<Vec<Vec<Array2<f64>>>> {
        let (idx, shape) = r.find(name)?;
        anyhow::ensure!(shape == [s, per, rows, cols], "array {name} has unexpected shape {shape:?}");
        let flat = r.slice(idx);
        let stride = rows * cols;
        Ok((0..s)
            .map(|k| {
                (0..per)
                    .map(|i| {
                        let start = (k * per + i) * stride;
                        Array2::from_shape_vec((rows, cols), flat[start..start + stride].to_vec())
                            .unwrap()
                    })
                    .collect()
            })
            .collect())
    };
    let grouped_vecs = |name: &str, per: usize, len: usize| -> anyhow::Result<Vec<Vec<Array1<f64>>>> {
        let (idx, shape) = r.find(name)?;
        anyhow::ensure!(shape == [s, per, len], "array {name} has unexpected shape {shape:?}");
        let flat = r.slice(idx);
        Ok((0..s)
            .map(|k| {
                (0..per)
                    .map(|i| {
                        let start = (k * per + i) * len;
                        Array1::from_vec(flat[start..start + len].to_vec())
                    })
                    .collect()
            })
            .collect())
    };
    let op_proj = grouped_mats("blocks/op_proj", qa, rank, rank)?;
    let drift_proj = r.mats("blocks/drift_proj")?;
    let eim_proj = r.mats("blocks/eim_proj")?;
    let src_proj = grouped_vecs("blocks/src_proj", qg, rank)?;
    let op_op = grouped_mats("blocks/op_op", qa * qa, rank, rank)?;
    let drift_op = grouped_mats("blocks/drift_op", qa, rank, rank)?;
    let drift_drift = r.mats("blocks/drift_drift")?;
    let drift_eim = r.mats("blocks/drift_eim")?;
    let op_eim = grouped_mats("blocks/op_eim", qa, rank, m)?;
    let eim_eim = r.mats("blocks/eim_eim")?;
    let drift_src = grouped_vecs("blocks/drift_src", qg, rank)?;
    let op_src = grouped_vecs("blocks/op_src", qa * qg, rank)?;
    let eim_src = grouped_vecs("blocks/eim_src", qg, m)?;
    let src_src = r.mats("blocks/src_src")?;

    Ok((0..s)
        .map(|k| StepBlocks {
            op_proj: op_proj[k].clone(),
            drift_proj: drift_proj[k].clone(),
            eim_proj: eim_proj[k].clone(),
            src_proj: src_proj[k].clone(),
            op_op: op_op[k].clone(),
            drift_op: drift_op[k].clone(),
            drift_drift: drift_drift[k].clone(),
            drift_eim: drift_eim[k].clone(),
            op_eim: op_eim[k].clone(),
            eim_eim: eim_eim[k].clone(),
            drift_src: drift_src[k].clone(),
            op_src: op_src[k].clone(),
            eim_src: eim_src[k].clone(),
            src_src: src_src[k].clone(),
        })
        .collect())
}

/// Serialize a greedy result into the artifact file at `path`
/// (write-then-rename, no partial files).
pub fn write_artifact(
    path: &Path,
    config: &ExperimentConfig,
    grid: &TimeGrid,
    result: &GreedyResult,
) -> anyhow::Result<()> {
    let offline = &result.offline;
    let r = offline.rank();
    let m = offline.eim_order();
    let qa = offline.num_op_terms();
    let qg = offline.num_src_terms();
    let mut w = ArrayWriter::new();

    let (basis_constant, basis_mats): (bool, Vec<&Array2<f64>>) = match result.basis.storage() {
        BasisStorage::Constant(v) => (true, vec![v]),
        BasisStorage::PerStep(vs) => (false, vs.iter().collect()),
    };
    let basis_owned: Vec<Array2<f64>> = basis_mats.iter().map(|v| (*v).clone()).collect();
    let dim = result.basis.dim();
    w.push_mats("basis", &basis_owned, (dim, r));

    let traj_owned: Vec<Array2<f64>> = result
        .trajectories
        .iter()
        .map(|t| t.states().to_owned())
        .collect();
    w.push_mats("trajectories", &traj_owned, (dim, grid.num_nodes()));

    let blocks_constant = offline.storage.is_constant();
    let block_refs: Vec<&StepBlocks> = match &offline.storage {
        StepStorage::Constant(b) => vec![b],
        StepStorage::PerStep(bs) => bs.iter().collect(),
    };
    push_step_blocks(&mut w, &block_refs, r, m, qa, qg);

    let eim_meta = result.eim.as_ref().map(|e| {
        w.push_mat("eim/basis", &e.basis().to_owned());
        w.push_mat("eim/combined", &e.combined().to_owned());
        EimMeta {
            magic: e.magic_indices().to_vec(),
            tolerance: e.tolerance(),
            achieved_error: e.achieved_error(),
            converged: e.converged(),
            condition: e.condition(),
            error_history: e.error_history().to_vec(),
        }
    });

    let sampling_meta = offline.sampling.as_ref().map(|plan| {
        let (vsub_constant, vsubs): (bool, Vec<Array2<f64>>) = match &plan.vsub {
            StepMatrixStorage::Constant(v) => (true, vec![v.clone()]),
            StepMatrixStorage::PerStep(vs) => (false, vs.clone()),
        };
        w.push_mats("sampling/vsub", &vsubs, (plan.deps.len(), r));
        SamplingMeta {
            magic: plan.magic.clone(),
            deps: plan.deps.clone(),
            vsub_constant,
        }
    });

    let initial_delta0 = match &offline.initial {
        InitialData::Fixed { alpha0, delta0 } => {
            w.push("initial/alpha0", vec![alpha0.len()], alpha0.iter().cloned());
            Some(*delta0)
        }
        InitialData::Parametric { v0 } => {
            w.push_mat("initial/v0", v0);
            None
        }
    };

    let table = &offline.lipschitz;
    let op_bounds: Vec<TermBoundMeta> = table
        .op_bounds()
        .iter()
        .map(|b| match b {
            TermBound::Constant { lambda_max, lambda_max_negated } => TermBoundMeta {
                constant: Some((*lambda_max, *lambda_max_negated)),
                per_step: None,
            },
            TermBound::PerStep(v) => TermBoundMeta { constant: None, per_step: Some(v.clone()) },
        })
        .collect();
    let flux_values: Vec<Array1<f64>> = table
        .flux_values()
        .iter()
        .map(|v| Array1::from_vec(v.clone()))
        .collect();
    w.push_vecs("lipschitz/flux_values", &flux_values, grid.num_nodes());

    let meta = Meta {
        method: match result.method {
            GreedyMethod::TimeDependent => "mtd".into(),
            GreedyMethod::PodEnrichment => "mti".into(),
        },
        scheme: scheme_tag(offline.scheme()).into(),
        dim,
        steps: grid.steps(),
        horizon: grid.horizon(),
        rank: r,
        eim_order: m,
        num_op_terms: qa,
        num_src_terms: qg,
        basis_constant,
        blocks_constant,
        basis_completions: result.basis.completions().to_vec(),
        converged: result.converged,
        final_max_indicator: result.final_max_indicator,
        full_solve_count: result.full_solve_count,
        iterations: result
            .iterations
            .iter()
            .map(|it| IterationMeta {
                xi: it.selected.clone(),
                training_index: it.training_index,
                indicator: if it.indicator.is_finite() { Some(it.indicator) } else { None },
                full_solves: it.full_solves,
            })
            .collect(),
        sweeps: result.sweeps.clone(),
        eim: eim_meta,
        op_bounds,
        flux_params: table.flux_params().to_vec(),
        sampling: sampling_meta,
        initial_delta0,
    };

    let header = Header {
        format_version: FORMAT_VERSION,
        config_hash: config.hash(),
        config: config.clone(),
        meta,
        arrays: w.entries,
    };
    let header_bytes = serde_json::to_vec(&header)?;

    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)
            .with_context(|| format!("creating {:?}", tmp))?;
        f.write_all(MAGIC)?;
        f.write_all(&(header_bytes.len() as u64).to_le_bytes())?;
        f.write_all(&header_bytes)?;
        let mut buf = Vec::with_capacity(w.data.len() * 8);
        for v in &w.data {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        f.write_all(&buf)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).with_context(|| format!("renaming into {:?}", path))?;
    Ok(())
}

/// Load and reconstruct an artifact.
pub fn load_artifact(path: &Path) -> anyhow::Result<LoadedArtifact> {
    let mut f = fs::File::open(path).with_context(|| format!("opening {:?}", path))?;
    let mut magic = [0u8; 8];
    f.read_exact(&mut magic)?;
    if &magic != MAGIC {
        bail!("not an offline artifact (bad magic)");
    }
    let mut len_bytes = [0u8; 8];
    f.read_exact(&mut len_bytes)?;
    let header_len = u64::from_le_bytes(len_bytes) as usize;
    let mut header_bytes = vec![0u8; header_len];
    f.read_exact(&mut header_bytes)?;
    let header: Header = serde_json::from_slice(&header_bytes)?;
    if header.format_version != FORMAT_VERSION {
        bail!("unsupported artifact version {}", header.format_version);
    }
    if header.config.hash() != header.config_hash {
        bail!("config hash mismatch: artifact is inconsistent with its embedded configuration");
    }
    let mut payload = Vec::new();
    f.read_to_end(&mut payload)?;
    if payload.len() % 8 != 0 {
        bail!("artifact payload is not a whole number of f64 values");
    }
    let data: Vec<f64> = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let reader = ArrayReader::new(header.arrays, data)?;
    let meta = header.meta;

    let (model, grid, domain) = header.config.build_model()?;
    anyhow::ensure!(model.dim() == meta.dim, "artifact dimension mismatch");
    anyhow::ensure!(grid.steps() == meta.steps, "artifact grid mismatch");

    let basis_mats = reader.mats("basis")?;
    let storage = if meta.basis_constant {
        BasisStorage::Constant(basis_mats.into_iter().next().context("basis data")?)
    } else {
        BasisStorage::PerStep(basis_mats)
    };
    let basis = TimeDependentBasis::from_parts(
        storage,
        meta.steps,
        grid.dt(),
        meta.basis_completions.clone(),
    );

    let trajectories = reader
        .mats("trajectories")?
        .into_iter()
        .map(|states| Trajectory::from_states(states, grid).map_err(Into::into))
        .collect::<anyhow::Result<Vec<_>>>()?;

    let s = if meta.blocks_constant { 1 } else { meta.steps };
    let blocks =
        read_step_blocks(&reader, s, meta.rank, meta.eim_order, meta.num_op_terms, meta.num_src_terms)?;
    let storage = if meta.blocks_constant {
        StepStorage::Constant(blocks.into_iter().next().context("blocks data")?)
    } else {
        StepStorage::PerStep(blocks)
    };

    let eim = match &meta.eim {
        Some(e) => Some(EimOperator::from_parts(
            reader.mat("eim/basis")?,
            e.magic.clone(),
            reader.mat("eim/combined")?,
            e.tolerance,
            e.achieved_error,
            e.converged,
            e.condition,
            e.error_history.clone(),
        )),
        None => None,
    };

    let sampling = match &meta.sampling {
        Some(sm) => {
            let vsubs = reader.mats("sampling/vsub")?;
            let vsub = if sm.vsub_constant {
                StepMatrixStorage::Constant(vsubs.into_iter().next().context("vsub data")?)
            } else {
                StepMatrixStorage::PerStep(vsubs)
            };
            let positions = sm.deps.iter().enumerate().map(|(p, &g)| (g, p)).collect();
            Some(SamplingPlan { magic: sm.magic.clone(), deps: sm.deps.clone(), positions, vsub })
        }
        None => None,
    };

    let initial = match meta.initial_delta0 {
        Some(delta0) => {
            let (idx, shape) = reader.find("initial/alpha0")?;
            anyhow::ensure!(shape.len() == 1, "initial/alpha0 is not a vector");
            let alpha0 = Array1::from_vec(reader.slice(idx).to_vec());
            InitialData::Fixed { alpha0, delta0 }
        }
        None => InitialData::Parametric { v0: reader.mat("initial/v0")? },
    };

    let op_bounds: Vec<TermBound> = meta
        .op_bounds
        .iter()
        .map(|b| match (&b.constant, &b.per_step) {
            (Some((hi, neg)), _) => Ok(TermBound::Constant {
                lambda_max: *hi,
                lambda_max_negated: *neg,
            }),
            (None, Some(v)) => Ok(TermBound::PerStep(v.clone())),
            _ => bail!("malformed operator bound entry"),
        })
        .collect::<anyhow::Result<_>>()?;
    let flux_values: Vec<Vec<f64>> = reader
        .vecs("lipschitz/flux_values")?
        .into_iter()
        .map(|v| v.to_vec())
        .collect();
    let lipschitz = LipschitzTable::from_parts(op_bounds, meta.flux_params.clone(), flux_values);

    let offline = OfflineQuantities::from_parts(
        model.scheme(),
        meta.steps,
        grid.dt(),
        meta.rank,
        meta.eim_order,
        meta.num_op_terms,
        meta.num_src_terms,
        storage,
        sampling,
        initial,
        lipschitz,
    );

    let method = match meta.method.as_str() {
        "mtd" => GreedyMethod::TimeDependent,
        "mti" => GreedyMethod::PodEnrichment,
        other => bail!("unknown method tag {other:?} in artifact"),
    };

    Ok(LoadedArtifact {
        config: header.config,
        config_hash: header.config_hash,
        method,
        model,
        grid,
        domain,
        basis,
        offline,
        eim,
        trajectories,
        iterations: meta.iterations,
        sweeps: meta.sweeps,
        converged: meta.converged,
        final_max_indicator: meta.final_max_indicator,
        full_solve_count: meta.full_solve_count,
    })
}
