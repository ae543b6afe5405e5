//! Parameter-independent precomputation for the online phase.
//!
//! For each time step the residual of the reduced step is a combination of
//! four factor families applied to small vectors:
//!
//! * the basis drift `D^k = (V^{k+1} - V^k)/dt` acting on `alpha^k`,
//! * the affine operator terms `A^i V` acting on the step's operator-side
//!   coefficients,
//! * the interpolation operator `U_m` acting on sampled flux values,
//! * the affine source vectors `g^j`.
//!
//! Two families of blocks are stored: the projections of each factor onto
//! `X^{k+1}` (exactly the reduced step matrices, Eq-level: reduced operators,
//! basis-velocity blocks, interpolation premultipliers, reduced sources), and
//! the Gram blocks between the factors projected onto the orthogonal
//! complement. The latter give the squared residual norm directly as a sum of
//! small quadratic forms. Projecting before forming Grams is essential for
//! accuracy: the factor components orthogonal to the reduced space are of
//! residual size, so round-off in the online sum scales with the residual
//! instead of with the full operator magnitude.

use std::collections::HashMap;

use ndarray::{Array1, Array2, ArrayView2};

use crate::eim::EimOperator;
use crate::error::{CoreError, Result};
use crate::estimator::LipschitzTable;
use crate::model::{FullOrderModel, Scheme};
use crate::reduced::basis::TimeDependentBasis;

/// Per-step reduced blocks; `r` is the basis rank, `m` the interpolation
/// order, `Qa`/`Qg` the affine term counts. `P` denotes the orthogonal
/// projector onto the complement of `X^{k+1}` and `D = (V^{k+1} - V^k)/dt`.
#[derive(Debug, Clone)]
pub struct StepBlocks {
    /// `V^{k+1,T} A^i V` (the reduced operator terms), `Qa` blocks of `r x r`.
    pub op_proj: Vec<Array2<f64>>,
    /// `V^{k+1,T} D`, `r x r`.
    pub drift_proj: Array2<f64>,
    /// `V^{k+1,T} U_m`, `r x m`.
    pub eim_proj: Array2<f64>,
    /// `V^{k+1,T} g^j(t^k)`, `Qg` vectors of length `r`.
    pub src_proj: Vec<Array1<f64>>,
    /// `(P A^i V)^T (P A^j V)`, `Qa * Qa` blocks (row-major in `(i, j)`).
    pub op_op: Vec<Array2<f64>>,
    /// `(P D)^T (P A^i V)`, `Qa` blocks of `r x r`.
    pub drift_op: Vec<Array2<f64>>,
    /// `(P D)^T (P D)`, `r x r`.
    pub drift_drift: Array2<f64>,
    /// `(P D)^T (P U_m)`, `r x m`.
    pub drift_eim: Array2<f64>,
    /// `(P A^i V)^T (P U_m)`, `Qa` blocks of `r x m`.
    pub op_eim: Vec<Array2<f64>>,
    /// `(P U_m)^T (P U_m)`, `m x m`.
    pub eim_eim: Array2<f64>,
    /// `(P D)^T (P g^j)`, `Qg` vectors of length `r`.
    pub drift_src: Vec<Array1<f64>>,
    /// `(P A^i V)^T (P g^j)`, `Qa * Qg` vectors (row-major in `(i, j)`).
    pub op_src: Vec<Array1<f64>>,
    /// `(P U_m)^T (P g^j)`, `Qg` vectors of length `m`.
    pub eim_src: Vec<Array1<f64>>,
    /// `<P g^i, P g^j>`, `Qg x Qg`.
    pub src_src: Array2<f64>,
}

/// Step blocks, shared across steps when nothing is time-dependent.
#[derive(Debug, Clone)]
pub enum StepStorage {
    PerStep(Vec<StepBlocks>),
    Constant(StepBlocks),
}

impl StepStorage {
    pub fn at(&self, k: usize) -> &StepBlocks {
        match self {
            Self::PerStep(v) => &v[k],
            Self::Constant(b) => b,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Self::Constant(_))
    }
}

/// Reduced initial data.
#[derive(Debug, Clone)]
pub enum InitialData {
    /// Parameter-independent initial state: reduced coordinates and initial
    /// projection error are fixed.
    Fixed { alpha0: Array1<f64>, delta0: f64 },
    /// Parameter-dependent initial state: keep `V^0` to project it online.
    Parametric { v0: Array2<f64> },
}

/// Sampled-flux evaluation plan: which state entries feed the flux components
/// at the interpolation indices, and the corresponding basis rows.
#[derive(Debug, Clone)]
pub struct SamplingPlan {
    /// Interpolation indices (flux components to evaluate).
    pub magic: Vec<usize>,
    /// Sorted union of state indices those components read.
    pub deps: Vec<usize>,
    /// Global state index -> position in `deps`.
    pub positions: HashMap<usize, usize>,
    /// Rows `deps` of `V^k` for `k = 0..K-1` (or one shared block).
    pub vsub: StepMatrixStorage,
}

/// Per-step or shared matrix storage.
#[derive(Debug, Clone)]
pub enum StepMatrixStorage {
    PerStep(Vec<Array2<f64>>),
    Constant(Array2<f64>),
}

impl StepMatrixStorage {
    pub fn at(&self, k: usize) -> ArrayView2<'_, f64> {
        match self {
            Self::PerStep(v) => v[k].view(),
            Self::Constant(m) => m.view(),
        }
    }
}

/// Everything the online phase needs, with cost independent of `d`.
#[derive(Debug, Clone)]
pub struct OfflineQuantities {
    scheme: Scheme,
    steps: usize,
    dt: f64,
    rank: usize,
    eim_order: usize,
    num_op_terms: usize,
    num_src_terms: usize,
    pub storage: StepStorage,
    pub sampling: Option<SamplingPlan>,
    pub initial: InitialData,
    pub lipschitz: LipschitzTable,
}

impl OfflineQuantities {
    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn eim_order(&self) -> usize {
        self.eim_order
    }

    pub fn num_op_terms(&self) -> usize {
        self.num_op_terms
    }

    pub fn num_src_terms(&self) -> usize {
        self.num_src_terms
    }

    /// Time at which the operator coefficients of step `k -> k+1` are
    /// evaluated: `t^{k+1}` for the semi-implicit scheme, `t^k` for the
    /// explicit one.
    pub fn operator_time(&self, k: usize) -> f64 {
        match self.scheme {
            Scheme::SemiImplicit => (k + 1) as f64 * self.dt,
            Scheme::Explicit => k as f64 * self.dt,
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        scheme: Scheme,
        steps: usize,
        dt: f64,
        rank: usize,
        eim_order: usize,
        num_op_terms: usize,
        num_src_terms: usize,
        storage: StepStorage,
        sampling: Option<SamplingPlan>,
        initial: InitialData,
        lipschitz: LipschitzTable,
    ) -> Self {
        Self {
            scheme,
            steps,
            dt,
            rank,
            eim_order,
            num_op_terms,
            num_src_terms,
            storage,
            sampling,
            initial,
            lipschitz,
        }
    }
}

/// Assemble all per-step reduced blocks for a basis/model/interpolation
/// triple.
///
/// When the basis is time-independent and all affine terms are time-constant
/// matrices/vectors, a single block set is shared across steps. A nonlinear
/// model requires an interpolation operator unless the basis is empty.
pub fn compute_offline_quantities(
    basis: &TimeDependentBasis,
    model: &FullOrderModel,
    eim: Option<&EimOperator>,
    lipschitz: LipschitzTable,
) -> Result<OfflineQuantities> {
    let grid = model.grid();
    if basis.steps() != grid.steps() {
        return Err(CoreError::Validation {
            context: "offline quantities",
            detail: format!(
                "basis covers {} steps but the model grid has {}",
                basis.steps(),
                grid.steps()
            ),
        });
    }
    let nonlinear = !model.flux().is_zero();
    if nonlinear && eim.is_none() && basis.rank() > 0 {
        return Err(CoreError::Configuration(
            "nonlinear model requires an interpolation operator".into(),
        ));
    }
    if let Some(e) = eim {
        if e.dim() != model.dim() {
            return Err(CoreError::Shape {
                context: "interpolation operator",
                expected: model.dim().to_string(),
                actual: e.dim().to_string(),
            });
        }
    }

    let scheme = model.scheme();
    let steps = grid.steps();
    let dt = grid.dt();
    let r = basis.rank();
    let m = eim.map(|e| e.order()).unwrap_or(0);
    let qa = model.operator().num_terms();
    let qg = model.source().num_terms();

    let shareable = basis.is_time_independent()
        && model.operator().terms().iter().all(|(s, _)| s.is_constant())
        && model.source().terms().iter().all(|(s, _)| s.is_constant());

    let build_step = |k: usize| -> Result<StepBlocks> {
        let v_next = basis.at(k + 1);
        let v_op = match scheme {
            Scheme::SemiImplicit => basis.at(k + 1),
            Scheme::Explicit => basis.at(k),
        };
        let op_time_index = match scheme {
            Scheme::SemiImplicit => k + 1,
            Scheme::Explicit => k,
        };
        let drift = basis.velocity(k);
        // complement projection of a tall factor: F - V (V^T F)
        let project_out = |f: &Array2<f64>| -> (Array2<f64>, Array2<f64>) {
            let coeffs = v_next.t().dot(f);
            let complement = f - &v_next.dot(&coeffs);
            (coeffs, complement)
        };

        // d x r images of the basis under each operator term
        let mut av: Vec<Array2<f64>> = Vec::with_capacity(qa);
        for (seq, _) in model.operator().terms() {
            av.push(seq.at(op_time_index)?.matmul_dense(&v_op.to_owned()));
        }
        let src: Vec<&Array1<f64>> = model
            .source()
            .terms()
            .iter()
            .map(|(seq, _)| seq.at(k))
            .collect::<Result<_>>()?;

        let mut op_proj = Vec::with_capacity(qa);
        let mut op_perp = Vec::with_capacity(qa);
        for x in &av {
            let (p, c) = project_out(x);
            op_proj.push(p);
            op_perp.push(c);
        }
        let (drift_proj, drift_perp) = project_out(&drift);
        let (eim_proj, eim_perp) = match eim {
            Some(e) => project_out(&e.combined().to_owned()),
            None => (Array2::zeros((r, 0)), Array2::zeros((model.dim(), 0))),
        };
        let mut src_proj = Vec::with_capacity(qg);
        let mut src_perp: Vec<Array1<f64>> = Vec::with_capacity(qg);
        for g in &src {
            let coeffs = v_next.t().dot(*g);
            let complement = *g - &v_next.dot(&coeffs);
            src_proj.push(coeffs);
            src_perp.push(complement);
        }

        let mut op_op = Vec::with_capacity(qa * qa);
        for xi in &op_perp {
            for xj in &op_perp {
                op_op.push(xi.t().dot(xj));
            }
        }
        let drift_op: Vec<Array2<f64>> = op_perp.iter().map(|x| drift_perp.t().dot(x)).collect();
        let drift_drift = drift_perp.t().dot(&drift_perp);
        let drift_eim = drift_perp.t().dot(&eim_perp);
        let op_eim: Vec<Array2<f64>> = op_perp.iter().map(|x| x.t().dot(&eim_perp)).collect();
        let eim_eim = eim_perp.t().dot(&eim_perp);
        let drift_src: Vec<Array1<f64>> = src_perp.iter().map(|g| drift_perp.t().dot(g)).collect();
        let mut op_src = Vec::with_capacity(qa * qg);
        for x in &op_perp {
            for g in &src_perp {
                op_src.push(x.t().dot(g));
            }
        }
        let eim_src: Vec<Array1<f64>> = src_perp.iter().map(|g| eim_perp.t().dot(g)).collect();
        let mut src_src = Array2::zeros((qg, qg));
        for (i, gi) in src_perp.iter().enumerate() {
            for (j, gj) in src_perp.iter().enumerate() {
                src_src[[i, j]] = gi.dot(gj);
            }
        }

        Ok(StepBlocks {
            op_proj,
            drift_proj,
            eim_proj,
            src_proj,
            op_op,
            drift_op,
            drift_drift,
            drift_eim,
            op_eim,
            eim_eim,
            drift_src,
            op_src,
            eim_src,
            src_src,
        })
    };

    let storage = if shareable {
        StepStorage::Constant(build_step(0)?)
    } else {
        let mut blocks = Vec::with_capacity(steps);
        for k in 0..steps {
            blocks.push(build_step(k)?);
        }
        StepStorage::PerStep(blocks)
    };

    let sampling = match (nonlinear, eim) {
        (true, Some(e)) if r > 0 => Some(build_sampling_plan(basis, model, e, steps)),
        _ => None,
    };

    let initial = match model.initial_state().fixed() {
        Some(u0) => {
            let v0 = basis.at(0);
            let alpha0 = v0.t().dot(u0);
            let resid = u0 - &v0.dot(&alpha0);
            InitialData::Fixed { alpha0, delta0: resid.dot(&resid).sqrt() }
        }
        None => InitialData::Parametric { v0: basis.at(0).to_owned() },
    };

    Ok(OfflineQuantities {
        scheme,
        steps,
        dt,
        rank: r,
        eim_order: m,
        num_op_terms: qa,
        num_src_terms: qg,
        storage,
        sampling,
        initial,
        lipschitz,
    })
}

fn build_sampling_plan(
    basis: &TimeDependentBasis,
    model: &FullOrderModel,
    eim: &EimOperator,
    steps: usize,
) -> SamplingPlan {
    let magic = eim.magic_indices().to_vec();
    let mut deps: Vec<usize> = magic
        .iter()
        .flat_map(|&c| model.flux().component_dependencies(c))
        .collect();
    deps.sort_unstable();
    deps.dedup();
    let positions: HashMap<usize, usize> =
        deps.iter().enumerate().map(|(p, &g)| (g, p)).collect();
    let extract = |k: usize| -> Array2<f64> {
        let v = basis.at(k);
        Array2::from_shape_fn((deps.len(), basis.rank()), |(i, j)| v[[deps[i], j]])
    };
    let vsub = if basis.is_time_independent() {
        StepMatrixStorage::Constant(extract(0))
    } else {
        StepMatrixStorage::PerStep((0..steps).map(extract).collect())
    };
    SamplingPlan { magic, deps, positions, vsub }
}
