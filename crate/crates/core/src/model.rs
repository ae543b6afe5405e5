//! Parameter-dependent dynamical systems in decomposed form.
//!
//! A full-order model is the system `u' = A(t, xi) u + h(u, t, xi) + g(t, xi)`
//! where the linear part and the source admit affine representations
//! `A(t, xi) = sum_i theta_A^i(t, xi) A^i(t)` and
//! `g(t, xi) = sum_i theta_g^i(t, xi) g^i(t)`, with parameter-independent
//! matrices/vectors and scalar coefficient functions. This split is what makes
//! the online phase independent of the state dimension.

use std::fmt;
use std::sync::Arc;

use ndarray::{Array1, Array2, ArrayView1};

use crate::error::{CoreError, Result};
use crate::sparse::CsrMatrix;

/// A point in parameter space.
pub type ParamPoint = Vec<f64>;

/// Uniform discretization of the time interval `[0, T]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    horizon: f64,
    steps: usize,
}

impl TimeGrid {
    /// Grid with `steps` uniform steps on `[0, horizon]`.
    pub fn new(horizon: f64, steps: usize) -> Result<Self> {
        if !(horizon > 0.0) || steps == 0 {
            return Err(CoreError::Validation {
                context: "time grid",
                detail: format!("need horizon > 0 and steps >= 1, got ({horizon}, {steps})"),
            });
        }
        Ok(Self { horizon, steps })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Number of steps `K`; the grid has `K + 1` nodes.
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn num_nodes(&self) -> usize {
        self.steps + 1
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    /// Node `t^k = k * dt`, `k` in `[0, K]`.
    pub fn node(&self, k: usize) -> f64 {
        debug_assert!(k <= self.steps);
        k as f64 * self.dt()
    }
}

/// Scalar coefficient function `theta(t, xi)` of an affine term.
#[derive(Clone)]
pub struct Coefficient {
    f: Arc<dyn Fn(f64, &[f64]) -> f64 + Send + Sync>,
    time_dependent: bool,
}

impl Coefficient {
    /// Coefficient varying with time and/or parameter.
    pub fn time_varying(f: impl Fn(f64, &[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self { f: Arc::new(f), time_dependent: true }
    }

    /// Coefficient depending on the parameter only.
    pub fn of_parameter(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            f: Arc::new(move |_t, xi| f(xi)),
            time_dependent: false,
        }
    }

    /// Constant coefficient.
    pub fn constant(c: f64) -> Self {
        Self {
            f: Arc::new(move |_t, _xi| c),
            time_dependent: false,
        }
    }

    pub fn eval(&self, t: f64, xi: &[f64]) -> f64 {
        (self.f)(t, xi)
    }

    /// Whether the coefficient was declared time-dependent at construction.
    pub fn is_time_dependent(&self) -> bool {
        self.time_dependent
    }
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Coefficient")
            .field("time_dependent", &self.time_dependent)
            .finish()
    }
}

/// Matrix term of an affine representation: one matrix per time step, or a
/// single time-constant matrix.
#[derive(Debug, Clone)]
pub enum OperatorSequence {
    Constant(CsrMatrix),
    PerStep(Vec<CsrMatrix>),
}

impl OperatorSequence {
    /// Matrix at time index `k`.
    pub fn at(&self, k: usize) -> Result<&CsrMatrix> {
        match self {
            Self::Constant(m) => Ok(m),
            Self::PerStep(seq) => seq.get(k).ok_or(CoreError::IndexOutOfRange {
                context: "operator sequence",
                index: k,
                bound: seq.len(),
            }),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Self::Constant(_))
    }
}

/// Vector term of an affine representation.
#[derive(Debug, Clone)]
pub enum VectorSequence {
    Constant(Array1<f64>),
    PerStep(Vec<Array1<f64>>),
}

impl VectorSequence {
    pub fn at(&self, k: usize) -> Result<&Array1<f64>> {
        match self {
            Self::Constant(v) => Ok(v),
            Self::PerStep(seq) => seq.get(k).ok_or(CoreError::IndexOutOfRange {
                context: "source sequence",
                index: k,
                bound: seq.len(),
            }),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Self::Constant(_))
    }
}

/// Affine representation of the linear operator.
#[derive(Debug, Clone, Default)]
pub struct AffineOperator {
    terms: Vec<(OperatorSequence, Coefficient)>,
}

impl AffineOperator {
    pub fn new(terms: Vec<(OperatorSequence, Coefficient)>) -> Self {
        Self { terms }
    }

    /// Number of affine terms `Q_A`.
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[(OperatorSequence, Coefficient)] {
        &self.terms
    }

    /// True when every matrix is time-constant and every coefficient is
    /// declared time-independent; enables factoring step matrices once.
    pub fn time_invariant(&self) -> bool {
        self.terms
            .iter()
            .all(|(m, c)| m.is_constant() && !c.is_time_dependent())
    }

    /// Coefficient values at `(t, xi)`.
    pub fn coefficients(&self, t: f64, xi: &[f64]) -> Vec<f64> {
        self.terms.iter().map(|(_, c)| c.eval(t, xi)).collect()
    }

    /// Dense assembly of `A(t^k, xi)`.
    pub fn assemble_dense(&self, dim: usize, k: usize, t: f64, xi: &[f64]) -> Result<Array2<f64>> {
        let mut out = Array2::zeros((dim, dim));
        for (seq, coeff) in &self.terms {
            let theta = coeff.eval(t, xi);
            let m = seq.at(k)?;
            for r in 0..m.nrows() {
                let (cols, vals) = m.row(r);
                for (&c, &v) in cols.iter().zip(vals) {
                    out[[r, c]] += theta * v;
                }
            }
        }
        Ok(out)
    }

    /// `y += A(t^k, xi) x`.
    pub fn apply_acc(
        &self,
        k: usize,
        t: f64,
        xi: &[f64],
        x: ArrayView1<'_, f64>,
        y: &mut Array1<f64>,
    ) -> Result<()> {
        for (seq, coeff) in &self.terms {
            let theta = coeff.eval(t, xi);
            if theta != 0.0 {
                seq.at(k)?.matvec_acc(theta, x, y);
            }
        }
        Ok(())
    }
}

/// Affine representation of the source term.
#[derive(Debug, Clone, Default)]
pub struct AffineSource {
    terms: Vec<(VectorSequence, Coefficient)>,
}

impl AffineSource {
    pub fn new(terms: Vec<(VectorSequence, Coefficient)>) -> Self {
        Self { terms }
    }

    /// Number of affine terms `Q_g`.
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[(VectorSequence, Coefficient)] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn vectors_constant(&self) -> bool {
        self.terms.iter().all(|(v, _)| v.is_constant())
    }

    pub fn coefficients(&self, t: f64, xi: &[f64]) -> Vec<f64> {
        self.terms.iter().map(|(_, c)| c.eval(t, xi)).collect()
    }

    /// `y += g(t^k, xi)`.
    pub fn apply_acc(&self, k: usize, t: f64, xi: &[f64], y: &mut Array1<f64>) -> Result<()> {
        for (seq, coeff) in &self.terms {
            let theta = coeff.eval(t, xi);
            if theta != 0.0 {
                let v = seq.at(k)?;
                y.scaled_add(theta, v);
            }
        }
        Ok(())
    }
}

/// Nonlinear part of the flux with componentwise access.
///
/// `eval_component` must be the single source of truth for the arithmetic:
/// full evaluation loops over it, so sampled evaluation agrees with full
/// evaluation bit for bit.
pub trait NonlinearFlux: Send + Sync {
    fn dim(&self) -> usize;

    /// True for the identically-zero flux of linear models.
    fn is_zero(&self) -> bool {
        false
    }

    /// Component `i` of `h(u, t, xi)`, reading inputs through `u`.
    fn eval_component(&self, component: usize, u: &dyn Fn(usize) -> f64, t: f64, xi: &[f64]) -> f64;

    /// Input indices on which component `i` depends.
    fn component_dependencies(&self, component: usize) -> Vec<usize>;

    /// Gradient `∇h(u, t, xi)` as a sparse matrix.
    fn gradient(&self, u: ArrayView1<'_, f64>, t: f64, xi: &[f64]) -> CsrMatrix;

    /// Full evaluation `h(u, t, xi)`.
    fn eval(&self, u: ArrayView1<'_, f64>, t: f64, xi: &[f64]) -> Array1<f64> {
        let get = |i: usize| u[i];
        Array1::from_shape_fn(self.dim(), |i| self.eval_component(i, &get, t, xi))
    }
}

/// Flux that is identically zero (linear models).
#[derive(Debug, Clone)]
pub struct ZeroFlux {
    pub dim: usize,
}

impl NonlinearFlux for ZeroFlux {
    fn dim(&self) -> usize {
        self.dim
    }

    fn is_zero(&self) -> bool {
        true
    }

    fn eval_component(&self, _c: usize, _u: &dyn Fn(usize) -> f64, _t: f64, _xi: &[f64]) -> f64 {
        0.0
    }

    fn component_dependencies(&self, _c: usize) -> Vec<usize> {
        Vec::new()
    }

    fn gradient(&self, _u: ArrayView1<'_, f64>, _t: f64, _xi: &[f64]) -> CsrMatrix {
        CsrMatrix::zeros(self.dim, self.dim)
    }
}

/// Initial state, either shared by all parameters or parameter-dependent.
#[derive(Clone)]
pub enum InitialState {
    Fixed(Array1<f64>),
    Parametric(Arc<dyn Fn(&[f64]) -> Array1<f64> + Send + Sync>),
}

impl InitialState {
    pub fn eval(&self, xi: &[f64]) -> Array1<f64> {
        match self {
            Self::Fixed(v) => v.clone(),
            Self::Parametric(f) => f(xi),
        }
    }

    /// The shared initial state, when parameter-independent.
    pub fn fixed(&self) -> Option<&Array1<f64>> {
        match self {
            Self::Fixed(v) => Some(v),
            Self::Parametric(_) => None,
        }
    }
}

impl fmt::Debug for InitialState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Fixed(v) => f.debug_tuple("Fixed").field(&v.len()).finish(),
            Self::Parametric(_) => f.write_str("Parametric"),
        }
    }
}

/// Time integration scheme convention of a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Linear part implicit, nonlinear part and source explicit.
    SemiImplicit,
    /// Fully explicit Euler.
    Explicit,
}

/// The full-order system in decomposed form, immutable after construction.
#[derive(Debug, Clone)]
pub struct FullOrderModel {
    dim: usize,
    operator: AffineOperator,
    source: AffineSource,
    flux: Arc<dyn NonlinearFlux>,
    initial: InitialState,
    scheme: Scheme,
    grid: TimeGrid,
}

impl fmt::Debug for dyn NonlinearFlux {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NonlinearFlux(dim = {}, zero = {})", self.dim(), self.is_zero())
    }
}

impl FullOrderModel {
    pub fn new(
        dim: usize,
        operator: AffineOperator,
        source: AffineSource,
        flux: Arc<dyn NonlinearFlux>,
        initial: InitialState,
        scheme: Scheme,
        grid: TimeGrid,
    ) -> Result<Self> {
        for (seq, _) in operator.terms() {
            let m = seq.at(0)?;
            if m.nrows() != dim || m.ncols() != dim {
                return Err(CoreError::Shape {
                    context: "affine operator term",
                    expected: format!("{dim}x{dim}"),
                    actual: format!("{}x{}", m.nrows(), m.ncols()),
                });
            }
        }
        for (seq, _) in source.terms() {
            let v = seq.at(0)?;
            if v.len() != dim {
                return Err(CoreError::Shape {
                    context: "affine source term",
                    expected: dim.to_string(),
                    actual: v.len().to_string(),
                });
            }
        }
        if flux.dim() != dim {
            return Err(CoreError::Shape {
                context: "nonlinear flux",
                expected: dim.to_string(),
                actual: flux.dim().to_string(),
            });
        }
        Ok(Self { dim, operator, source, flux, initial, scheme, grid })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn operator(&self) -> &AffineOperator {
        &self.operator
    }

    pub fn source(&self) -> &AffineSource {
        &self.source
    }

    pub fn flux(&self) -> &Arc<dyn NonlinearFlux> {
        &self.flux
    }

    pub fn initial_state(&self) -> &InitialState {
        &self.initial
    }

    /// Same model with a different initial state.
    pub fn with_initial_state(mut self, initial: InitialState) -> Self {
        self.initial = initial;
        self
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn is_linear(&self) -> bool {
        self.flux.is_zero()
    }

    fn check_time_index(&self, k: usize) -> Result<()> {
        if k > self.grid.steps() {
            return Err(CoreError::IndexOutOfRange {
                context: "time index",
                index: k,
                bound: self.grid.steps() + 1,
            });
        }
        Ok(())
    }

    /// Assembled operator `A(t^k, xi) = sum_i theta_A^i(t^k, xi) A^i(t^k)`.
    pub fn assemble_operator(&self, k: usize, xi: &[f64]) -> Result<Array2<f64>> {
        self.check_time_index(k)?;
        self.operator.assemble_dense(self.dim, k, self.grid.node(k), xi)
    }

    /// Full flux `A(t^k, xi) u + h(u, t^k, xi) + g(t^k, xi)`.
    pub fn eval_flux(&self, u: ArrayView1<'_, f64>, k: usize, xi: &[f64]) -> Result<Array1<f64>> {
        self.check_time_index(k)?;
        if u.len() != self.dim {
            return Err(CoreError::Shape {
                context: "eval_flux state",
                expected: self.dim.to_string(),
                actual: u.len().to_string(),
            });
        }
        let t = self.grid.node(k);
        let mut y = if self.flux.is_zero() {
            Array1::zeros(self.dim)
        } else {
            self.flux.eval(u, t, xi)
        };
        self.operator.apply_acc(k, t, xi, u, &mut y)?;
        self.source.apply_acc(k, t, xi, &mut y)?;
        Ok(y)
    }

    /// Components of the nonlinear part `h(u, t^k, xi)` at the given indices.
    ///
    /// Agrees exactly with the corresponding entries of the full nonlinear
    /// evaluation.
    pub fn eval_flux_components(
        &self,
        u: ArrayView1<'_, f64>,
        indices: &[usize],
        k: usize,
        xi: &[f64],
    ) -> Result<Vec<f64>> {
        self.check_time_index(k)?;
        if u.len() != self.dim {
            return Err(CoreError::Shape {
                context: "eval_flux_components state",
                expected: self.dim.to_string(),
                actual: u.len().to_string(),
            });
        }
        let mut seen = vec![false; self.dim];
        for &i in indices {
            if i >= self.dim {
                return Err(CoreError::IndexOutOfRange {
                    context: "flux component index",
                    index: i,
                    bound: self.dim,
                });
            }
            if seen[i] {
                return Err(CoreError::DuplicateIndex {
                    context: "flux component index",
                    index: i,
                });
            }
            seen[i] = true;
        }
        let t = self.grid.node(k);
        let get = |i: usize| u[i];
        Ok(indices
            .iter()
            .map(|&i| self.flux.eval_component(i, &get, t, xi))
            .collect())
    }
}

/// Box-shaped parameter domain with a training set and a metric.
#[derive(Debug, Clone)]
pub struct ParameterDomain {
    bounds: Vec<[f64; 2]>,
    training: Vec<ParamPoint>,
    metric: Metric,
}

/// Distance on the parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Metric {
    #[default]
    Euclidean,
}

impl Metric {
    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        match self {
            Metric::Euclidean => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
        }
    }
}

impl ParameterDomain {
    pub fn new(bounds: Vec<[f64; 2]>) -> Result<Self> {
        if bounds.is_empty() || bounds.iter().any(|b| !(b[0] <= b[1])) {
            return Err(CoreError::Validation {
                context: "parameter domain",
                detail: format!("invalid bounds {bounds:?}"),
            });
        }
        Ok(Self { bounds, training: Vec::new(), metric: Metric::Euclidean })
    }

    pub fn num_parameters(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[[f64; 2]] {
        &self.bounds
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn contains(&self, xi: &[f64]) -> bool {
        xi.len() == self.bounds.len()
            && xi
                .iter()
                .zip(&self.bounds)
                .all(|(x, b)| *x >= b[0] && *x <= b[1])
    }

    /// Replace the training set, validating that every point lies in bounds.
    pub fn with_training(mut self, points: Vec<ParamPoint>) -> Result<Self> {
        for p in &points {
            if !self.contains(p) {
                return Err(CoreError::Validation {
                    context: "training set",
                    detail: format!("point {p:?} outside bounds {:?}", self.bounds),
                });
            }
        }
        self.training = points;
        Ok(self)
    }

    pub fn training(&self) -> &[ParamPoint] {
        &self.training
    }

    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        self.metric.distance(a, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    fn toy_operator(dim: usize) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..dim {
            t.push((i, i, -2.0));
            if i + 1 < dim {
                t.push((i, i + 1, 1.0));
                t.push((i + 1, i, 0.5));
            }
        }
        CsrMatrix::from_triplets(dim, dim, &t)
    }

    fn toy_model(dim: usize, theta: Coefficient) -> FullOrderModel {
        let grid = TimeGrid::new(1.0, 10).unwrap();
        FullOrderModel::new(
            dim,
            AffineOperator::new(vec![(OperatorSequence::Constant(toy_operator(dim)), theta)]),
            AffineSource::default(),
            Arc::new(ZeroFlux { dim }),
            InitialState::Fixed(Array1::zeros(dim)),
            Scheme::SemiImplicit,
            grid,
        )
        .unwrap()
    }

    #[test]
    fn vanishing_coefficients_give_zero_operator() {
        let m = toy_model(4, Coefficient::constant(0.0));
        let a = m.assemble_operator(3, &[0.0]).unwrap();
        assert_eq!(a, Array2::zeros((4, 4)));
    }

    #[test]
    fn unit_coefficient_reproduces_term_verbatim() {
        let m = toy_model(4, Coefficient::constant(1.0));
        let a = m.assemble_operator(0, &[0.0]).unwrap();
        assert_eq!(a, toy_operator(4).to_dense());
    }

    #[test]
    fn time_index_out_of_range_is_an_error() {
        let m = toy_model(3, Coefficient::constant(1.0));
        assert!(matches!(
            m.assemble_operator(11, &[0.0]),
            Err(CoreError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn per_step_sequence_bound_checked() {
        let seq = OperatorSequence::PerStep(vec![CsrMatrix::identity(2); 3]);
        assert!(seq.at(2).is_ok());
        assert!(matches!(seq.at(3), Err(CoreError::IndexOutOfRange { .. })));
    }

    #[test]
    fn flux_of_zero_state_is_zero() {
        let m = toy_model(5, Coefficient::constant(2.0));
        let y = m.eval_flux(Array1::zeros(5).view(), 0, &[0.0]).unwrap();
        assert_eq!(y, Array1::zeros(5));
    }

    #[test]
    fn flux_shape_mismatch_is_an_error() {
        let m = toy_model(5, Coefficient::constant(1.0));
        assert!(matches!(
            m.eval_flux(Array1::zeros(4).view(), 0, &[0.0]),
            Err(CoreError::Shape { .. })
        ));
    }

    #[test]
    fn affine_consistency_against_flux() {
        // assemble(k, xi) * u must equal the flux with h and g absent, exactly
        let dim = 7;
        let m = FullOrderModel::new(
            dim,
            AffineOperator::new(vec![
                (
                    OperatorSequence::Constant(toy_operator(dim)),
                    Coefficient::of_parameter(|xi| 1.0 + 0.5 * xi[0]),
                ),
                (
                    OperatorSequence::Constant(CsrMatrix::identity(dim)),
                    Coefficient::of_parameter(|xi| xi[1] * xi[1]),
                ),
            ]),
            AffineSource::default(),
            Arc::new(ZeroFlux { dim }),
            InitialState::Fixed(Array1::zeros(dim)),
            Scheme::SemiImplicit,
            TimeGrid::new(2.0, 20).unwrap(),
        )
        .unwrap();
        let mut state = 0.123_f64;
        let mut next = move || {
            state = (state * 9301.0 + 49297.0) % 233280.0;
            state / 233280.0
        };
        for trial in 0..100 {
            let k = trial % 21;
            let xi = vec![2.0 * next() - 1.0, 2.0 * next() - 1.0];
            let u = Array1::from_shape_fn(dim, |_| next() - 0.5);
            let lhs = m.assemble_operator(k, &xi).unwrap().dot(&u);
            let rhs = m.eval_flux(u.view(), k, &xi).unwrap();
            // both paths sum the identical products in the identical order
            for i in 0..dim {
                assert_abs_diff_eq!(lhs[i], rhs[i], epsilon = 1e-14 * (1.0 + lhs[i].abs()));
            }
        }
    }

    #[test]
    fn component_sampling_full_set_and_errors() {
        let m = toy_model(6, Coefficient::constant(1.0));
        let u = array![1.0, -2.0, 3.0, 0.5, 0.0, 4.0];
        let all: Vec<usize> = (0..6).collect();
        let h = m.eval_flux_components(u.view(), &all, 0, &[0.0]).unwrap();
        assert_eq!(h, vec![0.0; 6]);
        assert!(matches!(
            m.eval_flux_components(u.view(), &[1, 1], 0, &[0.0]),
            Err(CoreError::DuplicateIndex { .. })
        ));
        assert!(matches!(
            m.eval_flux_components(u.view(), &[6], 0, &[0.0]),
            Err(CoreError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn domain_bounds_and_metric() {
        let d = ParameterDomain::new(vec![[-1.0, 1.0], [0.0, 2.0]]).unwrap();
        assert!(d.contains(&[0.0, 1.0]));
        assert!(!d.contains(&[0.0, 2.5]));
        assert!(d.clone().with_training(vec![vec![0.5, 0.5]]).is_ok());
        assert!(d.clone().with_training(vec![vec![1.5, 0.5]]).is_err());
        assert_eq!(d.distance(&[0.0, 0.0], &[3.0, 4.0]), 5.0);
        assert_eq!(d.distance(&[0.3, -0.2], &[0.3, -0.2]), 0.0);
    }
}
