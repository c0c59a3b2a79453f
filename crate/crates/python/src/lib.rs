use commbound::analytic::{self, BoundRow};
use commbound::cbox::DEFAULT_ENUMERATION_CAP;
use commbound::dual::{DualPoint, GapOptions};
use commbound::info::nats_to_bits;
use commbound::{
    quantum, special, CBox, Certificate, Channel, Error, PrimalOptions, Prior, PureState, TwoOutcomeMeasurement,
};
use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

create_exception!(commbound, CommboundError, PyValueError, "Invalid input or solver failure.");
create_exception!(commbound, CertificateError, CommboundError, "Certificate is infeasible or over-claims its bound.");
create_exception!(commbound, DigestMismatchError, CommboundError, "Certificate belongs to a different box.");
create_exception!(commbound, SizeOverflowError, CommboundError, "Outcome enumeration exceeds the cap.");

fn to_py(e: Error) -> PyErr {
    let msg = e.to_string();
    match e {
        Error::Infeasible { .. } | Error::OverClaimed { .. } => CertificateError::new_err(msg),
        Error::DigestMismatch { .. } => DigestMismatchError::new_err(msg),
        Error::SizeOverflow { .. } => SizeOverflowError::new_err(msg),
        _ => CommboundError::new_err(msg),
    }
}

/// Conditional distribution `P(s|a,b)` given as nested lists `[a][b][s]`.
#[pyclass(name = "CBox", module = "commbound", frozen)]
struct PyCBox(CBox);

#[pymethods]
impl PyCBox {
    #[new]
    fn new(probs: Vec<Vec<Vec<f64>>>) -> PyResult<Self> {
        CBox::new(probs).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        CBox::from_json(text).map(Self).map_err(to_py)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    #[getter]
    fn a_count(&self) -> usize {
        self.0.a_count()
    }

    #[getter]
    fn m_count(&self) -> usize {
        self.0.m_count()
    }

    #[getter]
    fn s_count(&self) -> usize {
        self.0.s_count()
    }

    fn probs(&self) -> Vec<Vec<Vec<f64>>> {
        self.0.to_nested()
    }

    fn p(&self, a: usize, b: usize, s: usize) -> PyResult<f64> {
        if a >= self.0.a_count() || b >= self.0.m_count() || s >= self.0.s_count() {
            return Err(pyo3::exceptions::PyIndexError::new_err(format!("({a}, {b}, {s}) out of range")));
        }
        Ok(self.0.p(a, b, s))
    }

    fn digest(&self) -> String {
        self.0.digest()
    }

    fn __repr__(&self) -> String {
        format!("CBox(a_count={}, m_count={}, s_count={})", self.0.a_count(), self.0.m_count(), self.0.s_count())
    }
}

fn prior_for(cbox: &CBox, weights: Option<Vec<f64>>) -> PyResult<Prior> {
    match weights {
        Some(w) => Prior::new(w),
        None => Prior::uniform(cbox.a_count()),
    }
    .map_err(to_py)
}

#[pyclass(module = "commbound", frozen, get_all)]
struct PrimalResult {
    value_bits: f64,
    value_nats: f64,
    certified_bound_bits: f64,
    iterations: usize,
    constraint_violation: f64,
}

#[pyclass(module = "commbound", frozen)]
struct DualityGap {
    #[pyo3(get)]
    primal_bits: f64,
    #[pyo3(get)]
    dual_bits: f64,
    #[pyo3(get)]
    gap_nats: f64,
    cbox: CBox,
    prior: Prior,
    point: DualPoint,
    dual_nats: f64,
}

#[pymethods]
impl DualityGap {
    /// Certificate for the dual side of this result.
    #[pyo3(signature = (created=0))]
    fn certificate(&self, created: u64) -> PyCertificate {
        PyCertificate(Certificate::new(&self.cbox, &self.prior, &self.point, self.dual_nats, created))
    }

    fn __repr__(&self) -> String {
        format!(
            "DualityGap(primal_bits={}, dual_bits={}, gap_nats={:e})",
            self.primal_bits, self.dual_bits, self.gap_nats
        )
    }
}

#[pyclass(name = "Certificate", module = "commbound", frozen)]
struct PyCertificate(Certificate);

#[pymethods]
impl PyCertificate {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Certificate::from_json(text).map(Self).map_err(to_py)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    #[getter]
    fn claimed_bound_bits(&self) -> f64 {
        self.0.claimed_bound_bits
    }

    #[getter]
    fn box_digest(&self) -> &str {
        &self.0.box_digest
    }

    /// Verified bound in bits; raises on infeasible, over-claimed or foreign certificates.
    #[pyo3(signature = (cbox, cap=DEFAULT_ENUMERATION_CAP))]
    fn verify(&self, py: Python<'_>, cbox: &PyCBox, cap: usize) -> PyResult<f64> {
        let (cert, b) = (&self.0, &cbox.0);
        py.detach(|| commbound::check_certificate(cert, b, cap)).map(|v| v.bound_bits).map_err(to_py)
    }
}

fn gap_options(tol: f64, cap: usize) -> GapOptions {
    let mut opts = GapOptions::default();
    opts.primal.gap_tol = tol;
    opts.primal.cap = cap;
    opts.dual.gap_tol = tol;
    opts.dual.cap = cap;
    opts
}

#[pyfunction]
#[pyo3(signature = (cbox, prior=None, tol=1e-6, cap=DEFAULT_ENUMERATION_CAP))]
fn minimize_mutual_info(
    py: Python<'_>,
    cbox: &PyCBox,
    prior: Option<Vec<f64>>,
    tol: f64,
    cap: usize,
) -> PyResult<PrimalResult> {
    let prior = prior_for(&cbox.0, prior)?;
    let opts = PrimalOptions { gap_tol: tol, cap, ..PrimalOptions::default() };
    let b = &cbox.0;
    let r = py.detach(|| commbound::minimize_mutual_info(b, &prior, &opts)).map_err(to_py)?;
    Ok(PrimalResult {
        value_bits: r.value_bits(),
        value_nats: r.value_nats,
        certified_bound_bits: nats_to_bits(r.dual_bound_nats),
        iterations: r.iterations,
        constraint_violation: r.constraint_violation,
    })
}

#[pyfunction]
#[pyo3(signature = (cbox, prior=None, tol=1e-6, cap=DEFAULT_ENUMERATION_CAP))]
fn duality_gap(py: Python<'_>, cbox: &PyCBox, prior: Option<Vec<f64>>, tol: f64, cap: usize) -> PyResult<DualityGap> {
    let prior = prior_for(&cbox.0, prior)?;
    let opts = gap_options(tol, cap);
    let b = &cbox.0;
    let g = py.detach(|| commbound::duality_gap(b, &prior, &opts)).map_err(to_py)?;
    Ok(DualityGap {
        primal_bits: nats_to_bits(g.primal_nats),
        dual_bits: nats_to_bits(g.dual_nats),
        gap_nats: g.gap,
        cbox: cbox.0.clone(),
        prior,
        point: g.dual.point,
        dual_nats: g.dual_nats,
    })
}

fn states_from(raw: Vec<Vec<Complex64>>) -> PyResult<Vec<PureState>> {
    raw.into_iter().map(|v| PureState::normalized(v).map_err(to_py)).collect()
}

/// Box of Born probabilities; states and axes are lists of complex amplitudes.
#[pyfunction]
fn quantum_cbox(states: Vec<Vec<Complex64>>, axes: Vec<Vec<Complex64>>) -> PyResult<PyCBox> {
    let states = states_from(states)?;
    let axes: Vec<_> = states_from(axes)?.into_iter().map(TwoOutcomeMeasurement::new).collect();
    commbound::build_quantum_cbox(&states, &axes).map(PyCBox).map_err(to_py)
}

#[pyfunction]
fn haar_states(dim: usize, count: usize, seed: u64) -> PyResult<Vec<Vec<Complex64>>> {
    let states = quantum::haar_sample(dim, count, seed).map_err(to_py)?;
    Ok(states.into_iter().map(|s| s.amplitudes().to_vec()).collect())
}

#[pyclass(name = "BoundRow", module = "commbound", frozen, get_all)]
struct PyBoundRow {
    n: usize,
    alpha: f64,
    beta: f64,
    theta_m: f64,
    bound_bits_approx: f64,
    bound_bits_refined: f64,
    bound_bits_feasible: f64,
}

impl From<BoundRow> for PyBoundRow {
    fn from(r: BoundRow) -> Self {
        Self {
            n: r.n,
            alpha: r.alpha,
            beta: r.beta,
            theta_m: r.theta_m,
            bound_bits_approx: r.bound_bits_approx,
            bound_bits_refined: r.bound_bits_refined,
            bound_bits_feasible: r.bound_bits_feasible,
        }
    }
}

#[pymethods]
impl PyBoundRow {
    fn __repr__(&self) -> String {
        format!("BoundRow(n={}, approx={:.6}, refined={:.6})", self.n, self.bound_bits_approx, self.bound_bits_refined)
    }
}

#[pyfunction]
fn bound_approx_bits(n: usize) -> PyResult<f64> {
    analytic::bound_approx_bits(n).map_err(to_py)
}

#[pyfunction]
fn bound_refined(n: usize) -> PyResult<PyBoundRow> {
    analytic::bound_refined_bits(n).map(Into::into).map_err(to_py)
}

#[pyfunction]
fn bound_table() -> PyResult<Vec<PyBoundRow>> {
    Ok(analytic::bound_table().map_err(to_py)?.into_iter().map(|c| c.row.into()).collect())
}

/// `(θ, F(θ))` pairs at the refined parameters of dimension `n`.
#[pyfunction]
fn f_profile(n: usize, grid: usize) -> PyResult<Vec<(f64, f64)>> {
    let row = analytic::bound_refined_bits(n).map_err(to_py)?;
    analytic::f_profile(n, row.alpha, row.beta, grid).map_err(to_py)
}

#[pyfunction]
fn upper_incomplete_gamma(n: usize, x: f64) -> PyResult<f64> {
    special::upper_incomplete_gamma_int(n, x).map_err(to_py)
}

/// `(estimate, stderr)` of the Haar overlap moment of order `k`.
#[pyfunction]
fn mc_overlap_moment(py: Python<'_>, dim: usize, k: u32, samples: usize, seed: u64) -> PyResult<(f64, f64)> {
    let e = py.detach(|| quantum::mc_overlap_moment(dim, k, samples, seed)).map_err(to_py)?;
    Ok((e.estimate, e.stderr))
}

#[pyfunction]
fn overlap_moment(dim: usize, k: u32) -> PyResult<f64> {
    quantum::overlap_moment(dim, k).map_err(to_py)
}

#[pyfunction]
fn cone_measure(theta: f64, dim: usize) -> PyResult<f64> {
    quantum::cone_measure(theta, dim).map_err(to_py)
}

/// Capacity in bits of a channel given as rows `W[x][y]`.
#[pyfunction]
#[pyo3(signature = (rows, tol=1e-12))]
fn channel_capacity(rows: Vec<Vec<f64>>, tol: f64) -> PyResult<f64> {
    let channel = Channel::new(rows).map_err(to_py)?;
    commbound::channel_capacity(&channel, tol).map(|r| nats_to_bits(r.capacity_nats)).map_err(to_py)
}

#[pymodule(name = "commbound")]
pub fn commbound_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("CommboundError", py.get_type::<CommboundError>())?;
    m.add("CertificateError", py.get_type::<CertificateError>())?;
    m.add("DigestMismatchError", py.get_type::<DigestMismatchError>())?;
    m.add("SizeOverflowError", py.get_type::<SizeOverflowError>())?;
    m.add_class::<PyCBox>()?;
    m.add_class::<PrimalResult>()?;
    m.add_class::<DualityGap>()?;
    m.add_class::<PyCertificate>()?;
    m.add_class::<PyBoundRow>()?;
    m.add_function(wrap_pyfunction!(minimize_mutual_info, m)?)?;
    m.add_function(wrap_pyfunction!(duality_gap, m)?)?;
    m.add_function(wrap_pyfunction!(quantum_cbox, m)?)?;
    m.add_function(wrap_pyfunction!(haar_states, m)?)?;
    m.add_function(wrap_pyfunction!(bound_approx_bits, m)?)?;
    m.add_function(wrap_pyfunction!(bound_refined, m)?)?;
    m.add_function(wrap_pyfunction!(bound_table, m)?)?;
    m.add_function(wrap_pyfunction!(f_profile, m)?)?;
    m.add_function(wrap_pyfunction!(upper_incomplete_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(mc_overlap_moment, m)?)?;
    m.add_function(wrap_pyfunction!(overlap_moment, m)?)?;
    m.add_function(wrap_pyfunction!(cone_measure, m)?)?;
    m.add_function(wrap_pyfunction!(channel_capacity, m)?)?;
    Ok(())
}
