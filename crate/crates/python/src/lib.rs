//! Python bindings. Matrices are wrapped in `ComplexMatrix`; states travel as
//! lists of Python complex numbers.

use bakerlab_core as core;
use bakerlab_core::{BakerError, RngStream};
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: BakerError) -> PyErr {
    if e.is_numerical() {
        PyRuntimeError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn json_to_py<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

/// Dense complex matrix.
#[pyclass(name = "ComplexMatrix", module = "bakerlab", skip_from_py_object)]
#[derive(Clone)]
struct PyMatrix(core::ComplexMatrix);

#[pymethods]
impl PyMatrix {
    /// Build from a list of rows of complex numbers.
    #[new]
    fn new(rows: Vec<Vec<Complex64>>) -> PyResult<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(PyValueError::new_err("rows have different lengths"));
        }
        let data = rows.into_iter().flatten().collect();
        core::ComplexMatrix::new(n_rows, n_cols, data).map(PyMatrix).map_err(to_py)
    }

    #[staticmethod]
    fn identity(d: usize) -> Self {
        PyMatrix(core::ComplexMatrix::identity(d))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        core::ComplexMatrix::from_json(text).map(PyMatrix).map_err(to_py)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.0.rows(), self.0.cols())
    }

    fn to_list(&self) -> Vec<Vec<Complex64>> {
        (0..self.0.rows()).map(|r| self.0.row(r).to_vec()).collect()
    }

    fn __getitem__(&self, index: (usize, usize)) -> PyResult<Complex64> {
        let (r, c) = index;
        if r >= self.0.rows() || c >= self.0.cols() {
            return Err(pyo3::exceptions::PyIndexError::new_err("index out of range"));
        }
        Ok(self.0[(r, c)])
    }

    fn __matmul__(&self, other: &PyMatrix) -> PyResult<Self> {
        self.0.matmul(&other.0).map(PyMatrix).map_err(to_py)
    }

    fn dagger(&self) -> Self {
        PyMatrix(self.0.dagger())
    }

    fn kron(&self, other: &PyMatrix) -> Self {
        PyMatrix(self.0.kron(&other.0))
    }

    fn unitarity_residual(&self) -> f64 {
        self.0.unitarity_residual()
    }

    fn is_unitary(&self) -> bool {
        self.0.is_unitary()
    }

    fn max_abs_diff(&self, other: &PyMatrix) -> PyResult<f64> {
        self.0.max_abs_diff(&other.0).map_err(to_py)
    }

    /// `U psi` for a state given as a list of amplitudes.
    fn apply(&self, psi: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
        let psi = core::StateVector::new(psi).map_err(to_py)?;
        self.0.apply(&psi).map(|s| s.into_amplitudes()).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("ComplexMatrix({}x{})", self.0.rows(), self.0.cols())
    }
}

/// Split `d = d_a * d_b`, left factor most significant.
#[pyclass(name = "Bipartition", module = "bakerlab", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyBipartition(core::Bipartition);

#[pymethods]
impl PyBipartition {
    #[new]
    fn new(d_a: usize, d_b: usize) -> PyResult<Self> {
        core::Bipartition::new(d_a, d_b).map(PyBipartition).map_err(to_py)
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        text.parse().map(PyBipartition).map_err(to_py)
    }

    #[getter]
    fn d_a(&self) -> usize {
        self.0.d_a()
    }

    #[getter]
    fn d_b(&self) -> usize {
        self.0.d_b()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn swapped(&self) -> Self {
        PyBipartition(self.0.swapped())
    }

    fn max_linear_entropy(&self) -> f64 {
        self.0.max_linear_entropy()
    }

    fn __repr__(&self) -> String {
        format!("Bipartition({})", self.0)
    }
}

fn state(amps: Vec<Complex64>) -> PyResult<core::StateVector> {
    core::StateVector::new(amps).map_err(to_py)
}

/// Named map: baker, dmap, dprime, bbar, reflection, fourier or lambda.
#[pyfunction]
fn build_map(kind: &str, d: usize) -> PyResult<PyMatrix> {
    let kind: core::MapKind = kind.parse().map_err(to_py)?;
    kind.build(d).map(PyMatrix).map_err(to_py)
}

#[pyfunction]
fn baker(d: usize) -> PyResult<PyMatrix> {
    core::baker(d).map(PyMatrix).map_err(to_py)
}

#[pyfunction]
fn reflection(d: usize) -> PyResult<PyMatrix> {
    core::reflection(d).map(PyMatrix).map_err(to_py)
}

#[pyfunction]
fn antiperiodic_fourier(d: usize) -> PyResult<PyMatrix> {
    core::antiperiodic_fourier(d).map(PyMatrix).map_err(to_py)
}

/// Reflection-symmetric unitary `Lambda blockdiag(upper, lower) Lambda^dag`.
#[pyfunction]
fn from_parity_blocks(upper: &PyMatrix, lower: &PyMatrix) -> PyResult<PyMatrix> {
    core::maps::from_parity_blocks(&upper.0, &lower.0).map(PyMatrix).map_err(to_py)
}

/// Sample from "cue", "coe" or "symmetric" using stream `stream` of `seed`.
#[pyfunction]
#[pyo3(signature = (kind, d, seed, stream = 0))]
fn sample_unitary(kind: &str, d: usize, seed: u64, stream: u64) -> PyResult<PyMatrix> {
    let kind: core::EnsembleKind = kind.parse().map_err(to_py)?;
    kind.sample(d, &mut RngStream::new(seed, stream).rng()).map(PyMatrix).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (d, seed, stream = 0))]
fn haar_state(d: usize, seed: u64, stream: u64) -> PyResult<Vec<Complex64>> {
    core::haar_state(d, &mut RngStream::new(seed, stream).rng()).map(|s| s.into_amplitudes()).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (part, seed, stream = 0))]
fn product_state(part: &PyBipartition, seed: u64, stream: u64) -> Vec<Complex64> {
    core::product_state(part.0, &mut RngStream::new(seed, stream).rng()).into_amplitudes()
}

#[pyfunction]
fn linear_entropy(psi: Vec<Complex64>, part: &PyBipartition) -> PyResult<f64> {
    core::linear_entropy(&state(psi)?, part.0).map_err(to_py)
}

#[pyfunction]
fn cue_mean_entropy(part: &PyBipartition) -> f64 {
    core::cue_mean_entropy(part.0)
}

/// `S_L(U^n psi)` for `n = 1..=n_max`.
#[pyfunction]
fn entropy_timeseries(u: &PyMatrix, psi: Vec<Complex64>, part: &PyBipartition, n_max: u64) -> PyResult<Vec<f64>> {
    let samples = core::entropy_timeseries(&u.0, &state(psi)?, part.0, n_max).map_err(to_py)?;
    Ok(samples.into_iter().map(|s| s.value).collect())
}

/// `(mean, std_error)` of the single-step entangling power.
#[pyfunction]
fn entangling_power_mc(
    py: Python<'_>,
    u: &PyMatrix,
    part: &PyBipartition,
    n_samples: u64,
    seed: u64,
) -> PyResult<(f64, f64)> {
    let est = py.detach(|| core::entangling_power_mc(&u.0, part.0, n_samples, seed)).map_err(to_py)?;
    Ok((est.mean, est.std_error))
}

/// `(mean, std_error)` of the brute-force time and state average.
#[pyfunction]
fn time_and_state_average(
    py: Python<'_>,
    u: &PyMatrix,
    part: &PyBipartition,
    n_min: u64,
    n_max: u64,
    n_states: u64,
    seed: u64,
) -> PyResult<(f64, f64)> {
    let est = py.detach(|| core::time_and_state_average(&u.0, part.0, n_min, n_max, n_states, seed)).map_err(to_py)?;
    Ok((est.mean, est.std_error))
}

/// Sorted eigenphases in `[0, 2 pi)`.
#[pyfunction]
fn eigenphases(u: &PyMatrix) -> PyResult<Vec<f64>> {
    core::eigensystem(&u.0).map(|e| e.phases().to_vec()).map_err(to_py)
}

/// `(value, assumptions_hold)` of the closed-form asymptotic entangling power.
#[pyfunction]
fn asymptotic_entangling_power(py: Python<'_>, u: &PyMatrix, part: &PyBipartition) -> PyResult<(f64, bool)> {
    let v = py
        .detach(|| {
            let eig = core::eigensystem(&u.0)?;
            core::asymptotic_entangling_power(&eig, part.0)
        })
        .map_err(to_py)?;
    Ok((v.value, v.assumptions_hold))
}

/// `(value, assumptions_hold)` of the infinite-time average of `S_L(U^n psi)`.
#[pyfunction]
fn asymptotic_entropy(u: &PyMatrix, psi: Vec<Complex64>, part: &PyBipartition) -> PyResult<(f64, bool)> {
    let eig = core::eigensystem(&u.0).map_err(to_py)?;
    let v = core::asymptotic_entropy(&eig, &state(psi)?, part.0).map_err(to_py)?;
    Ok((v.value, v.assumptions_hold))
}

/// Resonance search over eigenphases; returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (phases, tol = core::commensurability::DEFAULT_TOLERANCE, budget = core::commensurability::DEFAULT_BUDGET))]
fn commensurability_check<'py>(
    py: Python<'py>,
    phases: Vec<f64>,
    tol: f64,
    budget: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let report = core::commensurability_check(&phases, tol, budget);
    let text = serde_json::to_string(&report).map_err(|e| PyValueError::new_err(e.to_string()))?;
    json_to_py(py, &text)
}

#[pymodule]
fn bakerlab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMatrix>()?;
    m.add_class::<PyBipartition>()?;
    m.add_function(wrap_pyfunction!(build_map, m)?)?;
    m.add_function(wrap_pyfunction!(baker, m)?)?;
    m.add_function(wrap_pyfunction!(reflection, m)?)?;
    m.add_function(wrap_pyfunction!(antiperiodic_fourier, m)?)?;
    m.add_function(wrap_pyfunction!(from_parity_blocks, m)?)?;
    m.add_function(wrap_pyfunction!(sample_unitary, m)?)?;
    m.add_function(wrap_pyfunction!(haar_state, m)?)?;
    m.add_function(wrap_pyfunction!(product_state, m)?)?;
    m.add_function(wrap_pyfunction!(linear_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(cue_mean_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(entropy_timeseries, m)?)?;
    m.add_function(wrap_pyfunction!(entangling_power_mc, m)?)?;
    m.add_function(wrap_pyfunction!(time_and_state_average, m)?)?;
    m.add_function(wrap_pyfunction!(eigenphases, m)?)?;
    m.add_function(wrap_pyfunction!(asymptotic_entangling_power, m)?)?;
    m.add_function(wrap_pyfunction!(asymptotic_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(commensurability_check, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
