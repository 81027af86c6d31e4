//! Python bindings. Reports come back as plain dicts built from the same JSON
//! the CLI emits.

use entanglers::constructions::{self as cons, GateKind, GateMatrix, CERTIFY_MIN_THRESHOLD};
use entanglers::search::{self, SearchConfig};
use entanglers::subspace::{self as sub, AntiVector, SingleParticleVector, SymVector};
use entanglers::varieties::{self, VarietyKind};
use entanglers::{formats, C64};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

fn err(e: entanglers::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn gate_kind(family: &str, d: Option<usize>, d1: Option<usize>, d2: Option<usize>) -> PyResult<GateKind> {
    let need = |v: Option<usize>, name: &str| v.ok_or_else(|| PyValueError::new_err(format!("{family} needs {name}")));
    let kind = match family {
        "bosonic" => GateKind::Bosonic { d: need(d, "d")? },
        "fermionic" => GateKind::Fermionic { d: need(d, "d")? },
        "distinguishable" => GateKind::Distinguishable { d1: need(d1, "d1")?, d2: need(d2, "d2")? },
        other => return Err(PyValueError::new_err(format!("unknown family {other:?}"))),
    };
    kind.validate().map_err(err)
}

// Recovers d from the length of a coordinate vector.
fn dim_for(len: usize, size: fn(usize) -> usize, what: &str) -> PyResult<usize> {
    (1..=len + 2)
        .find(|&d| size(d) == len && len > 0)
        .ok_or_else(|| PyValueError::new_err(format!("{len} is not a valid {what} coordinate count")))
}

fn sym(coords: Vec<C64>) -> PyResult<SymVector> {
    SymVector::new(dim_for(coords.len(), sub::sym_dim, "symmetric")?, coords).map_err(err)
}

fn anti(coords: Vec<C64>) -> PyResult<AntiVector> {
    AntiVector::new(dim_for(coords.len(), sub::anti_dim, "antisymmetric")?, coords).map_err(err)
}

fn spv(v: Vec<C64>) -> PyResult<SingleParticleVector> {
    SingleParticleVector::new(v).map_err(err)
}

fn config(restarts: Option<usize>, max_iters: Option<usize>, tol: Option<f64>, seed: Option<u64>) -> SearchConfig {
    let base = SearchConfig::default();
    SearchConfig {
        restarts: restarts.unwrap_or(base.restarts),
        max_iters: max_iters.unwrap_or(base.max_iters),
        tolerance: tol.unwrap_or(base.tolerance),
        seed: seed.unwrap_or(base.seed),
        ..base
    }
}

fn rows(m: &entanglers::linalg::CMatrix) -> Vec<Vec<C64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// A unitary on the bosonic, fermionic or distinguishable two-particle space.
#[pyclass(name = "Gate", frozen)]
struct Gate {
    inner: GateMatrix,
}

#[pymethods]
impl Gate {
    #[staticmethod]
    fn permutation_bue(d: usize) -> PyResult<Self> {
        Ok(Gate { inner: cons::build_permutation_bue(d).map_err(err)? })
    }

    #[staticmethod]
    fn householder_bue(d: usize) -> PyResult<Self> {
        Ok(Gate { inner: cons::build_householder_bue(d).map_err(err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (family, d=None, d1=None, d2=None, seed=42))]
    fn haar(family: &str, d: Option<usize>, d1: Option<usize>, d2: Option<usize>, seed: u64) -> PyResult<Self> {
        let kind = gate_kind(family, d, d1, d2)?;
        Ok(Gate { inner: search::sample_haar_gate(kind, seed).map_err(err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (family, d=None, d1=None, d2=None))]
    fn identity(family: &str, d: Option<usize>, d1: Option<usize>, d2: Option<usize>) -> PyResult<Self> {
        Ok(Gate { inner: GateMatrix::identity(gate_kind(family, d, d1, d2)?).map_err(err)? })
    }

    /// Builds a gate from a matrix given as a list of rows.
    #[staticmethod]
    #[pyo3(signature = (rows, family, d=None, d1=None, d2=None))]
    fn from_rows(
        rows: Vec<Vec<C64>>,
        family: &str,
        d: Option<usize>,
        d1: Option<usize>,
        d2: Option<usize>,
    ) -> PyResult<Self> {
        let kind = gate_kind(family, d, d1, d2)?;
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(PyValueError::new_err("matrix must be square"));
        }
        let m = entanglers::linalg::CMatrix::from_fn(n, n, |i, j| rows[i][j]);
        Ok(Gate { inner: GateMatrix::new(kind, m, "external").map_err(err)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Gate { inner: formats::from_json(text).map_err(err)? })
    }

    fn to_json(&self) -> PyResult<String> {
        formats::to_json(&self.inner).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn kind<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.kind())
    }

    #[getter]
    fn provenance(&self) -> &str {
        self.inner.provenance()
    }

    fn matrix(&self) -> Vec<Vec<C64>> {
        rows(self.inner.matrix())
    }

    fn unitarity_defect(&self) -> f64 {
        self.inner.unitarity_defect()
    }

    fn trace(&self) -> C64 {
        self.inner.trace()
    }

    fn apply(&self, v: Vec<C64>) -> PyResult<Vec<C64>> {
        if v.len() != self.inner.n() {
            return Err(PyValueError::new_err(format!("expected {} coordinates, got {}", self.inner.n(), v.len())));
        }
        Ok(self.inner.apply(&v))
    }

    fn __repr__(&self) -> String {
        format!("Gate({}, n={}, provenance={:?})", self.inner.kind(), self.inner.n(), self.inner.provenance())
    }
}

/// Symmetric coordinates of `alpha ⊗ alpha`.
#[pyfunction]
fn sym_embed(alpha: Vec<C64>) -> PyResult<Vec<C64>> {
    Ok(sub::sym_embed(&spv(alpha)?).map_err(err)?.into_coords())
}

/// Plücker coordinates of `alpha ∧ beta`.
#[pyfunction]
fn wedge_embed(alpha: Vec<C64>, beta: Vec<C64>) -> PyResult<Vec<C64>> {
    Ok(sub::wedge_embed(&spv(alpha)?, &spv(beta)?).map_err(err)?.into_coords())
}

#[pyfunction]
fn veronese_residual(coords: Vec<C64>) -> PyResult<f64> {
    varieties::veronese_residual(&sym(coords)?).map_err(err)
}

#[pyfunction]
fn grassmann_residual(coords: Vec<C64>) -> PyResult<f64> {
    varieties::grassmann_residual(&anti(coords)?).map_err(err)
}

#[pyfunction]
fn plucker_relations_residual(coords: Vec<C64>) -> PyResult<f64> {
    varieties::plucker_relations_residual(&anti(coords)?).map_err(err)
}

#[pyfunction]
fn segre_residual(z: Vec<C64>, d1: usize, d2: usize) -> PyResult<f64> {
    varieties::segre_residual(&z, d1, d2).map_err(err)
}

/// `(rank, singular values)` of the symmetric matricization.
#[pyfunction]
#[pyo3(signature = (coords, tol=sub::RANK_TOL))]
fn sym_rank(coords: Vec<C64>, tol: f64) -> PyResult<(usize, Vec<f64>)> {
    let r = sub::sym_rank(&sym(coords)?, tol).map_err(err)?;
    Ok((r.rank, r.singular_values))
}

type SlaterParts = (Vec<f64>, Vec<(Vec<C64>, Vec<C64>)>);
type SchmidtParts = (Vec<f64>, Vec<Vec<C64>>, Vec<Vec<C64>>);

/// `(coefficients, [(alpha_i, beta_i), ...])`.
#[pyfunction]
fn slater_decompose(coords: Vec<C64>) -> PyResult<SlaterParts> {
    let dec = sub::slater_decompose(&anti(coords)?).map_err(err)?;
    Ok((dec.coefficients, dec.pairs))
}

/// `(coefficients, left vectors, right vectors)`.
#[pyfunction]
fn schmidt_decompose(z: Vec<C64>, d1: usize, d2: usize) -> PyResult<SchmidtParts> {
    let dec = sub::schmidt_decompose(&z, d1, d2).map_err(err)?;
    Ok((dec.coefficients, dec.left, dec.right))
}

#[pyfunction]
#[pyo3(signature = (family, d=None, d1=None, d2=None))]
fn dimension_gate<'py>(
    py: Python<'py>,
    family: &str,
    d: Option<usize>,
    d1: Option<usize>,
    d2: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let variety: VarietyKind = gate_kind(family, d, d1, d2)?.variety();
    to_py(py, &varieties::dimension_gate(variety).map_err(err)?)
}

#[pyfunction]
fn sample_haar_unitary(n: usize, seed: u64) -> Vec<Vec<C64>> {
    rows(&search::sample_haar_unitary(n, seed))
}

/// Counterexample search; returns the verification report.
#[pyfunction]
#[pyo3(signature = (gate, restarts=None, max_iters=None, tol=None, seed=None))]
fn verify<'py>(
    py: Python<'py>,
    gate: &Gate,
    restarts: Option<usize>,
    max_iters: Option<usize>,
    tol: Option<f64>,
    seed: Option<u64>,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = config(restarts, max_iters, tol, seed);
    let report = py.detach(|| search::verify_gate(&gate.inner, &cfg)).map_err(err)?;
    to_py(py, &report)
}

#[pyfunction]
#[pyo3(signature = (family, count=10, d=None, d1=None, d2=None, restarts=None, max_iters=None, tol=None, seed=None))]
#[allow(clippy::too_many_arguments)]
fn prevalence<'py>(
    py: Python<'py>,
    family: &str,
    count: usize,
    d: Option<usize>,
    d1: Option<usize>,
    d2: Option<usize>,
    restarts: Option<usize>,
    max_iters: Option<usize>,
    tol: Option<f64>,
    seed: Option<u64>,
) -> PyResult<Bound<'py, PyAny>> {
    let kind = gate_kind(family, d, d1, d2)?;
    let cfg = config(restarts, max_iters, tol, seed);
    let report = py.detach(|| search::prevalence_trial(kind, count, &cfg)).map_err(err)?;
    to_py(py, &report)
}

#[pyfunction]
#[pyo3(signature = (gate, samples=10_000, seed=42))]
fn profile<'py>(py: Python<'py>, gate: &Gate, samples: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let p = py.detach(|| search::entanglement_profile(&gate.inner, samples, seed)).map_err(err)?;
    to_py(py, &p)
}

#[pyfunction]
#[pyo3(signature = (d, restarts=500, seed=42, threshold=CERTIFY_MIN_THRESHOLD))]
fn certify_e1(py: Python<'_>, d: usize, restarts: usize, seed: u64, threshold: f64) -> PyResult<Bound<'_, PyAny>> {
    let cfg = config(Some(restarts), None, None, Some(seed));
    let r = py.detach(|| cons::e1_certify_positive(d, &cfg, threshold)).map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
#[pyo3(signature = (d, restarts=500, seed=42, threshold=CERTIFY_MIN_THRESHOLD))]
fn certify_e2(py: Python<'_>, d: usize, restarts: usize, seed: u64, threshold: f64) -> PyResult<Bound<'_, PyAny>> {
    let cfg = config(Some(restarts), None, None, Some(seed));
    let r = py.detach(|| cons::e2_certify_rank3(d, &cfg, threshold)).map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
#[pyo3(signature = (d, samples=1000, seed=42))]
fn e1_product_identity_check(d: usize, samples: usize, seed: u64) -> PyResult<bool> {
    cons::e1_product_identity_check(d, samples, seed).map_err(err)
}

/// Universal entanglers on two-particle bosonic, fermionic and distinguishable systems.
#[pymodule(name = "entanglers")]
fn python_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Gate>()?;
    m.add_function(wrap_pyfunction!(sym_embed, m)?)?;
    m.add_function(wrap_pyfunction!(wedge_embed, m)?)?;
    m.add_function(wrap_pyfunction!(veronese_residual, m)?)?;
    m.add_function(wrap_pyfunction!(grassmann_residual, m)?)?;
    m.add_function(wrap_pyfunction!(plucker_relations_residual, m)?)?;
    m.add_function(wrap_pyfunction!(segre_residual, m)?)?;
    m.add_function(wrap_pyfunction!(sym_rank, m)?)?;
    m.add_function(wrap_pyfunction!(slater_decompose, m)?)?;
    m.add_function(wrap_pyfunction!(schmidt_decompose, m)?)?;
    m.add_function(wrap_pyfunction!(dimension_gate, m)?)?;
    m.add_function(wrap_pyfunction!(sample_haar_unitary, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(prevalence, m)?)?;
    m.add_function(wrap_pyfunction!(profile, m)?)?;
    m.add_function(wrap_pyfunction!(certify_e1, m)?)?;
    m.add_function(wrap_pyfunction!(certify_e2, m)?)?;
    m.add_function(wrap_pyfunction!(e1_product_identity_check, m)?)?;
    m.add("NOT_A_PROOF", search::NOT_A_PROOF)?;
    m.add("RESIDUAL_CONVENTION", varieties::RESIDUAL_CONVENTION)?;
    Ok(())
}
