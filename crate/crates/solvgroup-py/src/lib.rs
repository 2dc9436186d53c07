//! Python bindings for the solvgroup library.
//!
//! Sets cross the boundary as a `GroupSet` class; structured results
//! (growth statistics, certificates, decomposition reports) cross as
//! canonical JSON strings so Python sees exactly the same wire format as
//! the command-line tool, with all rationals as decimal strings.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use solvgroup::engine::{decompose, witness_matrices, EngineConfig};
use solvgroup::families;
use solvgroup::growth::{certify_approximate_group, growth_stats};
use solvgroup::nilpotency::nilpotency_step_with_budget;
use solvgroup::verify::{verify_report, CheckStatus, Payload, Report, RunManifest};
use solvgroup::wire::{digest_bytes, to_canonical_json};
use solvgroup::GrowthCap;

fn lib_err(e: solvgroup::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_json<T: serde::Serialize>(value: &T) -> PyResult<String> {
    to_canonical_json(value).map_err(lib_err)
}

/// A finite deduplicated set of invertible upper-triangular matrices
/// over the Gaussian rationals.
#[pyclass(name = "GroupSet", frozen)]
struct PyGroupSet {
    inner: solvgroup::GroupSet,
}

#[pymethods]
impl PyGroupSet {
    /// Parse the JSON wire format ({"n": ..., "elements": [...]}).
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner: solvgroup::GroupSet =
            serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyGroupSet { inner })
    }

    fn to_json(&self) -> PyResult<String> {
        to_json(&self.inner)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("GroupSet(n={}, len={})", self.inner.dim(), self.inner.len())
    }

    fn __eq__(&self, other: &PyGroupSet) -> bool {
        self.inner == other.inner
    }

    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn contains_identity(&self) -> bool {
        self.inner.contains_identity()
    }

    fn is_symmetric(&self) -> bool {
        self.inner.is_symmetric()
    }

    /// Closure under inverse plus the identity.
    fn symmetrize(&self) -> Self {
        PyGroupSet {
            inner: self.inner.symmetrize(),
        }
    }

    #[pyo3(signature = (other, cap = 5_000_000))]
    fn product(&self, other: &PyGroupSet, cap: usize) -> PyResult<Self> {
        self.inner
            .product(&other.inner, GrowthCap::new(cap))
            .map(|inner| PyGroupSet { inner })
            .map_err(lib_err)
    }

    #[pyo3(signature = (m, cap = 5_000_000))]
    fn power(&self, m: u32, cap: usize) -> PyResult<Self> {
        self.inner
            .power(m, GrowthCap::new(cap))
            .map(|inner| PyGroupSet { inner })
            .map_err(lib_err)
    }
}

#[pyfunction]
#[pyo3(signature = (radius, cap = 5_000_000))]
fn heisenberg_ball(radius: u32, cap: usize) -> PyResult<PyGroupSet> {
    families::heisenberg_ball(radius, GrowthCap::new(cap))
        .map(|inner| PyGroupSet { inner })
        .map_err(lib_err)
}

#[pyfunction]
#[pyo3(signature = (n, radius, cap = 5_000_000))]
fn unitriangular_ball(n: usize, radius: u32, cap: usize) -> PyResult<PyGroupSet> {
    families::unitriangular_ball(n, radius, GrowthCap::new(cap))
        .map(|inner| PyGroupSet { inner })
        .map_err(lib_err)
}

#[pyfunction]
#[pyo3(signature = (base, length, n = 2))]
fn diag_progression(base: &str, length: u32, n: usize) -> PyResult<PyGroupSet> {
    let base = base
        .parse()
        .map_err(|e: solvgroup::Error| PyValueError::new_err(e.to_string()))?;
    families::diag_progression(&base, length, n)
        .map(|inner| PyGroupSet { inner })
        .map_err(lib_err)
}

#[pyfunction]
#[pyo3(signature = (n, size, seed = 0))]
fn random_upper_triangular(n: usize, size: usize, seed: u64) -> PyResult<PyGroupSet> {
    families::random_upper_triangular(n, size, &families::default_entry_pool(), seed)
        .map(|inner| PyGroupSet { inner })
        .map_err(lib_err)
}

/// Growth statistics (|A^k| sizes, doubling, tripling) as JSON.
#[pyfunction]
#[pyo3(signature = (a, max_power = 3, cap = 5_000_000))]
fn stats(a: &PyGroupSet, max_power: u32, cap: usize) -> PyResult<String> {
    let report = growth_stats(&a.inner, max_power, GrowthCap::new(cap)).map_err(lib_err)?;
    to_json(&report)
}

/// Approximate-group certificate report as JSON; the report also passes
/// the `verify` function below.
#[pyfunction]
#[pyo3(signature = (a, cap = 5_000_000))]
fn certify(a: &PyGroupSet, cap: usize) -> PyResult<String> {
    let (certificate, a_square) =
        certify_approximate_group(&a.inner, GrowthCap::new(cap)).map_err(lib_err)?;
    let report = wrap("certify", &a.inner, Payload::Certify {
        a: a.inner.clone(),
        a_square,
        certificate,
    })?;
    to_json(&report)
}

/// Nilpotency-step report for the group generated by the set, as JSON.
#[pyfunction]
#[pyo3(signature = (generators, cutoff, budget = 10_000_000))]
fn nilstep(generators: &PyGroupSet, cutoff: u32, budget: usize) -> PyResult<String> {
    let verdict =
        nilpotency_step_with_budget(&generators.inner, cutoff, budget).map_err(lib_err)?;
    let witness = witness_matrices(&verdict, &generators.inner);
    let report = wrap("nilstep", &generators.inner, Payload::NilStep {
        generators: generators.inner.clone(),
        cutoff,
        verdict,
        witness_matrices: witness,
    })?;
    to_json(&report)
}

/// Full decomposition report (coset subset, nilpotency certificate,
/// branch trace) as JSON.
#[pyfunction]
#[pyo3(signature = (a, cap = 5_000_000))]
fn decompose_set(a: &PyGroupSet, cap: usize) -> PyResult<String> {
    let mut config = EngineConfig::default();
    config.cap = GrowthCap::new(cap);
    let report = decompose(&a.inner, &config).map_err(lib_err)?;
    let report = wrap("decompose", &a.inner, Payload::Decompose {
        a: a.inner.clone(),
        report,
    })?;
    to_json(&report)
}

/// Independently re-check a report produced by any of the functions
/// above (or by the command-line tool). Returns a list of
/// (check-name, status, detail) triples; status is "pass", "fail" or
/// "skipped".
#[pyfunction]
fn verify(report_json: &str) -> PyResult<Vec<(String, String, String)>> {
    let report: Report =
        serde_json::from_str(report_json).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(verify_report(&report)
        .into_iter()
        .map(|c| {
            let status = match c.status {
                CheckStatus::Pass => "pass",
                CheckStatus::Fail => "fail",
                CheckStatus::Skipped => "skipped",
            };
            (c.name, status.to_string(), c.detail)
        })
        .collect())
}

fn wrap(command: &str, input: &solvgroup::GroupSet, payload: Payload) -> PyResult<Report> {
    Ok(Report {
        manifest: RunManifest {
            command: command.to_string(),
            input_digest: digest_bytes(to_json(input)?.as_bytes()),
            config: EngineConfig::default(),
            seed: None,
        },
        payload,
    })
}

#[pymodule]
fn solvgroup_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGroupSet>()?;
    m.add_function(wrap_pyfunction!(heisenberg_ball, m)?)?;
    m.add_function(wrap_pyfunction!(unitriangular_ball, m)?)?;
    m.add_function(wrap_pyfunction!(diag_progression, m)?)?;
    m.add_function(wrap_pyfunction!(random_upper_triangular, m)?)?;
    m.add_function(wrap_pyfunction!(stats, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(nilstep, m)?)?;
    m.add_function(wrap_pyfunction!(decompose_set, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
