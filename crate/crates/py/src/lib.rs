//! Python bindings. Exact moments are returned as `fractions.Fraction`,
//! everything else as plain floats, ints and dicts.

use hypersre::recursion::{self as core_recursion, ChainOptions};
use hypersre::sre::{self as core_sre, DEFAULT_ENUMERATION_CAP};
use hypersre::{Alpha, BitVec, BoundVariant, EnumOptions, Error, Hypergraph3, LatticeKind, Moment, PauliLabel};
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyString};

create_exception!(hypersre_py, CapacityError, PyValueError, "Input exceeds a configured size limit.");

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Capacity { .. } => CapacityError::new_err(e.to_string()),
        Error::Invariant(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Accepts a number or a string such as `"2"`, `"1"`, `"inf"`.
struct PyAlpha(Alpha);

impl<'py> FromPyObject<'_, 'py> for PyAlpha {
    type Error = PyErr;

    fn extract(ob: Borrowed<'_, 'py, PyAny>) -> PyResult<Self> {
        let alpha = if let Ok(s) = ob.cast::<PyString>() {
            s.to_str()?.parse::<Alpha>()
        } else {
            Alpha::new(ob.extract::<f64>()?)
        };
        alpha.map(PyAlpha).map_err(to_py)
    }
}

fn enum_options(max_qubits: usize, threads: Option<usize>) -> EnumOptions {
    let opts = EnumOptions::default().with_cap(max_qubits);
    match threads {
        Some(t) => opts.with_threads(t),
        None => opts,
    }
}

fn moment_to_py<'py>(py: Python<'py>, m: &Moment) -> PyResult<Bound<'py, PyAny>> {
    match m.as_exact() {
        Some(r) => py
            .import("fractions")?
            .getattr("Fraction")?
            .call1((r.numer().clone(), r.denom().clone())),
        None => Ok(m.to_f64().into_pyobject(py)?.into_any()),
    }
}

/// Hypergraph with CCZ hyperedges and optional CZ / Z edges.
#[pyclass(name = "Hypergraph", frozen, from_py_object)]
#[derive(Clone)]
struct PyHypergraph {
    inner: Hypergraph3,
}

#[pymethods]
impl PyHypergraph {
    #[new]
    #[pyo3(signature = (n, edges3 = Vec::new(), edges2 = Vec::new(), edges1 = Vec::new()))]
    fn new(n: usize, edges3: Vec<[usize; 3]>, edges2: Vec<[usize; 2]>, edges1: Vec<usize>) -> PyResult<Self> {
        let mut h = Hypergraph3::new(n, edges3).map_err(to_py)?;
        for [i, j] in edges2 {
            h.add_edge2(i, j).map_err(to_py)?;
        }
        for i in edges1 {
            h.add_edge1(i).map_err(to_py)?;
        }
        Ok(Self { inner: h })
    }

    #[staticmethod]
    fn chain(n: usize) -> PyResult<Self> {
        hypersre::chain(n).map(|inner| Self { inner }).map_err(to_py)
    }

    #[staticmethod]
    fn union_jack(l: usize) -> PyResult<Self> {
        hypersre::union_jack(l).map(|inner| Self { inner }).map_err(to_py)
    }

    #[staticmethod]
    fn triangular(l: usize) -> PyResult<Self> {
        hypersre::triangular(l).map(|inner| Self { inner }).map_err(to_py)
    }

    /// `kind` is `chain`, `union-jack` or `triangular`; `size` is N or L.
    #[staticmethod]
    fn lattice(kind: &str, size: usize) -> PyResult<Self> {
        let kind: LatticeKind = kind.parse().map_err(to_py)?;
        kind.build(size).map(|inner| Self { inner }).map_err(to_py)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Hypergraph3::from_json(text).map(|inner| Self { inner }).map_err(to_py)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn edges3(&self) -> Vec<[usize; 3]> {
        self.inner.edges3().iter().copied().collect()
    }

    #[getter]
    fn edges2(&self) -> Vec<[usize; 2]> {
        self.inner.edges2().iter().copied().collect()
    }

    #[getter]
    fn edges1(&self) -> Vec<usize> {
        self.inner.edges1().iter().copied().collect()
    }

    fn without_clifford_edges(&self) -> Self {
        Self {
            inner: self.inner.without_clifford_edges(),
        }
    }

    /// Per-vertex ranks `h_k`, degrees `delta_k` and their means.
    fn vertex_stats<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let s = self.inner.vertex_stats().map_err(to_py)?;
        let fraction = py.import("fractions")?.getattr("Fraction")?;
        let d = PyDict::new(py);
        d.set_item("h_k", s.h_k)?;
        d.set_item("delta_k", s.delta_k)?;
        d.set_item("h_bar", fraction.call1((*s.h_bar.numer(), *s.h_bar.denom()))?)?;
        d.set_item("delta_bar", fraction.call1((*s.delta_bar.numer(), *s.delta_bar.denom()))?)?;
        Ok(d)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!(
            "Hypergraph(n={}, edges3={}, edges2={}, edges1={})",
            self.inner.n(),
            self.inner.edges3().len(),
            self.inner.edges2().len(),
            self.inner.edges1().len()
        )
    }
}

/// Exact entropy by enumeration; returns a dict with `sre`, `pl_moment`,
/// `method`, `n` and `alpha`.
#[pyfunction]
#[pyo3(signature = (h, alpha = PyAlpha(Alpha::Finite(2.0)), max_qubits = DEFAULT_ENUMERATION_CAP, threads = None))]
fn sre<'py>(
    py: Python<'py>,
    h: &PyHypergraph,
    alpha: PyAlpha,
    max_qubits: usize,
    threads: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let opts = enum_options(max_qubits, threads);
    let r = py.detach(|| core_sre::sre(&h.inner, alpha.0, &opts)).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("alpha", r.alpha.to_string())?;
    d.set_item("n", r.n)?;
    d.set_item("method", r.method.as_str())?;
    d.set_item("sre", r.sre)?;
    match &r.pl_moment {
        Some(m) => d.set_item("pl_moment", moment_to_py(py, m)?)?,
        None => d.set_item("pl_moment", py.None())?,
    }
    Ok(d)
}

/// `m_α` by enumeration over all bit-strings.
#[pyfunction]
#[pyo3(signature = (h, alpha, max_qubits = DEFAULT_ENUMERATION_CAP, threads = None))]
fn exact_pl_moment<'py>(
    py: Python<'py>,
    h: &PyHypergraph,
    alpha: PyAlpha,
    max_qubits: usize,
    threads: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let opts = enum_options(max_qubits, threads);
    let m = py.detach(|| core_sre::exact_pl_moment(&h.inner, alpha.0, &opts)).map_err(to_py)?;
    moment_to_py(py, &m)
}

/// Counts of `x` by `h(x)`, index `h`.
#[pyfunction]
#[pyo3(signature = (h, max_qubits = DEFAULT_ENUMERATION_CAP, threads = None))]
fn rank_histogram(py: Python<'_>, h: &PyHypergraph, max_qubits: usize, threads: Option<usize>) -> PyResult<Vec<u64>> {
    let opts = enum_options(max_qubits, threads);
    let hist = py.detach(|| core_sre::rank_histogram(&h.inner, &[], &opts)).map_err(to_py)?;
    Ok(hist.counts)
}

/// `2h(x)` for a bit-string given as a sequence of 0/1.
#[pyfunction]
fn two_h(h: &PyHypergraph, x: Vec<u8>) -> PyResult<usize> {
    let bits: Vec<bool> = x.iter().map(|&b| b != 0).collect();
    core_sre::two_h(&h.inner, &BitVec::from_bools(&bits)).map_err(to_py)
}

/// Monte Carlo estimate; returns `mean`, `std_error`, `sre`, `sre_std_error`,
/// `samples`, `seed`.
#[pyfunction]
#[pyo3(signature = (h, alpha = PyAlpha(Alpha::Finite(2.0)), samples = 256, seed = 0, threads = None))]
fn mc_sre<'py>(
    py: Python<'py>,
    h: &PyHypergraph,
    alpha: PyAlpha,
    samples: u64,
    seed: u64,
    threads: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let opts = enum_options(DEFAULT_ENUMERATION_CAP, threads);
    let est = py
        .detach(|| core_sre::mc_sre(&h.inner, alpha.0, samples, seed, &opts))
        .map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("mean", est.mean)?;
    d.set_item("std_error", est.std_error)?;
    d.set_item("sre", est.sre_point)?;
    d.set_item("sre_std_error", est.sre_std_error(alpha.0.as_f64()))?;
    d.set_item("samples", est.samples)?;
    d.set_item("seed", est.seed)?;
    Ok(d)
}

/// Rank-based bound; `variant` is `per_vertex` or `jensen`.
#[pyfunction]
#[pyo3(signature = (h, alpha, variant = "per_vertex"))]
fn upper_bound(h: &PyHypergraph, alpha: PyAlpha, variant: &str) -> PyResult<f64> {
    let v = match variant {
        "per_vertex" | "per-vertex" => BoundVariant::PerVertex,
        "jensen" => BoundVariant::Jensen,
        other => return Err(PyValueError::new_err(format!("unknown bound variant `{other}`"))),
    };
    core_sre::upper_bound(&h.inner, alpha.0, v).map_err(to_py)
}

/// Degree-based bound.
#[pyfunction]
fn prev_upper_bound(h: &PyHypergraph, alpha: PyAlpha) -> PyResult<f64> {
    core_sre::prev_upper_bound(&h.inner, alpha.0).map_err(to_py)
}

/// Moment of the `n`-qubit chain from the recursion.
#[pyfunction]
fn chain_pl_moment<'py>(py: Python<'py>, n: usize, alpha: PyAlpha) -> PyResult<Bound<'py, PyAny>> {
    let m = py
        .detach(|| core_recursion::chain_pl_moment(n, alpha.0, &ChainOptions::default()))
        .map_err(to_py)?;
    moment_to_py(py, &m)
}

/// Entropy of the `n`-qubit chain from the recursion.
#[pyfunction]
fn chain_sre(py: Python<'_>, n: usize, alpha: PyAlpha) -> PyResult<f64> {
    let a = alpha.0.finite().map_err(to_py)?;
    let m = py
        .detach(|| core_recursion::chain_pl_moment(n, alpha.0, &ChainOptions::default()))
        .map_err(to_py)?;
    Ok(core_sre::sre_from_moment(&m, a))
}

/// `(slope, intercept)` of the large-N chain entropy.
#[pyfunction]
#[pyo3(signature = (alpha = PyAlpha(Alpha::Finite(2.0)), n_lo = 150, n_hi = 200))]
fn asymptotic_fit(alpha: PyAlpha, n_lo: usize, n_hi: usize) -> PyResult<(f64, f64)> {
    let fit = core_recursion::asymptotic_fit(alpha.0, n_lo, n_hi, &ChainOptions::default()).map_err(to_py)?;
    Ok((fit.slope, fit.intercept))
}

/// Definitional moment from the full Pauli sum (small `n` only).
#[pyfunction]
fn brute_pl_moment<'py>(py: Python<'py>, h: &PyHypergraph, alpha: PyAlpha) -> PyResult<Bound<'py, PyAny>> {
    let m = hypersre::brute_pl_moment(&h.inner, alpha.0).map_err(to_py)?;
    moment_to_py(py, &m)
}

/// `<psi|P|psi>` for the Pauli with bit masks `x` and `z` (small `n` only).
#[pyfunction]
fn pauli_expectation(h: &PyHypergraph, x: u64, z: u64) -> PyResult<f64> {
    let psi = hypersre::statevector(&h.inner).map_err(to_py)?;
    hypersre::pauli_expectation(&psi, &PauliLabel::from_masks(h.inner.n(), x, z)).map_err(to_py)
}

#[pymodule]
fn hypersre_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyHypergraph>()?;
    m.add("CapacityError", m.py().get_type::<CapacityError>())?;
    m.add_function(wrap_pyfunction!(sre, m)?)?;
    m.add_function(wrap_pyfunction!(exact_pl_moment, m)?)?;
    m.add_function(wrap_pyfunction!(rank_histogram, m)?)?;
    m.add_function(wrap_pyfunction!(two_h, m)?)?;
    m.add_function(wrap_pyfunction!(mc_sre, m)?)?;
    m.add_function(wrap_pyfunction!(upper_bound, m)?)?;
    m.add_function(wrap_pyfunction!(prev_upper_bound, m)?)?;
    m.add_function(wrap_pyfunction!(chain_pl_moment, m)?)?;
    m.add_function(wrap_pyfunction!(chain_sre, m)?)?;
    m.add_function(wrap_pyfunction!(asymptotic_fit, m)?)?;
    m.add_function(wrap_pyfunction!(brute_pl_moment, m)?)?;
    m.add_function(wrap_pyfunction!(pauli_expectation, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use pyo3::py_run;

    #[test]
    fn module_round_trip() {
        pyo3::append_to_inittab!(hypersre_py);
        Python::initialize();
        Python::attach(|py| {
            let m = py.import("hypersre_py").unwrap();
            py_run!(
                py,
                m,
                r#"
from fractions import Fraction
h = m.Hypergraph.chain(3)
assert m.sre(h, "2")["pl_moment"] == Fraction(11, 32)
assert m.chain_pl_moment(9, 3) == m.exact_pl_moment(m.Hypergraph.chain(9), 3)
try:
    m.exact_pl_moment(m.Hypergraph.chain(30), 2)
    raise AssertionError("no capacity error")
except m.CapacityError:
    pass
"#
            );
        });
    }
}
