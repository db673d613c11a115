//! Python bindings. Graphs, bundles and the main operations; structured
//! results come back as plain dicts and lists.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use pyo3::IntoPyObjectExt;
use serde_json::Value;

use zvsearch_core::game::{self, Search};
use zvsearch_core::gsp::{self as gsp_core, Verdict};
use zvsearch_core::io;
use zvsearch_core::solver::{self, Budget, Config};
use zvsearch_core::synth::{self, edge_key, AlignedSearchBundle, SubdivisionFloor};
use zvsearch_core::{generate, Error};

create_exception!(zvsearch, InputError, PyValueError);
create_exception!(zvsearch, ResourceError, PyRuntimeError);
create_exception!(zvsearch, UnresolvedError, PyException);

fn err(e: Error) -> PyErr {
    match e {
        Error::Input(m) => InputError::new_err(m),
        e @ Error::Resource { .. } => ResourceError::new_err(e.to_string()),
        Error::Unresolved(m) => UnresolvedError::new_err(m),
    }
}

fn json_to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_bound_py_any(py)?,
        Value::Number(n) => match n.as_u64() {
            Some(u) => u.into_bound_py_any(py)?,
            None => n.as_f64().unwrap_or(f64::NAN).into_bound_py_any(py)?,
        },
        Value::String(s) => s.into_bound_py_any(py)?,
        Value::Array(xs) => {
            let items = xs.iter().map(|x| json_to_py(py, x)).collect::<PyResult<Vec<_>>>()?;
            PyList::new(py, items)?.into_any()
        }
        Value::Object(map) => {
            let d = PyDict::new(py);
            for (k, x) in map {
                d.set_item(k, json_to_py(py, x)?)?;
            }
            d.into_any()
        }
    })
}

fn to_py<'py, T: serde::Serialize>(py: Python<'py>, x: &T) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(x).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    json_to_py(py, &v)
}

/// An undirected simple graph with string vertex labels.
#[pyclass(module = "zvsearch", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct Graph {
    inner: zvsearch_core::Graph,
}

#[pymethods]
impl Graph {
    #[new]
    #[pyo3(signature = (edges, vertices = Vec::new()))]
    fn new(edges: Vec<(String, String)>, vertices: Vec<String>) -> PyResult<Self> {
        let inner = zvsearch_core::Graph::new(&vertices, edges.iter().map(|(a, b)| (a.as_str(), b.as_str()))).map_err(err)?;
        Ok(Graph { inner })
    }

    /// Builds a graph from a generator spec such as `grid:3,4`.
    #[staticmethod]
    fn from_spec(spec: &str) -> PyResult<Self> {
        Ok(Graph { inner: generate::from_spec(spec).map_err(err)? })
    }

    /// Parses the edge-list text format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(Graph { inner: io::parse_edge_list(text).map_err(err)?.graph })
    }

    fn to_edge_list(&self) -> String {
        io::format_edge_list(&self.inner, None)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    fn vertices(&self) -> Vec<String> {
        self.inner.labels().to_vec()
    }

    fn edges(&self) -> Vec<(String, String)> {
        self.inner.label_edges()
    }

    fn __len__(&self) -> usize {
        self.inner.n()
    }

    fn __repr__(&self) -> String {
        format!("Graph(n={}, m={})", self.inner.n(), self.inner.m())
    }
}

impl Graph {
    fn set(&self, labels: &[String]) -> PyResult<zvsearch_core::VertexSet> {
        self.inner.set_from_labels(labels).map_err(err)
    }

    fn search(&self, steps: &[Vec<String>]) -> PyResult<Search> {
        let sets = steps.iter().map(|s| self.set(s)).collect::<PyResult<Vec<_>>>()?;
        Search::tight(&self.inner, sets).map_err(err)
    }

    fn labels_of(&self, s: &Search) -> Vec<Vec<String>> {
        s.steps.iter().map(|x| self.inner.set_labels(x)).collect()
    }
}

/// A subdivision with an aligned 3-search.
#[pyclass(module = "zvsearch", frozen)]
pub struct Bundle {
    inner: AlignedSearchBundle,
}

#[pymethods]
impl Bundle {
    #[getter]
    fn host(&self) -> Graph {
        Graph { inner: self.inner.host.derived.clone() }
    }

    #[getter]
    fn alignment(&self) -> (String, String) {
        self.inner.alignment.clone()
    }

    fn steps(&self) -> Vec<Vec<String>> {
        self.inner.step_labels()
    }

    fn stats<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.stats)
    }

    /// Replays the search; raises if it is not successful and aligned.
    fn check(&self) -> PyResult<()> {
        self.inner.check().map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = serde_json::from_str(text).map_err(|e| InputError::new_err(e.to_string()))?;
        Ok(Bundle { inner })
    }

    fn __len__(&self) -> usize {
        self.inner.search.len()
    }
}

fn config(budget: Option<&str>, workers: usize) -> PyResult<Config> {
    let mut b = Budget::from_env().map_err(err)?;
    if let Some(spec) = budget {
        b = b.with_overrides(spec).map_err(err)?;
    }
    if workers == 0 {
        return Err(InputError::new_err("workers must be positive"));
    }
    Ok(Config { budget: b, workers, ..Config::default() })
}

/// Replays `steps` from `initial`; returns the trace and its predicates.
#[pyfunction]
#[pyo3(signature = (g, steps, initial = Vec::new(), align = None))]
fn simulate<'py>(
    py: Python<'py>,
    g: &Graph,
    steps: Vec<Vec<String>>,
    initial: Vec<String>,
    align: Option<(String, String)>,
) -> PyResult<Bound<'py, PyDict>> {
    let s = g.search(&steps)?;
    let tr = game::simulate(&g.inner, &s, &g.set(&initial)?).map_err(err)?;
    let rows = |sets: &[zvsearch_core::VertexSet]| sets.iter().map(|x| g.inner.set_labels(x)).collect::<Vec<_>>();
    let d = PyDict::new(py);
    d.set_item("pc", rows(&tr.pc))?;
    d.set_item("fc", rows(&tr.fc))?;
    d.set_item("successful", game::is_successful(&g.inner, &tr))?;
    d.set_item("monotonic", game::is_monotonic(&tr))?;
    if let Some((a, b)) = align {
        let (a, b) = (g.inner.require(&a).map_err(err)?, g.inner.require(&b).map_err(err)?);
        d.set_item("aligned", game::is_aligned(&tr, a, b))?;
    }
    Ok(d)
}

/// Exact inspection number as `(value, witness)`; `value` is None above `k_max`.
#[pyfunction]
#[pyo3(signature = (g, k_max = 8, budget = None, workers = 1))]
fn inspection_number(
    g: &Graph,
    k_max: usize,
    budget: Option<&str>,
    workers: usize,
) -> PyResult<(Option<usize>, Option<Vec<Vec<String>>>)> {
    let r = solver::inspection_number(&g.inner, k_max, &config(budget, workers)?).map_err(err)?;
    Ok((r.value, r.witness.as_ref().map(|s| g.labels_of(s))))
}

/// Whether a successful `k`-search exists; returns one or None.
#[pyfunction]
#[pyo3(signature = (g, k, budget = None, workers = 1))]
fn successful_search(g: &Graph, k: usize, budget: Option<&str>, workers: usize) -> PyResult<Option<Vec<Vec<String>>>> {
    let s = solver::exists_successful_search(&g.inner, k, &config(budget, workers)?).map_err(err)?;
    Ok(s.as_ref().map(|s| g.labels_of(s)))
}

/// Exact pathwidth as `(width, bags)`.
#[pyfunction]
#[pyo3(signature = (g, budget = None))]
fn pathwidth(g: &Graph, budget: Option<&str>) -> PyResult<(usize, Vec<Vec<String>>)> {
    let (pw, dec) = solver::pathwidth(&g.inner, &config(budget, 1)?.budget).map_err(err)?;
    let bags = dec.bags.iter().map(|b| b.iter().map(|&v| g.inner.label(v).to_string()).collect()).collect();
    Ok((pw, bags))
}

#[pyfunction]
#[pyo3(signature = (g, budget = None))]
fn monotonic_inspection_number(g: &Graph, budget: Option<&str>) -> PyResult<(Option<usize>, Option<Vec<Vec<String>>>)> {
    let r = solver::monotonic_inspection_number(&g.inner, &config(budget, 1)?.budget).map_err(err)?;
    Ok((r.value, r.witness.as_ref().map(|s| g.labels_of(s))))
}

/// Certificate that the inspection number exceeds `k`, or None.
#[pyfunction]
#[pyo3(signature = (g, k, budget = None))]
fn boundary_gap_certificate<'py>(py: Python<'py>, g: &Graph, k: usize, budget: Option<&str>) -> PyResult<Bound<'py, PyAny>> {
    let c = solver::boundary_gap_certificate(&g.inner, k, &config(budget, 1)?.budget).map_err(err)?;
    to_py(py, &c)
}

/// `{"verdict": "YES", "decomposition": ...}` or `{"verdict": "NO", "family": ..., "witness": ...}`.
#[pyfunction]
fn classify<'py>(py: Python<'py>, g: &Graph) -> PyResult<Bound<'py, PyAny>> {
    let d = PyDict::new(py);
    match gsp_core::classify_topological_3(&g.inner).map_err(err)? {
        Verdict::Yes { decomposition } => {
            d.set_item("verdict", "YES")?;
            d.set_item("complexity", decomposition.complexity())?;
            d.set_item("decomposition", to_py(py, &decomposition)?)?;
        }
        Verdict::No { witness } => {
            d.set_item("verdict", "NO")?;
            d.set_item("family", witness.family.to_string())?;
            d.set_item("witness", to_py(py, &witness)?)?;
        }
    }
    Ok(d.into_any())
}

/// Synthesizes a bundle; None when the graph contains a forbidden pattern.
/// `floors` maps `(u, v)` to a minimum subdivision count.
#[pyfunction]
#[pyo3(signature = (g, floors = None))]
fn synthesize(g: &Graph, floors: Option<Vec<((String, String), usize)>>) -> PyResult<Option<Bundle>> {
    let floors: SubdivisionFloor = floors.unwrap_or_default().into_iter().map(|((u, v), c)| (edge_key(&u, &v), c)).collect();
    Ok(synth::synthesize_graph(&g.inner, &floors).map_err(err)?.map(|inner| Bundle { inner }))
}

#[pymodule]
#[pyo3(name = "zvsearch")]
pub fn zvsearch_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add_class::<Graph>()?;
    m.add_class::<Bundle>()?;
    m.add("InputError", py.get_type::<InputError>())?;
    m.add("ResourceError", py.get_type::<ResourceError>())?;
    m.add("UnresolvedError", py.get_type::<UnresolvedError>())?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(inspection_number, m)?)?;
    m.add_function(wrap_pyfunction!(successful_search, m)?)?;
    m.add_function(wrap_pyfunction!(pathwidth, m)?)?;
    m.add_function(wrap_pyfunction!(monotonic_inspection_number, m)?)?;
    m.add_function(wrap_pyfunction!(boundary_gap_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(synthesize, m)?)?;
    Ok(())
}
