//! Python bindings: instances, the incremental engines, the three reductions
//! and their oracles. Run results come back as plain dicts.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use pyo3::IntoPyObjectExt;
use serde_json::Value;

use dynred_core::amortization::fit_exponent as core_fit_exponent;
use dynred_core::dyngraph::{DynGraph, GraphKind, OpCounters};
use dynred_core::flow::FlowEngine;
use dynred_core::instances::{self, CnfFormula, OuMvInstance, TcStarInstance};
use dynred_core::matching::MatchingEngine;
use dynred_core::oracles::{self, Side};
use dynred_core::reduction::{diameter, flow, matching};
use dynred_core::Error;

create_exception!(dynred, GuardError, PyValueError);

fn err(e: Error) -> PyErr {
    match e {
        Error::Guard(msg) => GuardError::new_err(msg),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_bound_py_any(py)?,
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => i.into_bound_py_any(py)?,
            (_, Some(u)) => u.into_bound_py_any(py)?,
            _ => n.as_f64().unwrap_or(f64::NAN).into_bound_py_any(py)?,
        },
        Value::String(s) => s.into_bound_py_any(py)?,
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, to_py(py, item)?)?;
            }
            dict.into_any()
        }
    })
}

fn serialize<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    to_py(py, &v)
}

fn counters(py: Python<'_>, c: OpCounters) -> PyResult<Bound<'_, PyAny>> {
    serialize(py, &c)
}

#[pyclass(name = "OuMvInstance", module = "dynred")]
struct PyOuMv {
    inner: OuMvInstance,
}

#[pymethods]
impl PyOuMv {
    #[staticmethod]
    #[pyo3(signature = (n, density = 0.5, seed = 0))]
    fn generate(n: usize, density: f64, seed: u64) -> PyResult<Self> {
        Ok(Self { inner: instances::gen_oumv(n, density, seed).map_err(err)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self { inner: OuMvInstance::from_json(text).map_err(err)? })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn __repr__(&self) -> String {
        format!("OuMvInstance(n={})", self.inner.n())
    }
}

#[pyclass(name = "CnfFormula", module = "dynred")]
struct PyCnf {
    inner: CnfFormula,
}

#[pymethods]
impl PyCnf {
    #[staticmethod]
    #[pyo3(signature = (num_vars, num_clauses, width = 3, seed = 0))]
    fn generate(num_vars: usize, num_clauses: usize, width: usize, seed: u64) -> PyResult<Self> {
        Ok(Self { inner: instances::gen_cnf(num_vars, num_clauses, width, seed).map_err(err)? })
    }

    /// DIMACS text or the JSON wrapper.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(Self { inner: CnfFormula::parse(text).map_err(err)? })
    }

    fn to_dimacs(&self) -> String {
        self.inner.to_dimacs()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn num_vars(&self) -> usize {
        self.inner.num_vars()
    }

    #[getter]
    fn num_clauses(&self) -> usize {
        self.inner.clauses().len()
    }

    fn __repr__(&self) -> String {
        format!("CnfFormula(num_vars={}, clauses={})", self.inner.num_vars(), self.inner.clauses().len())
    }
}

#[pyclass(name = "TcStarInstance", module = "dynred")]
struct PyTcStar {
    inner: TcStarInstance,
}

#[pymethods]
impl PyTcStar {
    #[staticmethod]
    #[pyo3(signature = (n, delta = 2, p = 2, bc_density = 0.5, seed = 0))]
    fn generate(n: usize, delta: usize, p: usize, bc_density: f64, seed: u64) -> PyResult<Self> {
        Ok(Self { inner: instances::gen_tcstar(n, delta, p, bc_density, seed).map_err(err)? })
    }

    /// Dense instance whose color triple `target` has no triangle.
    #[staticmethod]
    #[pyo3(signature = (n, delta, p, target, seed = 0))]
    fn plant(n: usize, delta: usize, p: usize, target: (usize, usize, usize), seed: u64) -> PyResult<Self> {
        Ok(Self { inner: instances::plant_tcstar(n, delta, p, seed, target).map_err(err)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self { inner: TcStarInstance::from_json(text).map_err(err)? })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn is_valid(&self) -> bool {
        instances::validate_tcstar(&self.inner).is_ok()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    fn __repr__(&self) -> String {
        format!("TcStarInstance(n={}, delta={}, p={})", self.inner.n, self.inner.delta, self.inner.p)
    }
}

#[pyclass(name = "DynGraph", module = "dynred")]
struct PyDynGraph {
    inner: DynGraph,
}

#[pymethods]
impl PyDynGraph {
    /// Undirected by default; `flow=True` gives a directed capacitated graph.
    #[new]
    #[pyo3(signature = (flow = false))]
    fn new(flow: bool) -> Self {
        Self { inner: DynGraph::new(if flow { GraphKind::FLOW_NETWORK } else { GraphKind::UNDIRECTED }) }
    }

    fn insert_node(&mut self) -> usize {
        self.inner.insert_node()
    }

    #[pyo3(signature = (u, v, cap = None))]
    fn insert_edge(&mut self, u: usize, v: usize, cap: Option<i64>) -> PyResult<usize> {
        self.inner.insert_edge(u, v, cap).map_err(err)
    }

    fn rollback(&mut self, k: usize) -> PyResult<()> {
        self.inner.rollback(k).map_err(err)
    }

    #[getter]
    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn edges(&self) -> Vec<(usize, usize, Option<i64>)> {
        self.inner.edges().iter().map(|e| (e.u, e.v, e.cap)).collect()
    }

    fn counters<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        counters(py, self.inner.op_count())
    }

    fn to_log_text(&self) -> String {
        self.inner.to_log_text()
    }

    #[staticmethod]
    #[pyo3(signature = (text, flow = false))]
    fn from_log_text(text: &str, flow: bool) -> PyResult<Self> {
        let kind = if flow { GraphKind::FLOW_NETWORK } else { GraphKind::UNDIRECTED };
        Ok(Self { inner: DynGraph::from_log_text(kind, text).map_err(err)? })
    }

    /// Exact diameter, `None` when disconnected.
    fn diameter(&self) -> Option<u32> {
        dynred_core::diameter::exact_diameter(&self.inner).value
    }
}

#[pyclass(name = "MatchingEngine", module = "dynred")]
struct PyMatching {
    inner: MatchingEngine,
}

#[pymethods]
impl PyMatching {
    #[new]
    fn new() -> Self {
        Self { inner: MatchingEngine::new() }
    }

    fn add_node(&mut self, left: bool) -> usize {
        self.inner.add_node(if left { Side::Left } else { Side::Right })
    }

    /// Insert an edge between opposite sides; returns the new matching size.
    fn insert_edge(&mut self, u: usize, v: usize) -> PyResult<usize> {
        self.inner.insert_edge(u, v).map_err(err)
    }

    fn size(&mut self) -> usize {
        self.inner.size()
    }

    fn mate(&self, u: usize) -> PyResult<Option<usize>> {
        if u >= self.inner.graph().node_count() {
            return Err(err(Error::UnknownNode(u)));
        }
        Ok(self.inner.mate(u))
    }

    fn oracle_size(&self) -> PyResult<usize> {
        oracles::max_matching_oracle(&self.inner.to_bipartite()).map_err(err)
    }

    fn counters<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        counters(py, self.inner.graph().op_count())
    }
}

#[pyclass(name = "FlowEngine", module = "dynred")]
struct PyFlow {
    inner: FlowEngine,
}

#[pymethods]
impl PyFlow {
    /// Starts with the source (node 0) and the sink (node 1).
    #[new]
    fn new() -> Self {
        Self { inner: FlowEngine::new() }
    }

    #[getter]
    fn source(&self) -> usize {
        self.inner.source()
    }

    #[getter]
    fn sink(&self) -> usize {
        self.inner.sink()
    }

    fn add_node(&mut self) -> usize {
        self.inner.add_node()
    }

    fn insert_edge(&mut self, u: usize, v: usize, cap: i64) -> PyResult<usize> {
        self.inner.insert_edge(u, v, cap).map_err(err)
    }

    fn value(&mut self) -> i64 {
        self.inner.value()
    }

    fn oracle_value(&self) -> PyResult<i64> {
        oracles::max_flow_oracle(&self.inner.to_network()).map_err(err)
    }

    fn counters<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        counters(py, self.inner.graph().op_count())
    }
}

#[pyfunction]
fn oumv_oracle(inst: PyRef<'_, PyOuMv>) -> Vec<bool> {
    oracles::oumv_oracle(&inst.inner)
}

#[pyfunction]
fn sat_oracle(formula: PyRef<'_, PyCnf>) -> PyResult<bool> {
    oracles::sat_oracle(&formula.inner).map_err(err)
}

/// Triangle-free color triples; empty means the answer is NO.
#[pyfunction]
fn tcstar_oracle(inst: PyRef<'_, PyTcStar>) -> PyResult<Vec<(usize, usize, usize)>> {
    Ok(oracles::tcstar_oracle(&inst.inner).map_err(err)?.witnesses)
}

#[pyfunction]
#[pyo3(signature = (inst, decremental = false))]
fn solve_oumv_via_matching<'py>(
    py: Python<'py>,
    inst: PyRef<'_, PyOuMv>,
    decremental: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let run = if decremental {
        matching::solve_oumv_decremental(&inst.inner)
    } else {
        matching::solve_oumv_via_matching(&inst.inner)
    };
    serialize(py, &run.map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (formula, early_exit = false, decremental = false))]
fn solve_sat_via_flow<'py>(
    py: Python<'py>,
    formula: PyRef<'_, PyCnf>,
    early_exit: bool,
    decremental: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let run = if decremental {
        flow::solve_sat_decremental(&formula.inner)
    } else {
        flow::solve_sat_via_flow(&formula.inner, early_exit)
    };
    serialize(py, &run.map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (inst, gamma = 1.0))]
fn solve_tcstar_static<'py>(py: Python<'py>, inst: PyRef<'_, PyTcStar>, gamma: f64) -> PyResult<Bound<'py, PyAny>> {
    serialize(py, &diameter::solve_tcstar_static(&inst.inner, gamma).map_err(err)?)
}

#[pyfunction]
fn solve_tcstar_incremental<'py>(py: Python<'py>, inst: PyRef<'_, PyTcStar>) -> PyResult<Bound<'py, PyAny>> {
    serialize(py, &diameter::solve_tcstar_incremental(&inst.inner).map_err(err)?)
}

/// `cost` is "unit" or "bfs-refresh".
#[pyfunction]
#[pyo3(signature = (inst, alpha = None, cost = "unit"))]
fn solve_tcstar_node_addition<'py>(
    py: Python<'py>,
    inst: PyRef<'_, PyTcStar>,
    alpha: Option<f64>,
    cost: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let alpha = alpha.unwrap_or_else(diameter::solve_alpha);
    let run = match cost {
        "unit" => diameter::solve_tcstar_node_addition_with(&inst.inner, alpha, &mut diameter::UnitCost),
        "bfs-refresh" => diameter::solve_tcstar_node_addition_with(&inst.inner, alpha, &mut diameter::BfsRefreshCost),
        other => return Err(PyValueError::new_err(format!("unknown cost model `{other}`"))),
    };
    serialize(py, &run.map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (inst, s))]
fn solve_tcstar_subdivided<'py>(py: Python<'py>, inst: PyRef<'_, PyTcStar>, s: usize) -> PyResult<Bound<'py, PyAny>> {
    serialize(py, &diameter::solve_tcstar_subdivided(&inst.inner, s).map_err(err)?)
}

/// The graph `H_{gamma,k}` for one block of colors.
#[pyfunction]
#[pyo3(signature = (inst, gamma = 1.0, k = 0))]
fn build_h(inst: PyRef<'_, PyTcStar>, gamma: f64, k: usize) -> PyResult<PyDynGraph> {
    Ok(PyDynGraph { inner: diameter::build_h(&inst.inner, gamma, k).map_err(err)?.into_graph() })
}

#[pyfunction]
fn solve_alpha() -> f64 {
    diameter::solve_alpha()
}

/// Least-squares log-log slope over `(size, count)` samples.
#[pyfunction]
fn fit_exponent(samples: Vec<(u64, u64)>) -> PyResult<f64> {
    Ok(core_fit_exponent(&samples).map_err(err)?.exponent)
}

#[pymodule]
fn dynred(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("GuardError", m.py().get_type::<GuardError>())?;
    m.add_class::<PyOuMv>()?;
    m.add_class::<PyCnf>()?;
    m.add_class::<PyTcStar>()?;
    m.add_class::<PyDynGraph>()?;
    m.add_class::<PyMatching>()?;
    m.add_class::<PyFlow>()?;
    m.add_function(wrap_pyfunction!(oumv_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(sat_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(tcstar_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(solve_oumv_via_matching, m)?)?;
    m.add_function(wrap_pyfunction!(solve_sat_via_flow, m)?)?;
    m.add_function(wrap_pyfunction!(solve_tcstar_static, m)?)?;
    m.add_function(wrap_pyfunction!(solve_tcstar_incremental, m)?)?;
    m.add_function(wrap_pyfunction!(solve_tcstar_node_addition, m)?)?;
    m.add_function(wrap_pyfunction!(solve_tcstar_subdivided, m)?)?;
    m.add_function(wrap_pyfunction!(build_h, m)?)?;
    m.add_function(wrap_pyfunction!(solve_alpha, m)?)?;
    m.add_function(wrap_pyfunction!(fit_exponent, m)?)?;
    Ok(())
}
