//! Python bindings. Structured results come back as plain dicts and lists.

use pyo3::exceptions::{PyArithmeticError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pythonize::{depythonize, pythonize};
use serde::Serialize;

use radial::optimizer::ConstraintSet;
use radial::rearrangement::WeightedSamples;
use radial::{equivalence, inequalities, optimizer, rearrangement, sequences, Error, Knot, DEFAULT_TOL};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::ValueOverflow { .. } => PyArithmeticError::new_err(e.to_string()),
        Error::Postcondition(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    pythonize(py, value).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Nonincreasing radial profile on `(0, t_support]`, piecewise linear in
/// `s = log(t_support / t)`. `knots` holds `(s, v)` pairs; `jumps[i]` marks a knot
/// reached by a step instead of a ramp.
#[pyclass(name = "RadialProfile", module = "tm_radial", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyProfile(radial::RadialProfile);

#[pymethods]
impl PyProfile {
    #[new]
    #[pyo3(signature = (t_support, knots, jumps=None))]
    fn new(t_support: f64, knots: Vec<(f64, f64)>, jumps: Option<Vec<bool>>) -> PyResult<Self> {
        let jumps = jumps.unwrap_or_else(|| vec![false; knots.len()]);
        if jumps.len() != knots.len() {
            return Err(PyValueError::new_err("jumps must match knots in length"));
        }
        let knots = knots
            .into_iter()
            .zip(jumps)
            .map(|((s, v), j)| if j { Knot::jump(s, v) } else { Knot::linear(s, v) })
            .collect();
        radial::RadialProfile::from_knots(t_support, knots).map(Self).map_err(py_err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text).map(Self).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }

    #[getter]
    fn t_support(&self) -> f64 {
        self.0.t_support()
    }

    #[getter]
    fn knots(&self) -> Vec<(f64, f64)> {
        self.0.knots().iter().map(|k| (k.s, k.v)).collect()
    }

    #[getter]
    fn jumps(&self) -> Vec<bool> {
        self.0.knots().iter().map(|k| k.join == radial::Join::Jump).collect()
    }

    fn value_at(&self, t: f64) -> f64 {
        self.0.value_at(t)
    }

    fn dirichlet_norm_sq(&self) -> f64 {
        self.0.dirichlet_norm_sq()
    }

    fn l2_norm_sq(&self) -> f64 {
        self.0.l2_norm_sq()
    }

    #[pyo3(signature = (tau=1.0))]
    fn sobolev_sq(&self, tau: f64) -> f64 {
        self.0.sobolev_sq(tau)
    }

    fn scale_amplitude(&self, a: f64) -> PyResult<Self> {
        self.0.scale_amplitude(a).map(Self).map_err(py_err)
    }

    fn scale_dilate(&self, b: f64) -> PyResult<Self> {
        self.0.scale_dilate(b).map(Self).map_err(py_err)
    }

    fn refined(&self, max_len: f64) -> PyResult<Self> {
        self.0.refined(max_len).map(Self).map_err(py_err)
    }

    /// Dict with `j_beta`, the norms and `quad_error`.
    #[pyo3(signature = (beta, tol=DEFAULT_TOL))]
    fn tm_functional<'py>(&self, py: Python<'py>, beta: f64, tol: f64) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.0.tm_functional(beta, tol).map_err(py_err)?)
    }

    fn __repr__(&self) -> String {
        format!("RadialProfile(t_support={}, knots={})", self.0.t_support(), self.0.knots().len())
    }

    fn __eq__(&self, other: PyRef<'_, Self>) -> bool {
        self.0 == other.0
    }
}

/// `family` is one of moser, counterexample, alvino, cap, zygmund, modified-moser.
#[pyfunction]
#[pyo3(signature = (family, n=None, k=None, delta=None, t=None, r=None))]
fn sequence(family: &str, n: Option<u64>, k: Option<f64>, delta: Option<f64>, t: Option<f64>, r: Option<f64>) -> PyResult<PyProfile> {
    let need = |name: &str, x: Option<f64>| x.ok_or_else(|| PyValueError::new_err(format!("{family} needs {name}")));
    let n = || n.ok_or_else(|| PyValueError::new_err(format!("{family} needs n")));
    let p = match family {
        "moser" => sequences::moser(n()?),
        "counterexample" => sequences::counterexample(n()?),
        "modified-moser" => sequences::modified_moser(n()?),
        "alvino" => sequences::alvino_extremal(need("t", t)?, need("delta", delta)?),
        "cap" => sequences::cap(need("k", k)?, r.unwrap_or(1.0)),
        "zygmund" => sequences::zygmund_optimal(need("k", k)?),
        other => return Err(PyValueError::new_err(format!("unknown family {other:?}"))),
    };
    p.map(PyProfile).map_err(py_err)
}

#[pyfunction]
fn decreasing_rearrangement(values: Vec<f64>, areas: Vec<f64>) -> PyResult<PyProfile> {
    let w = WeightedSamples::new(values, areas).map_err(py_err)?;
    rearrangement::decreasing_rearrangement(&w).map(PyProfile).map_err(py_err)
}

#[pyfunction]
fn maximal_function(p: PyRef<'_, PyProfile>, t: f64) -> PyResult<f64> {
    rearrangement::maximal_function(&p.0, t).map_err(py_err)
}

/// Dict with `lhs`, `rhs`, `slack`, `holds` and `witness`.
#[pyfunction]
#[pyo3(signature = (inequality, p, beta=None, window=None, lam=None, tol=DEFAULT_TOL))]
fn verify<'py>(
    py: Python<'py>,
    inequality: &str,
    p: PyRef<'_, PyProfile>,
    beta: Option<f64>,
    window: Option<f64>,
    lam: Option<f64>,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let need = |name: &str, x: Option<f64>| x.ok_or_else(|| PyValueError::new_err(format!("{inequality} needs {name}")));
    let rep = match inequality {
        "alvino" => inequalities::alvino_ratio_sup(&p.0, need("window", window)?),
        "limine" => Ok(inequalities::check_limine(&p.0)),
        "adachi" => inequalities::check_adachi(&p.0, need("beta", beta)?, tol),
        "zcharact" => inequalities::check_zcharact(&p.0, need("lam", lam)?, tol),
        other => return Err(PyValueError::new_err(format!("unknown inequality {other:?}"))),
    }
    .map_err(py_err)?;
    to_py(py, &rep)
}

#[pyfunction]
fn zygmund_quasinorm<'py>(py: Python<'py>, p: PyRef<'_, PyProfile>) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &inequalities::zygmund_quasinorm(&p.0))
}

#[pyfunction]
fn ruf_normalize<'py>(py: Python<'py>, p: PyRef<'_, PyProfile>, beta: f64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &equivalence::ruf_normalize(&p.0, beta).map_err(py_err)?)
}

#[pyfunction]
fn adachi_split<'py>(py: Python<'py>, p: PyRef<'_, PyProfile>) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &equivalence::adachi_split(&p.0).map_err(py_err)?)
}

#[pyfunction]
fn tau_rescale(p: PyRef<'_, PyProfile>, tau: f64) -> PyResult<PyProfile> {
    equivalence::tau_rescale(&p.0, tau).map(PyProfile).map_err(py_err)
}

/// `constraint` is a dict such as `{"kind": "reduced", "delta": 0.0, "k": 1.0}`,
/// `{"kind": "ruf", "tau": 1.0}` or `{"kind": "norm_sum"}`.
#[pyfunction]
#[pyo3(signature = (constraint, beta, n_knots=32, budget=100_000, seed=0, tol=1e-9))]
fn maximize<'py>(
    py: Python<'py>,
    constraint: &Bound<'py, PyAny>,
    beta: f64,
    n_knots: usize,
    budget: usize,
    seed: u64,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let c: ConstraintSet = depythonize(constraint).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let res = py.detach(|| optimizer::maximize(&c, beta, n_knots, budget, seed, tol)).map_err(py_err)?;
    to_py(py, &res)
}

#[pyfunction]
#[pyo3(signature = (delta, k, betas, log_ns, tol=DEFAULT_TOL))]
fn blowup_scan<'py>(py: Python<'py>, delta: f64, k: f64, betas: Vec<f64>, log_ns: Vec<f64>, tol: f64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &optimizer::blowup_scan_log(delta, k, &betas, &log_ns, tol).map_err(py_err)?)
}

#[pymodule]
#[pyo3(name = "tm_radial")]
pub fn tm_radial_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyProfile>()?;
    m.add("FOUR_PI", radial::FOUR_PI)?;
    m.add_function(wrap_pyfunction!(sequence, m)?)?;
    m.add_function(wrap_pyfunction!(decreasing_rearrangement, m)?)?;
    m.add_function(wrap_pyfunction!(maximal_function, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(zygmund_quasinorm, m)?)?;
    m.add_function(wrap_pyfunction!(ruf_normalize, m)?)?;
    m.add_function(wrap_pyfunction!(adachi_split, m)?)?;
    m.add_function(wrap_pyfunction!(tau_rescale, m)?)?;
    m.add_function(wrap_pyfunction!(maximize, m)?)?;
    m.add_function(wrap_pyfunction!(blowup_scan, m)?)?;
    Ok(())
}
