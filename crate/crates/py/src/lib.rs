//! Python bindings. Colors are Python complex numbers (or floats), errors surface as
//! `ValueError("CODE: message")`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use quantum6j::graphinv::{self, Cut, Model, MorseDiagram};
use quantum6j::sixj::{self as sj, AdmissibleSixJ, SixJLabels};
use quantum6j::verify::{self, Suite};
use quantum6j::volume::{self as vol, DihedralAngles};
use quantum6j::QError;

fn err(e: QError) -> PyErr {
    PyValueError::new_err(format!("{}: {e}", e.code()))
}

fn labels(l: [Complex64; 6]) -> SixJLabels {
    SixJLabels::new(l[0], l[1], l[2], l[3], l[4], l[5])
}

/// Arithmetic at `xi = exp(i pi / n)`.
#[pyclass(name = "RootContext", frozen)]
struct PyRootContext(quantum6j::RootContext);

#[pymethods]
impl PyRootContext {
    #[new]
    fn new(n: u32) -> PyResult<Self> {
        quantum6j::RootContext::new(n).map(PyRootContext).map_err(err)
    }

    #[getter]
    fn n(&self) -> u32 {
        self.0.n()
    }

    fn xi(&self) -> Complex64 {
        self.0.xi()
    }

    /// `{a} = xi^a - xi^-a`
    fn qbrace(&self, a: Complex64) -> Complex64 {
        self.0.qbrace(a)
    }

    /// `[a] = {a} / {1}`
    fn qint(&self, a: Complex64) -> Complex64 {
        self.0.qint(a)
    }

    fn qbinom(&self, a: Complex64, b: Complex64) -> PyResult<Complex64> {
        self.0.qbinom(a, b).map_err(err)
    }

    /// `qbinom(2a+n, 2a+1)`, the theta graph value
    fn theta(&self, a: Complex64) -> Complex64 {
        self.0.theta(a)
    }

    fn __repr__(&self) -> String {
        format!("RootContext(n={})", self.0.n())
    }
}

fn ctx(n: u32) -> PyResult<quantum6j::RootContext> {
    quantum6j::RootContext::new(n).map_err(err)
}

/// `{a b e; d c f}` for six complex colors.
#[pyfunction]
fn sixj(n: u32, l: [Complex64; 6]) -> PyResult<Complex64> {
    sj::sixj(&ctx(n)?, &labels(l)).map_err(err)
}

#[pyfunction]
fn tet(n: u32, l: [Complex64; 6]) -> PyResult<Complex64> {
    sj::tet(&ctx(n)?, &labels(l)).map_err(err)
}

/// Positive-summand form for integer labels, returned as `(log|tet|, phase)`.
#[pyfunction]
fn tet_admissible(n: u32, l: [i64; 6]) -> PyResult<(f64, f64)> {
    let a = AdmissibleSixJ::new(l[0], l[1], l[2], l[3], l[4], l[5]);
    a.validate(n).map_err(err)?;
    let t = sj::tet_admissible(&ctx(n)?, &a, true).map_err(err)?;
    Ok((t.log_magnitude, t.phase))
}

#[pyfunction]
fn cgc(n: u32, a: Complex64, b: Complex64, c: Complex64, u: u32, v: u32, t: u32) -> PyResult<Complex64> {
    quantum6j::cgc::cgqc(&ctx(n)?, quantum6j::cgc::CgcIndex { a, b, c, u, v, t }).map_err(err)
}

#[pyfunction]
fn ideal_volume(alpha: f64, beta: f64, gamma: f64) -> PyResult<f64> {
    vol::ideal_volume(alpha, beta, gamma).map_err(err)
}

/// Volume for six dihedral angles `a, b, c, d, e, f`.
#[pyfunction]
fn truncated_volume(angles: [f64; 6]) -> PyResult<f64> {
    vol::truncated_volume(&DihedralAngles::new(angles)).map_err(err)
}

/// `(pi/2n) log(tet(L) tet(bar L))` for the labels approximating the angles at this `n`.
#[pyfunction]
fn asymptotic_ratio(n: u32, angles: [f64; 6]) -> PyResult<f64> {
    let ang = DihedralAngles::new(angles);
    vol::asymptotic_ratio(&ctx(n)?, &ang.labels(n)).map(|r| r.ratio).map_err(err)
}

fn diagram(spec: &str, colors: Option<BTreeMap<String, Complex64>>) -> PyResult<MorseDiagram> {
    let d = if spec.trim_start().starts_with('{') { MorseDiagram::from_json(spec) } else { MorseDiagram::bundled(spec) }.map_err(err)?;
    Ok(match colors {
        Some(c) => {
            let mut all = d.colors.clone();
            all.extend(c);
            d.with_colors(all)
        }
        None => d,
    })
}

/// Invariant of a bundled diagram (by name) or a diagram given as JSON text.
#[pyfunction]
#[pyo3(signature = (spec, n, face_model=false, cut_edge=None, colors=None))]
fn invariant(spec: &str, n: u32, face_model: bool, cut_edge: Option<String>, colors: Option<BTreeMap<String, Complex64>>) -> PyResult<Complex64> {
    let d = diagram(spec, colors)?;
    let cut = cut_edge.map(Cut::Edge).unwrap_or(Cut::At { level: 1, pos: 0 });
    let model = if face_model { Model::Face } else { Model::Tangle };
    graphinv::evaluate(&ctx(n)?, &d, &cut, model).map_err(err)
}

#[pyfunction]
fn kashaev_limit(spec: &str, n: u32) -> PyResult<Complex64> {
    let d = diagram(spec, None)?;
    graphinv::kashaev_limit(&ctx(n)?, &d, &Cut::At { level: 1, pos: 0 }).map(|k| k.value).map_err(err)
}

/// Run a verification suite; returns the report as a JSON string.
#[pyfunction]
#[pyo3(signature = (suite="all", ns=vec![2, 3, 4, 5], seed=1, seeds=5, tolerance=1e-8))]
fn run_verify(suite: &str, ns: Vec<u32>, seed: u64, seeds: u64, tolerance: f64) -> PyResult<String> {
    let s: Suite = suite.parse().map_err(err)?;
    let r = verify::run(s, &ns, seed, seeds, tolerance).map_err(err)?;
    serde_json::to_string(&r).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pymodule]
fn quantum6j_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRootContext>()?;
    m.add_function(wrap_pyfunction!(sixj, m)?)?;
    m.add_function(wrap_pyfunction!(tet, m)?)?;
    m.add_function(wrap_pyfunction!(tet_admissible, m)?)?;
    m.add_function(wrap_pyfunction!(cgc, m)?)?;
    m.add_function(wrap_pyfunction!(ideal_volume, m)?)?;
    m.add_function(wrap_pyfunction!(truncated_volume, m)?)?;
    m.add_function(wrap_pyfunction!(asymptotic_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(invariant, m)?)?;
    m.add_function(wrap_pyfunction!(kashaev_limit, m)?)?;
    m.add_function(wrap_pyfunction!(run_verify, m)?)?;
    Ok(())
}
