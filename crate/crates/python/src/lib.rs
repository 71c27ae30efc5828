//! Python module `cbiem`: quadrature rules, the boundary solver and the convergence studies.

use cbiem_core::contour::{make_contour, ContourKind, Orientation};
use cbiem_core::interior::{evaluate_naive, evaluate_subtracted};
use cbiem_core::mesh::{contour_rule, symmetric_segment_mesh};
use cbiem_core::quadrature::{error_constant as core_error_constant, gauss_lobatto as core_gauss_lobatto, newton_cotes_closed};
use cbiem_core::solver::{self, BoundarySolution as CoreSolution, NormKind, PowerLaw, SolveOptions};
use cbiem_core::study::{self, StudyResult, TableSpec};
use cbiem_core::{Complex64, Contour, Error};
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidArgument(m) => PyValueError::new_err(m),
        other => PyArithmeticError::new_err(other.to_string()),
    }
}

fn build_contour(name: &str, corners: usize, angle: f64, reflect: bool) -> Result<Contour, Error> {
    let kind = match name.parse::<ContourKind>()? {
        ContourKind::ReentrantCorner { .. } => ContourKind::ReentrantCorner { exterior_angle_deg: angle },
        k => k,
    };
    let mut c = make_contour(kind)?;
    if kind == ContourKind::UnitCircle {
        c = c.with_artificial_corners(corners)?;
    }
    Ok(c.with_orientation(if reflect { Orientation::Reflected } else { Orientation::Anticlockwise }))
}

/// Nodes and weights of one basic rule.
#[pyclass(frozen, name = "QuadratureRule")]
struct PyRule {
    #[pyo3(get)]
    nodes: Vec<f64>,
    #[pyo3(get)]
    weights: Vec<f64>,
    #[pyo3(get)]
    degree: usize,
}

#[pymethods]
impl PyRule {
    fn integrate(&self, f: &Bound<'_, PyAny>) -> PyResult<f64> {
        let mut total = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            total += w * f.call1((x,))?.extract::<f64>()?;
        }
        Ok(total)
    }

    fn __len__(&self) -> usize {
        self.nodes.len()
    }
}

#[pyfunction]
#[pyo3(signature = (n, a = 0.0, b = 1.0))]
fn gauss_lobatto(n: usize, a: f64, b: f64) -> PyResult<PyRule> {
    let r = core_gauss_lobatto(n, a, b).map_err(to_py)?;
    let degree = r.degree();
    Ok(PyRule { nodes: r.nodes, weights: r.weights, degree })
}

#[pyfunction]
fn newton_cotes(n: usize) -> PyResult<PyRule> {
    let r = newton_cotes_closed(n).map_err(to_py)?;
    let degree = r.degree();
    Ok(PyRule { nodes: r.nodes, weights: r.weights, degree })
}

#[pyfunction]
fn error_constant(p: i64) -> PyResult<f64> {
    core_error_constant(p).map_err(to_py)
}

/// Mesh points `{0, σ^D, ..., σ, 1-σ, ..., 1-σ^D, 1}`.
#[pyfunction]
fn segment_mesh(depth: usize, sigma: f64) -> PyResult<Vec<f64>> {
    Ok(symmetric_segment_mesh(depth, sigma).map_err(to_py)?.points().to_vec())
}

/// Parameters and weights of the closed composite rule over a contour with `corners` equal segments.
#[pyfunction]
fn contour_nodes(corners: usize, depth: usize, sigma: f64) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let c: Vec<f64> = (0..corners.max(1)).map(|k| k as f64 / corners.max(1) as f64).collect();
    let rule = contour_rule(&c, depth, sigma).map_err(to_py)?;
    Ok((rule.params, rule.weights))
}

/// 1-based stencil index table, one list per row.
#[pyfunction]
fn index_table(n: usize, corners: usize, order: usize) -> PyResult<Vec<Vec<usize>>> {
    let f = solver::index_table(n, corners, order).map_err(to_py)?;
    Ok(f.chunks(order).map(|row| row.iter().map(|i| i + 1).collect()).collect())
}

#[pyclass(frozen, name = "BoundarySolution")]
struct PySolution {
    inner: CoreSolution,
}

#[pymethods]
impl PySolution {
    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn t(&self) -> Vec<f64> {
        self.inner.disc.t_nodes.clone()
    }

    #[getter]
    fn zeta(&self) -> Vec<Complex64> {
        self.inner.disc.zeta_nodes.clone()
    }

    #[getter]
    fn v_hat(&self) -> Vec<f64> {
        self.inner.v_hat.clone()
    }

    #[getter]
    fn w_hat(&self) -> Vec<Complex64> {
        self.inner.w_hat.clone()
    }

    #[getter]
    fn condition(&self) -> f64 {
        self.inner.condition
    }

    #[getter]
    fn v_error(&self) -> Option<Vec<f64>> {
        self.inner.error.clone()
    }

    /// Error norm: "weighted2", "unweighted2" or "inf".
    #[pyo3(signature = (kind = "unweighted2"))]
    fn error(&self, kind: &str) -> PyResult<Option<f64>> {
        let kind: NormKind = kind.parse().map_err(to_py)?;
        Ok(self.inner.error_norm(kind))
    }

    /// `W(z)` inside the contour; `subtracted=False` uses the plain Cauchy sum.
    #[pyo3(signature = (z, subtracted = true))]
    fn interior(&self, z: Complex64, subtracted: bool) -> PyResult<Complex64> {
        let f = if subtracted { evaluate_subtracted } else { evaluate_naive };
        f(&self.inner.w_hat, &self.inner.disc, z).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        let error = match self.inner.error_norm(NormKind::Unweighted2) {
            Some(e) => format!("{e:.4e}"),
            None => "None".to_string(),
        };
        format!("BoundarySolution(n={}, error={error}, condition={:.3e})", self.inner.n(), self.inner.condition)
    }
}

/// Solve the Dirichlet problem with data `Re(z^alpha)`.
#[pyfunction]
#[pyo3(signature = (contour = "teardrop", alpha = 0.5, sigma = 0.1, depth = 9, order = 6, corners = 4, angle = 90.0, reflect = false, normalization = None))]
#[allow(clippy::too_many_arguments)]
fn solve(
    py: Python<'_>,
    contour: &str,
    alpha: f64,
    sigma: f64,
    depth: usize,
    order: usize,
    corners: usize,
    angle: f64,
    reflect: bool,
    normalization: Option<f64>,
) -> PyResult<PySolution> {
    let c = build_contour(contour, corners, angle, reflect).map_err(to_py)?;
    let options = SolveOptions { depth, sigma, order, normalization, ..SolveOptions::default() };
    let inner = py
        .detach(|| solver::solve_boundary(&c, &options, &PowerLaw { alpha }))
        .map_err(to_py)?;
    Ok(PySolution { inner })
}

type Rows = Vec<(Vec<f64>, usize, f64)>;

fn rows(s: StudyResult) -> Rows {
    s.rows.into_iter().map(|r| (r.params, r.n, r.error)).collect()
}

/// Rows `(params, N, error)` of the h study; params are `[gamma, points, D]`.
#[pyfunction]
#[pyo3(signature = (gammas, points = 6, dmax = 19))]
fn h_study(gammas: Vec<f64>, points: usize, dmax: usize) -> PyResult<Rows> {
    Ok(rows(study::run_h_study(&gammas, points, dmax).map_err(to_py)?))
}

#[pyfunction]
#[pyo3(signature = (sigma = 0.15, dmax = 19))]
fn hp_study(sigma: f64, dmax: usize) -> PyResult<Rows> {
    Ok(rows(study::run_hp_study(sigma, dmax).map_err(to_py)?))
}

#[pyfunction]
#[pyo3(signature = (sigma = 0.15, dmin = 8, dmax = 15))]
fn contour_study(sigma: f64, dmin: usize, dmax: usize) -> PyResult<Rows> {
    Ok(rows(study::run_contour_study(sigma, dmin, dmax).map_err(to_py)?))
}

/// CSV text of an error table over `D` and `O`.
#[pyfunction]
#[pyo3(signature = (alpha = 0.5, sigma = 0.1, dmin = 3, dmax = 9, omin = 2, omax = 10, contour = "teardrop", norm = "unweighted2"))]
#[allow(clippy::too_many_arguments)]
fn table(
    py: Python<'_>,
    alpha: f64,
    sigma: f64,
    dmin: usize,
    dmax: usize,
    omin: usize,
    omax: usize,
    contour: &str,
    norm: &str,
) -> PyResult<String> {
    let c = build_contour(contour, 4, 90.0, false).map_err(to_py)?;
    let spec = TableSpec {
        alpha,
        sigma,
        d_min: dmin,
        d_max: dmax,
        o_min: omin,
        o_max: omax,
        norm: norm.parse().map_err(to_py)?,
    };
    let result = py.detach(|| study::run_cbiem_table(&c, &spec)).map_err(to_py)?;
    Ok(result.to_csv())
}

#[pymodule]
fn cbiem(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRule>()?;
    m.add_class::<PySolution>()?;
    m.add_function(wrap_pyfunction!(gauss_lobatto, m)?)?;
    m.add_function(wrap_pyfunction!(newton_cotes, m)?)?;
    m.add_function(wrap_pyfunction!(error_constant, m)?)?;
    m.add_function(wrap_pyfunction!(segment_mesh, m)?)?;
    m.add_function(wrap_pyfunction!(contour_nodes, m)?)?;
    m.add_function(wrap_pyfunction!(index_table, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(h_study, m)?)?;
    m.add_function(wrap_pyfunction!(hp_study, m)?)?;
    m.add_function(wrap_pyfunction!(contour_study, m)?)?;
    m.add_function(wrap_pyfunction!(table, m)?)?;
    Ok(())
}
