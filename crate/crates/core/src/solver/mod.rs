//! Collocation solve of the complex boundary integral equation
//! `∮ (W(ζ) - W(z)) / (ζ - z) dζ = 0` for the conjugate `V` of given Dirichlet data `U`.
//!
//! Row `k` enforces the discretised equation at the collocation point `ζ_{k-1/2}`:
//! `Σ_j (W_j - W_{k-1/2}) A[k, j] = 0`, with `V_{k-1/2}` interpolated from node values.

mod tables;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use log::warn;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::contour::{discretize, Contour, Discretization};
use crate::error::{invalid, Error, Result};
use crate::mesh::contour_rule;

pub use tables::{index_table, InterpolationTables};

/// Reduced matrices with a larger 2-norm condition estimate trigger a warning.
pub const CONDITION_WARNING: f64 = 1e12;

/// Dirichlet data on the boundary.
pub trait BoundaryData: Sync {
    /// `U(z)`.
    fn u(&self, z: Complex64) -> f64;

    /// The analytic `W = U + iV` when known, for error measurement.
    fn exact(&self, _z: Complex64) -> Option<Complex64> {
        None
    }
}

/// `W(z) = z^α` on the principal branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLaw {
    pub alpha: f64,
}

pub fn principal_power(z: Complex64, alpha: f64) -> Complex64 {
    if z == Complex64::new(0.0, 0.0) {
        return if alpha == 0.0 { Complex64::new(1.0, 0.0) } else { z };
    }
    let (r, theta) = z.to_polar();
    Complex64::from_polar(r.powf(alpha), alpha * theta)
}

impl BoundaryData for PowerLaw {
    fn u(&self, z: Complex64) -> f64 {
        principal_power(z, self.alpha).re
    }

    fn exact(&self, z: Complex64) -> Option<Complex64> {
        Some(principal_power(z, self.alpha))
    }
}

/// `U ≡ c`; the conjugate is constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constant(pub f64);

impl BoundaryData for Constant {
    fn u(&self, _z: Complex64) -> f64 {
        self.0
    }

    fn exact(&self, _z: Complex64) -> Option<Complex64> {
        Some(Complex64::new(self.0, 0.0))
    }
}

/// Data given by an analytic function `W`; `U = Re W`.
pub struct Analytic<F>(pub F);

impl<F: Fn(Complex64) -> Complex64 + Sync> BoundaryData for Analytic<F> {
    fn u(&self, z: Complex64) -> f64 {
        (self.0)(z).re
    }

    fn exact(&self, z: Complex64) -> Option<Complex64> {
        Some((self.0)(z))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NormKind {
    /// `sqrt(Σ |w_j| e_j²)` with the tangent-absorbed weights.
    Weighted2,
    /// `sqrt(Σ e_j²)`; the norm used for the reference error tables.
    #[default]
    Unweighted2,
    Inf,
}

impl FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "weighted2" | "weighted" => Ok(NormKind::Weighted2),
            "unweighted2" | "unweighted" => Ok(NormKind::Unweighted2),
            "inf" | "max" => Ok(NormKind::Inf),
            other => invalid(format!("unknown norm '{other}'")),
        }
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormKind::Weighted2 => "weighted2",
            NormKind::Unweighted2 => "unweighted2",
            NormKind::Inf => "inf",
        })
    }
}

/// Which real part of `C V = i d` is solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RealSplit {
    /// `Re(C) V = -Im(d)`.
    #[default]
    RealPart,
    /// `Im(C) V = Re(d)`.
    ImaginaryPart,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    /// Geometric grading depth `D` per segment end.
    pub depth: usize,
    pub sigma: f64,
    /// Interpolation stencil size `O`.
    pub order: usize,
    pub norm: NormKind,
    pub split: RealSplit,
    /// Value imposed on `V̂_N`. `None` uses the exact conjugate at `ζ_N` when the
    /// data provides one and `0` otherwise.
    pub normalization: Option<f64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            depth: 9,
            sigma: 0.1,
            order: 6,
            norm: NormKind::Unweighted2,
            split: RealSplit::RealPart,
            normalization: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorms {
    pub weighted2: f64,
    pub unweighted2: f64,
    pub inf: f64,
}

impl ErrorNorms {
    pub fn get(&self, kind: NormKind) -> f64 {
        match kind {
            NormKind::Weighted2 => self.weighted2,
            NormKind::Unweighted2 => self.unweighted2,
            NormKind::Inf => self.inf,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BoundarySolution {
    pub disc: Discretization,
    pub u_nodes: Vec<f64>,
    pub v_hat: Vec<f64>,
    pub w_hat: Vec<Complex64>,
    /// 2-norm condition number of the reduced matrix.
    pub condition: f64,
    /// `V - V̂` at the nodes when the exact conjugate is known.
    pub error: Option<Vec<f64>>,
    pub norms: Option<ErrorNorms>,
}

impl BoundarySolution {
    pub fn n(&self) -> usize {
        self.disc.len()
    }

    pub fn error_norm(&self, kind: NormKind) -> Option<f64> {
        self.norms.map(|n| n.get(kind))
    }
}

/// All assembled pieces of one collocation problem.
#[derive(Debug, Clone)]
pub struct CollocationSystem {
    pub a: DMatrix<Complex64>,
    pub h: DVector<Complex64>,
    pub tables: InterpolationTables,
    pub b: DMatrix<Complex64>,
    pub reduced: DMatrix<f64>,
    pub rhs: DVector<f64>,
}

/// `A[k, j] = w_j / (ζ_j - ζ_{k-1/2})` and its row sums `H`.
pub fn assemble_a(disc: &Discretization) -> Result<(DMatrix<Complex64>, DVector<Complex64>)> {
    let n = disc.len();
    if n < 2 {
        return invalid("a collocation system needs at least two nodes");
    }
    let mut a = DMatrix::<Complex64>::zeros(n, n);
    for k in 0..n {
        let zc = disc.zeta_coll[k];
        for j in 0..n {
            let diff = disc.zeta_nodes[j] - zc;
            if diff.norm() == 0.0 {
                return Err(Error::GeometryDegenerate(format!(
                    "collocation point {k} coincides with node {j}"
                )));
            }
            a[(k, j)] = disc.weights[j] / diff;
        }
    }
    let h = DVector::from_iterator(n, a.row_iter().map(|r| r.sum()));
    Ok((a, h))
}

/// `B[k, F(k, i)] = H_k L(k, i)`.
pub fn assemble_b(tables: &InterpolationTables, h: &DVector<Complex64>) -> DMatrix<Complex64> {
    let n = tables.n;
    let mut b = DMatrix::<Complex64>::zeros(n, n);
    for k in 0..n {
        for (&col, &l) in tables.stencil(k).iter().zip(tables.weights(k)) {
            b[(k, col)] += h[k] * l;
        }
    }
    b
}

/// Same matrix as [`assemble_b`], placed by the shift vector instead of the index table.
pub fn assemble_b_shifted(tables: &InterpolationTables, h: &DVector<Complex64>) -> DMatrix<Complex64> {
    let n = tables.n;
    let o = tables.order;
    let mut b = DMatrix::<Complex64>::zeros(n, n);
    for k in 0..n {
        let l = tables.weights(k);
        if tables.shift[k] < 0 {
            for i in 1..o {
                b[(k, i - 1)] = h[k] * l[i];
            }
            b[(k, n - 1)] = h[k] * l[0];
        } else {
            let start = tables.shift[k] as usize;
            for i in 0..o {
                b[(k, start + i)] = h[k] * l[i];
            }
        }
    }
    b
}

/// Linear interpolation form: `H_k / 2` at columns `k-1` and `k`, with `V_0 = V_N`.
pub fn midpoint_b(h: &DVector<Complex64>) -> DMatrix<Complex64> {
    let n = h.len();
    let mut b = DMatrix::<Complex64>::zeros(n, n);
    for k in 0..n {
        let prev = if k == 0 { n - 1 } else { k - 1 };
        b[(k, prev)] = 0.5 * h[k];
        b[(k, k)] = 0.5 * h[k];
    }
    b
}

/// Form `C = B - A` and `d = diag(H) U_coll - A U_nodes`, take one real part of
/// `C V = i d`, difference consecutive rows and drop column `N` (`V_N = 0`).
pub fn assemble_and_reduce(
    a: &DMatrix<Complex64>,
    b: &DMatrix<Complex64>,
    h: &DVector<Complex64>,
    u_nodes: &[f64],
    u_coll: &[f64],
    split: RealSplit,
) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let n = a.nrows();
    if a.ncols() != n || b.shape() != (n, n) || h.len() != n || u_nodes.len() != n || u_coll.len() != n {
        return invalid("inconsistent collocation system shapes");
    }
    let c = b - a;
    // d = diag(H) U_coll - A U_nodes, summed as Σ_j A[k, j] (U_coll[k] - U_nodes[j])
    // so that it does not cancel; constant data gives d = 0 exactly.
    let d: Vec<Complex64> = (0..n)
        .map(|k| (0..n).map(|j| a[(k, j)] * (u_coll[k] - u_nodes[j])).sum())
        .collect();
    let (c_part, d_part): (DMatrix<f64>, Vec<f64>) = match split {
        RealSplit::RealPart => (c.map(|z| z.re), d.iter().map(|z| -z.im).collect()),
        RealSplit::ImaginaryPart => (c.map(|z| z.im), d.iter().map(|z| z.re).collect()),
    };
    let reduced = DMatrix::from_fn(n - 1, n - 1, |r, col| c_part[(r + 1, col)] - c_part[(r, col)]);
    let rhs = DVector::from_fn(n - 1, |r, _| d_part[r + 1] - d_part[r]);
    Ok((reduced, rhs))
}

/// Error norm of `v_true - v_hat`. `weights` are only used by [`NormKind::Weighted2`].
pub fn error_norm(v_true: &[f64], v_hat: &[f64], weights: &[f64], kind: NormKind) -> Result<f64> {
    if v_true.len() != v_hat.len() || (kind == NormKind::Weighted2 && weights.len() != v_true.len()) {
        return invalid("error norm inputs differ in length");
    }
    let e = v_true.iter().zip(v_hat).map(|(a, b)| a - b);
    Ok(match kind {
        NormKind::Weighted2 => e.zip(weights).map(|(e, w)| w.abs() * e * e).sum::<f64>().sqrt(),
        NormKind::Unweighted2 => e.map(|e| e * e).sum::<f64>().sqrt(),
        NormKind::Inf => e.fold(0.0, |m, e| m.max(e.abs())),
    })
}

fn condition_number(m: &DMatrix<f64>) -> f64 {
    let sv = m.singular_values();
    let max = sv.max();
    let min = sv.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Assemble every matrix of the collocation problem for a discretised contour.
pub fn assemble_system(
    disc: &Discretization,
    order: usize,
    u_nodes: &[f64],
    u_coll: &[f64],
    split: RealSplit,
) -> Result<CollocationSystem> {
    let (a, h) = assemble_a(disc)?;
    let tables = InterpolationTables::build(disc, order)?;
    let b = assemble_b(&tables, &h);
    let (reduced, rhs) = assemble_and_reduce(&a, &b, &h, u_nodes, u_coll, split)?;
    Ok(CollocationSystem { a, h, tables, b, reduced, rhs })
}

/// Discretise `contour` with the symmetric h-p grading and solve for the conjugate.
pub fn solve_boundary(
    contour: &Contour,
    options: &SolveOptions,
    data: &dyn BoundaryData,
) -> Result<BoundarySolution> {
    let rule = contour_rule(contour.corner_params(), options.depth, options.sigma)?;
    let disc = discretize(contour, &rule)?;
    solve_discretized(disc, options, data)
}

/// Solve on an existing discretisation; `options.depth` and `options.sigma` are not used.
pub fn solve_discretized(
    disc: Discretization,
    options: &SolveOptions,
    data: &dyn BoundaryData,
) -> Result<BoundarySolution> {
    let n = disc.len();
    let u_nodes: Vec<f64> = disc.zeta_nodes.iter().map(|&z| data.u(z)).collect();
    let u_coll: Vec<f64> = disc.zeta_coll.iter().map(|&z| data.u(z)).collect();
    let system = assemble_system(&disc, options.order, &u_nodes, &u_coll, options.split)?;

    let condition = condition_number(&system.reduced);
    if !condition.is_finite() {
        return Err(Error::NumericalFailure("reduced collocation matrix is singular".into()));
    }
    if condition > CONDITION_WARNING {
        warn!("reduced collocation matrix is ill conditioned (cond ≈ {condition:.1e}, N = {n})");
    }
    let solution = system.reduced.clone().lu().solve(&system.rhs).ok_or_else(|| {
        Error::NumericalFailure(format!("LU solve failed (cond ≈ {condition:.1e})"))
    })?;

    let exact: Option<Vec<Complex64>> = disc.zeta_nodes.iter().map(|&z| data.exact(z)).collect();
    let shift = options
        .normalization
        .or_else(|| exact.as_ref().map(|w| w[n - 1].im))
        .unwrap_or(0.0);
    let mut v_hat: Vec<f64> = solution.iter().copied().collect();
    v_hat.push(0.0);
    for v in &mut v_hat {
        *v += shift;
    }
    if v_hat.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericalFailure("solution contains non-finite values".into()));
    }
    let w_hat: Vec<Complex64> = u_nodes
        .iter()
        .zip(&v_hat)
        .map(|(&u, &v)| Complex64::new(u, v))
        .collect();

    let (error, norms) = match exact {
        Some(w) => {
            let v_true: Vec<f64> = w.iter().map(|z| z.im).collect();
            let abs_w: Vec<f64> = disc.weights.iter().map(|w| w.norm()).collect();
            let norms = ErrorNorms {
                weighted2: error_norm(&v_true, &v_hat, &abs_w, NormKind::Weighted2)?,
                unweighted2: error_norm(&v_true, &v_hat, &abs_w, NormKind::Unweighted2)?,
                inf: error_norm(&v_true, &v_hat, &abs_w, NormKind::Inf)?,
            };
            let e = v_true.iter().zip(&v_hat).map(|(a, b)| a - b).collect();
            (Some(e), Some(norms))
        }
        None => (None, None),
    };

    Ok(BoundarySolution {
        disc,
        u_nodes,
        v_hat,
        w_hat,
        condition,
        error,
        norms,
    })
}

/// `πi`, the limit of every `H_k` on a smooth arc.
pub const HALF_RESIDUE: Complex64 = Complex64::new(0.0, PI);
