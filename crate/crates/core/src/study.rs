//! Convergence studies: composite rules on `[0, 1]`, contour integration on the
//! unit circle, and error tables of the boundary solver.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::contour::{discretize, Contour};
use crate::error::{invalid, Error, Result};
use crate::mesh::{algebraic_mesh, compose_hp_rule, contour_rule, geometric_mesh};
use crate::solver::{solve_boundary, NormKind, PowerLaw, SolveOptions};

/// Errors at or below this are treated as roundoff and excluded from fits.
pub const PLATEAU: f64 = 100.0 * f64::EPSILON;

/// Test integrand with a square-root endpoint singularity and zero integral on `[0, 1]`.
pub fn sqrt_test_integrand(x: f64) -> f64 {
    1.0 - 1.5 * x.sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow {
    pub params: Vec<f64>,
    pub n: usize,
    pub error: f64,
    /// Set on table cells that diverged (non-finite, above 1, or the solve failed)
    /// and on every cell of rows whose best entry is above 1.
    pub diverged: bool,
}

/// Least-squares line `y = slope x + intercept` with its coefficient of determination.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFit {
    pub label: String,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyResult {
    pub name: String,
    pub param_names: Vec<String>,
    pub rows: Vec<StudyRow>,
    pub fits: Vec<LinearFit>,
    pub metadata: Vec<(String, String)>,
}

impl StudyResult {
    fn new(name: &str, params: &[&str]) -> StudyResult {
        StudyResult {
            name: name.to_string(),
            param_names: params.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            fits: Vec::new(),
            metadata: Vec::new(),
        }
    }

    pub fn fit(&self, label: &str) -> Option<&LinearFit> {
        self.fits.iter().find(|f| f.label == label)
    }

    /// Rows whose first parameter equals `value`.
    pub fn series(&self, value: f64) -> Vec<&StudyRow> {
        self.rows.iter().filter(|r| r.params[0] == value).collect()
    }

    /// CSV with a `param_...,N,error` header; table studies add a `diverged` column.
    pub fn to_csv(&self) -> String {
        let flagged = self.name == "table";
        let mut out = String::new();
        for p in &self.param_names {
            let _ = write!(out, "param_{p},");
        }
        out.push_str("N,error");
        if flagged {
            out.push_str(",diverged");
        }
        out.push('\n');
        for row in &self.rows {
            for p in &row.params {
                let _ = write!(out, "{p},");
            }
            let _ = write!(out, "{},{:.6e}", row.n, row.error);
            if flagged {
                let _ = write!(out, ",{}", u8::from(row.diverged));
            }
            out.push('\n');
        }
        out
    }

    /// One line per fit.
    pub fn fit_summary(&self) -> String {
        let mut out = String::new();
        for f in &self.fits {
            let _ = writeln!(
                out,
                "{}: slope {:.4} intercept {:.4} R^2 {:.5} ({} points)",
                f.label, f.slope, f.intercept, f.r_squared, f.points
            );
        }
        out
    }
}

pub fn linear_fit(label: &str, x: &[f64], y: &[f64]) -> Result<LinearFit> {
    let n = x.len();
    if n != y.len() || n < 2 {
        return invalid(format!("a line fit needs at least two points, got {n}"));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if sxx == 0.0 {
        return invalid("a line fit needs distinct abscissae");
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(LinearFit {
        label: label.to_string(),
        slope,
        intercept,
        r_squared,
        points: n,
    })
}

fn pre_plateau(rows: &[&StudyRow]) -> Vec<(usize, f64)> {
    rows.iter()
        .filter(|r| r.error.is_finite() && r.error.abs() > PLATEAU)
        .map(|r| (r.n, r.error.abs()))
        .collect()
}

/// Slope of `log|error|` against `log N` over the last half of the pre-plateau rows.
fn tail_loglog_fit(label: &str, rows: &[&StudyRow]) -> Result<LinearFit> {
    let valid = pre_plateau(rows);
    let tail = &valid[valid.len() / 2..];
    let x: Vec<f64> = tail.iter().map(|(n, _)| (*n as f64).log10()).collect();
    let y: Vec<f64> = tail.iter().map(|(_, e)| e.log10()).collect();
    linear_fit(label, &x, &y)
}

/// `log10|error|` against `√N` over all pre-plateau rows.
fn sqrt_n_fit(label: &str, rows: &[&StudyRow]) -> Result<LinearFit> {
    let valid = pre_plateau(rows);
    let x: Vec<f64> = valid.iter().map(|(n, _)| (*n as f64).sqrt()).collect();
    let y: Vec<f64> = valid.iter().map(|(_, e)| e.log10()).collect();
    linear_fit(label, &x, &y)
}

/// h method: `points`-point rules on algebraic meshes of `2D` intervals, `D = 1..D_max`.
pub fn run_h_study(gammas: &[f64], points: usize, d_max: usize) -> Result<StudyResult> {
    if gammas.is_empty() || d_max < 2 {
        return invalid("h study needs at least one γ and D_max >= 2");
    }
    let mut result = StudyResult::new("h", &["gamma", "points", "D"]);
    for &gamma in gammas {
        for d in 1..=d_max {
            let rule = compose_hp_rule(&algebraic_mesh(2 * d, gamma)?, &[points], false)?;
            result.rows.push(StudyRow {
                params: vec![gamma, points as f64, d as f64],
                n: rule.len(),
                error: rule.integrate(sqrt_test_integrand).abs(),
                diverged: false,
            });
        }
        let series = result.series(gamma);
        let fit = tail_loglog_fit(&format!("gamma={gamma}"), &series)?;
        result.fits.push(fit);
    }
    result.metadata.push(("integrand".into(), "1 - 1.5 sqrt(x)".into()));
    Ok(result)
}

/// h-p method: geometric mesh `{0, σ^D, ..., σ, 1}` with `j + 1` points on interval `j`.
pub fn run_hp_study(sigma: f64, d_max: usize) -> Result<StudyResult> {
    if d_max < 2 {
        return invalid("h-p study needs D_max >= 2");
    }
    let mut result = StudyResult::new("hp", &["sigma", "D"]);
    for d in 1..=d_max {
        let counts: Vec<usize> = (2..=d + 2).collect();
        let rule = compose_hp_rule(&geometric_mesh(d + 1, sigma)?, &counts, false)?;
        result.rows.push(StudyRow {
            params: vec![sigma, d as f64],
            n: rule.len(),
            error: rule.integrate(sqrt_test_integrand).abs(),
            diverged: false,
        });
    }
    let rows: Vec<&StudyRow> = result.rows.iter().collect();
    let fit = sqrt_n_fit("log10(error) vs sqrt(N)", &rows)?;
    result.fits.push(fit);
    result.metadata.push(("integrand".into(), "1 - 1.5 sqrt(x)".into()));
    Ok(result)
}

/// `((z - 1)/i)^{1/2} / z` on the principal branch; its integral around the
/// unit circle is `2πi e^{iπ/4}`.
///
/// The cut touches the circle at `z = 1`. Close to it `cos θ` rounds to 1 and the
/// argument lands on the cut with a signed zero, so it is kept on the upper side
/// where the circle lies.
pub fn contour_test_integrand(z: Complex64) -> Complex64 {
    let w = (z - 1.0) / Complex64::i();
    let w = if w.im <= 0.0 { Complex64::new(w.re, 0.0) } else { w };
    w.sqrt() / z
}

/// `2πi e^{iπ/4}`.
pub fn contour_test_value() -> Complex64 {
    Complex64::new(0.0, 2.0 * PI) * Complex64::from_polar(1.0, PI / 4.0)
}

/// Integrate [`contour_test_integrand`] around the unit circle with two corners.
pub fn run_contour_study(sigma: f64, d_min: usize, d_max: usize) -> Result<StudyResult> {
    if d_min < 1 || d_max < d_min {
        return invalid("contour study needs 1 <= D_min <= D_max");
    }
    let circle = Contour::unit_circle().with_artificial_corners(2)?;
    let mut result = StudyResult::new("contour", &["sigma", "D"]);
    for d in d_min..=d_max {
        let disc = discretize(&circle, &contour_rule(circle.corner_params(), d, sigma)?)?;
        let value = disc.integrate(contour_test_integrand);
        result.rows.push(StudyRow {
            params: vec![sigma, d as f64],
            n: disc.len(),
            error: (1.0 - value / contour_test_value()).norm(),
            diverged: false,
        });
    }
    let rows: Vec<&StudyRow> = result.rows.iter().collect();
    if rows.len() >= 2 {
        let fit = sqrt_n_fit("log10(error) vs sqrt(N)", &rows)?;
        result.fits.push(fit);
    }
    Ok(result)
}

/// Inclusive parameter ranges of a table sweep; `O` steps by 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableSpec {
    pub alpha: f64,
    pub sigma: f64,
    pub d_min: usize,
    pub d_max: usize,
    pub o_min: usize,
    pub o_max: usize,
    pub norm: NormKind,
}

/// Solve `W = z^α` for every `(D, O)` cell; cells run in parallel, rows come back in
/// `(D, O)` order. Cells with `O` too large for the segment are skipped.
pub fn run_cbiem_table(contour: &Contour, spec: &TableSpec) -> Result<StudyResult> {
    if spec.d_min < 1 || spec.d_max < spec.d_min {
        return invalid("table needs 1 <= D_min <= D_max");
    }
    if spec.o_min < 2 || !spec.o_min.is_multiple_of(2) || !spec.o_max.is_multiple_of(2) || spec.o_max < spec.o_min {
        return invalid("table needs even 2 <= O_min <= O_max");
    }
    let nodes_per_segment = |d: usize| (d + 1) * (d + 1);
    let cells: Vec<(usize, usize)> = (spec.d_min..=spec.d_max)
        .flat_map(|d| {
            (spec.o_min..=spec.o_max)
                .step_by(2)
                .filter(move |&o| o <= nodes_per_segment(d))
                .map(move |o| (d, o))
        })
        .collect();
    if cells.is_empty() {
        return invalid("no table cell has an interpolation order the mesh can support");
    }
    let data = PowerLaw { alpha: spec.alpha };
    let solved: Vec<_> = cells
        .par_iter()
        .map(|&(d, o)| {
            let options = SolveOptions {
                depth: d,
                sigma: spec.sigma,
                order: o,
                norm: spec.norm,
                ..SolveOptions::default()
            };
            let outcome = solve_boundary(contour, &options, &data).map(|s| {
                (s.n(), s.error_norm(spec.norm).unwrap_or(f64::NAN))
            });
            (d, o, outcome)
        })
        .collect();

    let mut result = StudyResult::new("table", &["alpha", "sigma", "D", "O"]);
    for (d, o, outcome) in solved {
        let (n, error) = match outcome {
            Ok(v) => v,
            Err(Error::NumericalFailure(_)) => (contour.corner_count() * nodes_per_segment(d), f64::INFINITY),
            Err(e) => return Err(e),
        };
        result.rows.push(StudyRow {
            params: vec![spec.alpha, spec.sigma, d as f64, o as f64],
            n,
            error,
            diverged: !(error.is_finite() && error <= 1.0),
        });
    }
    // A row whose best cell exceeds 1 flags itself and every later row.
    let mut blown = false;
    for d in spec.d_min..=spec.d_max {
        let row: Vec<usize> = (0..result.rows.len())
            .filter(|&i| result.rows[i].params[2] == d as f64)
            .collect();
        let best = row.iter().map(|&i| result.rows[i].error).fold(f64::INFINITY, f64::min);
        if best.is_nan() || best > 1.0 {
            blown = true;
        }
        if blown {
            for &i in &row {
                result.rows[i].diverged = true;
            }
        }
    }
    result.metadata.push(("contour".into(), contour.kind.to_string()));
    result.metadata.push(("norm".into(), spec.norm.to_string()));
    Ok(result)
}
