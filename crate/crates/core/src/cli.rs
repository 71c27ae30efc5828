//! Command line front end. Exit codes: 0 success, 2 invalid arguments, 3 numerical failure.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use crate::config;
use crate::contour::{make_contour, Contour, ContourKind, Orientation};
use crate::error::{Error, Result};
use crate::interior::{evaluate_subtracted, is_interior};
use crate::plot::{render, Series};
use crate::quadrature::{gauss_lobatto, gauss_lobatto_newton, lobatto_remainder};
use crate::solver::{principal_power, solve_boundary, NormKind, PowerLaw, RealSplit, SolveOptions};
use crate::study::{run_cbiem_table, run_contour_study, run_h_study, run_hp_study, StudyResult, TableSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Interior probe points reported by `solve`.
pub const PROBES: [Complex64; 4] = [
    Complex64::new(0.1, 0.0),
    Complex64::new(0.2, 0.0),
    Complex64::new(0.3, 0.0),
    Complex64::new(0.0, 0.2),
];

#[derive(Parser, Debug)]
#[command(name = "cbiem", version, about = "Boundary integral solver for the Laplace Dirichlet problem on corner domains")]
#[command(args_override_self = true)]
struct Cli {
    /// Flat key=value file supplying defaults for the subcommand's flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Output {
    /// Write CSV here instead of standard output.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Also write an SVG plot.
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check Gauss-Lobatto exactness and the two node constructions against each other.
    QuadSelftest {
        #[arg(long, default_value_t = 10)]
        nmax: usize,
    },
    /// Fixed-rule composite quadrature on algebraically graded meshes.
    HStudy {
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6")]
        gamma: Vec<f64>,
        /// Points per interval.
        #[arg(long, default_value_t = 6)]
        p: usize,
        #[arg(long, default_value_t = 19)]
        dmax: usize,
        #[command(flatten)]
        output: Output,
    },
    /// h-p composite quadrature on geometric meshes.
    HpStudy {
        #[arg(long, default_value_t = 0.15)]
        sigma: f64,
        #[arg(long, default_value_t = 19)]
        dmax: usize,
        #[command(flatten)]
        output: Output,
    },
    /// h-p quadrature of a branch-point integrand around the unit circle.
    ContourStudy {
        #[arg(long, default_value_t = 0.15)]
        sigma: f64,
        #[arg(long, default_value_t = 8)]
        dmin: usize,
        #[arg(long, default_value_t = 15)]
        dmax: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Solve one problem with W = z^alpha and report errors.
    Solve {
        #[command(flatten)]
        problem: Problem,
        #[arg(long = "D", default_value_t = 9)]
        depth: usize,
        #[arg(long = "O", default_value_t = 6)]
        order: usize,
        /// Solve the imaginary part of the complex system instead of the real part.
        #[arg(long)]
        imaginary_split: bool,
        /// Value imposed on the last node's conjugate (default: the exact value).
        #[arg(long)]
        normalization: Option<f64>,
        /// Per-node CSV output.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Error table over a grid of depths and interpolation orders.
    Table {
        #[command(flatten)]
        problem: Problem,
        #[arg(long, default_value_t = 3)]
        dmin: usize,
        #[arg(long, default_value_t = 9)]
        dmax: usize,
        #[arg(long, default_value_t = 2)]
        omin: usize,
        #[arg(long, default_value_t = 10)]
        omax: usize,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args, Debug, Clone)]
struct Problem {
    /// circle, teardrop, cardioid or reentrant.
    #[arg(long, default_value = "teardrop")]
    contour: String,
    /// Exterior wedge angle in degrees for the reentrant contour.
    #[arg(long, default_value_t = 90.0)]
    angle: f64,
    /// Artificial corners on the circle.
    #[arg(long, default_value_t = 4)]
    corners: usize,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = 0.1)]
    sigma: f64,
    #[arg(long, default_value = "unweighted2")]
    norm: String,
    /// Anticlockwise parameterisation (the default).
    #[arg(long, conflicts_with = "reflect")]
    code_orientation: bool,
    /// Use the complex conjugate parameterisation, which runs clockwise.
    #[arg(long)]
    reflect: bool,
}

impl Problem {
    fn contour(&self) -> Result<Contour> {
        let kind = match self.contour.parse::<ContourKind>()? {
            ContourKind::ReentrantCorner { .. } => ContourKind::ReentrantCorner { exterior_angle_deg: self.angle },
            k => k,
        };
        let mut c = make_contour(kind)?;
        if kind == ContourKind::UnitCircle {
            c = c.with_artificial_corners(self.corners)?;
        }
        let orientation = if self.reflect { Orientation::Reflected } else { Orientation::Anticlockwise };
        Ok(c.with_orientation(orientation))
    }
}

/// Run the CLI on `args` (program name first), writing reports to `out`.
pub fn run(args: &[String], out: &mut dyn Write) -> i32 {
    let cli = match parse_with_config(args) {
        Ok(Ok(cli)) => cli,
        Ok(Err(e)) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INVALID;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidArgument(_) => EXIT_INVALID,
                _ => EXIT_NUMERICAL,
            }
        }
    }
}

const SUBCOMMANDS: [&str; 6] = ["quad-selftest", "h-study", "hp-study", "contour-study", "solve", "table"];

/// Parse once to find `--config`, then splice its entries in as flags directly after
/// the subcommand so that flags given on the command line override them.
fn parse_with_config(args: &[String]) -> Result<std::result::Result<Cli, clap::Error>> {
    let first = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => return Ok(Err(e)),
    };
    let Some(path) = first.config.clone() else {
        return Ok(Ok(first));
    };
    let entries = config::load(&path)?;
    let Some(pos) = args.iter().position(|a| SUBCOMMANDS.contains(&a.as_str())) else {
        return Ok(Ok(first));
    };
    let mut spliced: Vec<String> = args[..=pos].to_vec();
    for (key, value) in entries {
        if key == "config" {
            continue;
        }
        match value.as_str() {
            "true" => spliced.push(format!("--{key}")),
            "false" => {}
            _ => {
                spliced.push(format!("--{key}"));
                spliced.push(value);
            }
        }
    }
    spliced.extend_from_slice(&args[pos + 1..]);
    Ok(Cli::try_parse_from(spliced))
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::InvalidArgument(format!("cannot write {}: {e}", path.display()))
}

fn emit_csv(csv: &str, path: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, csv).map_err(|e| io_err(p, e)),
        None => out.write_all(csv.as_bytes()).map_err(|e| io_err(Path::new("<stdout>"), e)),
    }
}

fn report(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| io_err(Path::new("<stdout>"), e))
}

fn finish_study(
    study: &StudyResult,
    output: &Output,
    group: usize,
    x: impl Fn(usize) -> f64,
    x_label: &str,
    out: &mut dyn Write,
) -> Result<()> {
    emit_csv(&study.to_csv(), output.csv.as_deref(), out)?;
    if output.csv.is_some() {
        report(out, &study.fit_summary())?;
    } else {
        eprint!("{}", study.fit_summary());
    }
    if let Some(path) = &output.plot {
        let mut series: Vec<Series> = Vec::new();
        for row in &study.rows {
            let label = format!("{}={}", study.param_names[group], row.params[group]);
            if series.last().map(|s| s.label != label).unwrap_or(true) {
                series.push(Series { label, points: Vec::new() });
            }
            series.last_mut().unwrap().points.push((x(row.n), row.error.log10()));
        }
        let svg = render(&study.name, x_label, "log10(error)", &series);
        std::fs::write(path, svg).map_err(|e| io_err(path, e))?;
    }
    Ok(())
}

fn execute(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::QuadSelftest { nmax } => quad_selftest(nmax, out),
        Command::HStudy { gamma, p, dmax, output } => {
            let study = run_h_study(&gamma, p, dmax)?;
            finish_study(&study, &output, 0, |n| (n as f64).log10(), "log10(N)", out)
        }
        Command::HpStudy { sigma, dmax, output } => {
            let study = run_hp_study(sigma, dmax)?;
            finish_study(&study, &output, 0, |n| (n as f64).sqrt(), "sqrt(N)", out)
        }
        Command::ContourStudy { sigma, dmin, dmax, output } => {
            let study = run_contour_study(sigma, dmin, dmax)?;
            finish_study(&study, &output, 0, |n| (n as f64).sqrt(), "sqrt(N)", out)
        }
        Command::Solve { problem, depth, order, imaginary_split, normalization, csv } => {
            solve(&problem, depth, order, imaginary_split, normalization, csv.as_deref(), out)
        }
        Command::Table { problem, dmin, dmax, omin, omax, output } => {
            let contour = problem.contour()?;
            let spec = TableSpec {
                alpha: problem.alpha,
                sigma: problem.sigma,
                d_min: dmin,
                d_max: dmax,
                o_min: omin,
                o_max: omax,
                norm: problem.norm.parse()?,
            };
            let study = run_cbiem_table(&contour, &spec)?;
            finish_study(&study, &output, 3, |n| (n as f64).sqrt(), "sqrt(N)", out)
        }
    }
}

fn quad_selftest(nmax: usize, out: &mut dyn Write) -> Result<()> {
    if !(2..=40).contains(&nmax) {
        return Err(Error::InvalidArgument(format!("--nmax must lie in 2..=40, got {nmax}")));
    }
    let mut text = String::from("n,degree,max_rel_error_exact,miss_next,remainder,max_node_diff\n");
    let mut ok = true;
    for n in 2..=nmax {
        let rule = gauss_lobatto(n, 0.0, 1.0)?;
        let other = gauss_lobatto_newton(n, 0.0, 1.0)?;
        let degree = 2 * n - 3;
        let worst = (0..=degree)
            .map(|j| {
                let exact = 1.0 / (j as f64 + 1.0);
                (rule.integrate(|x| x.powi(j as i32)) - exact).abs() / exact
            })
            .fold(0.0, f64::max);
        let miss = rule.integrate(|x| x.powi(degree as i32 + 1)) - 1.0 / (degree as f64 + 2.0);
        let remainder = lobatto_remainder(n)?;
        let diff = rule
            .nodes
            .iter()
            .zip(&other.nodes)
            .chain(rule.weights.iter().zip(&other.weights))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        // The miss must be the true remainder, not rounding noise.
        let misses = (miss - remainder).abs() <= 1e-3 * remainder + 1e-14;
        ok &= worst <= 1e-12 && misses && diff <= 1e-12;
        text.push_str(&format!("{n},{degree},{worst:.3e},{miss:.3e},{remainder:.3e},{diff:.3e}\n"));
    }
    report(out, &text)?;
    if ok {
        Ok(())
    } else {
        Err(Error::NumericalFailure("quadrature self test failed".into()))
    }
}

fn solve(
    problem: &Problem,
    depth: usize,
    order: usize,
    imaginary_split: bool,
    normalization: Option<f64>,
    csv: Option<&Path>,
    out: &mut dyn Write,
) -> Result<()> {
    let contour = problem.contour()?;
    let options = SolveOptions {
        depth,
        sigma: problem.sigma,
        order,
        norm: problem.norm.parse()?,
        split: if imaginary_split { RealSplit::ImaginaryPart } else { RealSplit::RealPart },
        normalization,
    };
    let data = PowerLaw { alpha: problem.alpha };
    let sol = solve_boundary(&contour, &options, &data)?;
    let norms = sol.norms.expect("power law data has an exact conjugate");
    let mut text = format!(
        "contour {} alpha {} sigma {} D {} O {}\nN {}\ncondition {:.3e}\nerror {} {:.6e}\n",
        contour.kind,
        problem.alpha,
        problem.sigma,
        depth,
        order,
        sol.n(),
        sol.condition,
        options.norm,
        norms.get(options.norm),
    );
    for kind in [NormKind::Weighted2, NormKind::Unweighted2, NormKind::Inf] {
        if kind != options.norm {
            text.push_str(&format!("  also {} {:.6e}\n", kind, norms.get(kind)));
        }
    }
    for z in PROBES {
        if !is_interior(&sol.disc, z) {
            text.push_str(&format!("interior {z} skipped (not interior)\n"));
            continue;
        }
        match evaluate_subtracted(&sol.w_hat, &sol.disc, z) {
            Ok(w) => {
                let err = (w.re - principal_power(z, problem.alpha).re).abs();
                text.push_str(&format!("interior {} |Re error| {:.6e}\n", z, err));
            }
            Err(Error::LocationDegenerate(_)) => text.push_str(&format!("interior {z} skipped (not interior)\n")),
            Err(e) => return Err(e),
        }
    }
    if let Some(path) = csv {
        let mut rows = String::from("t,re_zeta,im_zeta,U,V_hat,V_error\n");
        let err = sol.error.as_ref().unwrap();
        for (j, e) in err.iter().enumerate() {
            let z = sol.disc.zeta_nodes[j];
            rows.push_str(&format!(
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.6e}\n",
                sol.disc.t_nodes[j], z.re, z.im, sol.u_nodes[j], sol.v_hat[j], e
            ));
        }
        std::fs::write(path, rows).map_err(|e| io_err(path, e))?;
    }
    report(out, &text)
}
