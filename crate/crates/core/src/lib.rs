//! Complex boundary integral equation method (CBIEM) for the two-dimensional
//! Laplace Dirichlet problem on domains with corners.
//!
//! The boundary is discretised with a geometrically graded h-p composite
//! Gauss-Lobatto rule, the Cauchy integral equation
//! `∮ (W(ζ) - W(z)) / (ζ - z) dζ = 0` is collocated at parameter midpoints,
//! and the harmonic conjugate `V` of the prescribed boundary data `U` is
//! recovered from a real order `N - 1` linear system. Interior values of the
//! analytic completion `W = U + iV` come from a singularity-subtracted Cauchy
//! formula.
//!
//! Module map:
//! * [`quadrature`] basic closed rules (Gauss-Lobatto, closed Newton-Cotes)
//! * [`mesh`] graded meshes and composite h-p rules
//! * [`contour`] parameterised contours and their discretisation
//! * [`solver`] interpolation tables, matrix assembly and the reduced solve
//! * [`interior`] evaluation of `W` inside the domain
//! * [`study`] convergence studies and error tables, with CSV/SVG output

pub mod contour;
pub mod error;
pub mod interior;
pub mod mesh;
pub mod quadrature;
pub mod solver;
pub mod study;

pub mod cli;
mod config;
mod plot;

pub use contour::{Contour, ContourKind, Discretization, Orientation};
pub use error::{Error, Result};
pub use mesh::{CompositeRule, GradingSpec, Mesh};
pub use quadrature::{QuadratureRule, RuleFamily};
pub use solver::{BoundaryData, BoundarySolution, NormKind, SolveOptions};

pub use num_complex::Complex64;
