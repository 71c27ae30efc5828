//! Interior evaluation of `W` from node values by the discretised Cauchy formula.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::contour::Discretization;
use crate::error::{invalid, Error, Result};

/// Below this magnitude the subtracted denominator `Σ w_j / (ζ_j - z)` (which is
/// `2πi` inside and `0` outside) is taken to mean `z` is not interior.
pub const DENOMINATOR_FLOOR: f64 = 1e-13;

fn kernel(disc: &Discretization, z: Complex64) -> Result<Vec<Complex64>> {
    disc.zeta_nodes
        .iter()
        .zip(&disc.weights)
        .map(|(&zeta, &w)| {
            let diff = zeta - z;
            if diff.norm() == 0.0 {
                Err(Error::LocationDegenerate(format!("evaluation point {z} is a node")))
            } else {
                Ok(w / diff)
            }
        })
        .collect()
}

fn check_len(w_nodes: &[Complex64], disc: &Discretization) -> Result<()> {
    if w_nodes.len() != disc.len() {
        return invalid(format!(
            "{} node values supplied for {} nodes",
            w_nodes.len(),
            disc.len()
        ));
    }
    Ok(())
}

/// `(1 / 2πi) Σ_j W_j w_j / (ζ_j - z)`.
pub fn evaluate_naive(w_nodes: &[Complex64], disc: &Discretization, z: Complex64) -> Result<Complex64> {
    check_len(w_nodes, disc)?;
    let k = kernel(disc, z)?;
    let sum: Complex64 = w_nodes.iter().zip(&k).map(|(w, k)| w * k).sum();
    Ok(sum / Complex64::new(0.0, 2.0 * PI))
}

/// `Σ_j W_j w_j / (ζ_j - z)  /  Σ_j w_j / (ζ_j - z)`.
///
/// Quadrature error in the near-singular kernel largely cancels in the ratio.
pub fn evaluate_subtracted(w_nodes: &[Complex64], disc: &Discretization, z: Complex64) -> Result<Complex64> {
    check_len(w_nodes, disc)?;
    let k = kernel(disc, z)?;
    let den: Complex64 = k.iter().sum();
    if den.norm() < DENOMINATOR_FLOOR {
        return Err(Error::LocationDegenerate(format!(
            "Cauchy denominator vanishes at {z}; the point is probably outside the contour"
        )));
    }
    let num: Complex64 = w_nodes.iter().zip(&k).map(|(w, k)| w * k).sum();
    Ok(num / den)
}

/// `(1 / 2πi) Σ_j w_j / (ζ_j - z)`: the discrete winding number of the contour about `z`.
pub fn winding_number(disc: &Discretization, z: Complex64) -> Result<f64> {
    let den: Complex64 = kernel(disc, z)?.iter().sum();
    Ok((den / Complex64::new(0.0, 2.0 * PI)).re)
}

/// Whether `z` is enclosed, by rounding the discrete winding number.
pub fn is_interior(disc: &Discretization, z: Complex64) -> bool {
    matches!(winding_number(disc, z), Ok(w) if w > 0.5)
}
