//! Closed parameterised contours `γ : [0, 1] → ℂ` with corners, and their
//! discretisation into quadrature nodes and collocation points.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::mesh::CompositeRule;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContourKind {
    /// `e^{2πit}`; smooth, corners are artificial.
    UnitCircle,
    /// `2 sin(πt) - i sin(2πt)`: right angle corner at the origin.
    Teardrop,
    /// `(cos(2πt) - 1) e^{2πit}`: cusp at the origin.
    Cardioid,
    /// `-a sin(3πt) - i sin(2πt)` with `a = 2 / (3 tan(θ/2))`: a reentrant corner at
    /// the origin whose exterior wedge has opening `θ` degrees.
    ReentrantCorner { exterior_angle_deg: f64 },
}

impl FromStr for ContourKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "circle" | "unit-circle" => Ok(ContourKind::UnitCircle),
            "teardrop" => Ok(ContourKind::Teardrop),
            "cardioid" => Ok(ContourKind::Cardioid),
            "reentrant" => Ok(ContourKind::ReentrantCorner {
                exterior_angle_deg: 90.0,
            }),
            other => invalid(format!("unknown contour '{other}'")),
        }
    }
}

impl fmt::Display for ContourKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ContourKind::UnitCircle => write!(f, "circle"),
            ContourKind::Teardrop => write!(f, "teardrop"),
            ContourKind::Cardioid => write!(f, "cardioid"),
            ContourKind::ReentrantCorner { exterior_angle_deg } => {
                write!(f, "reentrant({exterior_angle_deg})")
            }
        }
    }
}

/// Direction of traversal.
///
/// Every catalogue contour is symmetric about the real axis, so
/// [`Orientation::Reflected`] (the complex conjugate of the parameterisation)
/// traverses the same curve clockwise. For the teardrop this is the
/// `2 sin(πt) + i sin(2πt)` form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Orientation {
    #[default]
    Anticlockwise,
    Reflected,
}

/// Which one-sided limit of the tangent to take at a parameter value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Below,
    Above,
    /// Mean of the two one-sided limits; equals `γ̇(t)` off corners.
    Mean,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    pub kind: ContourKind,
    pub orientation: Orientation,
    corners: Vec<f64>,
}

pub fn make_contour(kind: ContourKind) -> Result<Contour> {
    if let ContourKind::ReentrantCorner { exterior_angle_deg } = kind {
        if !(exterior_angle_deg > 0.0 && exterior_angle_deg < 180.0) {
            return invalid(format!(
                "reentrant wedge angle must lie in (0, 180) degrees, got {exterior_angle_deg}"
            ));
        }
    }
    Ok(Contour {
        kind,
        orientation: Orientation::Anticlockwise,
        corners: vec![0.0],
    })
}

impl Contour {
    pub fn unit_circle() -> Contour {
        make_contour(ContourKind::UnitCircle).unwrap()
    }

    pub fn teardrop() -> Contour {
        make_contour(ContourKind::Teardrop).unwrap()
    }

    pub fn cardioid() -> Contour {
        make_contour(ContourKind::Cardioid).unwrap()
    }

    pub fn with_orientation(mut self, orientation: Orientation) -> Contour {
        self.orientation = orientation;
        self
    }

    /// Place `count` equally spaced corners `k / count` (only for the smooth circle).
    pub fn with_artificial_corners(mut self, count: usize) -> Result<Contour> {
        if self.kind != ContourKind::UnitCircle {
            return invalid("artificial corners are only placed on the unit circle");
        }
        if count < 1 {
            return invalid("need at least one corner");
        }
        self.corners = (0..count).map(|k| k as f64 / count as f64).collect();
        Ok(self)
    }

    /// Corner parameters in `[0, 1)`, starting with `0`.
    pub fn corner_params(&self) -> &[f64] {
        &self.corners
    }

    pub fn corner_count(&self) -> usize {
        self.corners.len()
    }

    fn scale(&self) -> f64 {
        match self.kind {
            ContourKind::ReentrantCorner { exterior_angle_deg } => {
                2.0 / (3.0 * (exterior_angle_deg * PI / 360.0).tan())
            }
            _ => 1.0,
        }
    }

    fn raw_gamma(&self, t: f64) -> Complex64 {
        let pt = PI * t;
        match self.kind {
            ContourKind::UnitCircle => Complex64::from_polar(1.0, 2.0 * pt),
            ContourKind::Teardrop => Complex64::new(2.0 * pt.sin(), -(2.0 * pt).sin()),
            ContourKind::Cardioid => {
                Complex64::from_polar(1.0, 2.0 * pt) * ((2.0 * pt).cos() - 1.0)
            }
            ContourKind::ReentrantCorner { .. } => {
                Complex64::new(-self.scale() * (3.0 * pt).sin(), -(2.0 * pt).sin())
            }
        }
    }

    fn raw_gamma_dot(&self, t: f64) -> Complex64 {
        let pt = PI * t;
        match self.kind {
            ContourKind::UnitCircle => Complex64::new(0.0, 2.0 * PI) * Complex64::from_polar(1.0, 2.0 * pt),
            ContourKind::Teardrop => {
                Complex64::new(2.0 * PI * pt.cos(), -2.0 * PI * (2.0 * pt).cos())
            }
            ContourKind::Cardioid => {
                let e = Complex64::from_polar(1.0, 2.0 * pt);
                -2.0 * PI * e * Complex64::new((2.0 * pt).sin(), 1.0 - (2.0 * pt).cos())
            }
            ContourKind::ReentrantCorner { .. } => Complex64::new(
                -3.0 * PI * self.scale() * (3.0 * pt).cos(),
                -2.0 * PI * (2.0 * pt).cos(),
            ),
        }
    }

    fn orient(&self, z: Complex64) -> Complex64 {
        match self.orientation {
            Orientation::Anticlockwise => z,
            Orientation::Reflected => z.conj(),
        }
    }

    /// `γ(t)`; `t = 1` is evaluated as `t = 0` so the contour closes exactly.
    pub fn gamma(&self, t: f64) -> Complex64 {
        let t = if t == 1.0 { 0.0 } else { t };
        self.orient(self.raw_gamma(t))
    }

    /// `γ̇(t)` from the analytic derivative; at a corner this is the limit from
    /// above for `t = 0` and from below for `t = 1`.
    pub fn gamma_dot(&self, t: f64) -> Complex64 {
        self.orient(self.raw_gamma_dot(t))
    }

    /// `(limit from below, limit from above)` of the tangent at corner `c`.
    pub fn one_sided_tangents(&self, c: f64) -> (Complex64, Complex64) {
        if c == 0.0 || c == 1.0 {
            (self.gamma_dot(1.0), self.gamma_dot(0.0))
        } else {
            let g = self.gamma_dot(c);
            (g, g)
        }
    }

    fn corner_at(&self, t: f64) -> Option<f64> {
        self.corners
            .iter()
            .copied()
            .find(|&c| c == t || (c == 0.0 && t == 1.0))
    }

    /// Tangent at a node parameter; corners resolve according to `side`.
    pub fn tangent_at_node(&self, t: f64, side: Side) -> Complex64 {
        match self.corner_at(t) {
            Some(c) => {
                let (below, above) = self.one_sided_tangents(c);
                match side {
                    Side::Below => below,
                    Side::Above => above,
                    Side::Mean => 0.5 * (below + above),
                }
            }
            None => self.gamma_dot(t),
        }
    }

    /// Interior angle at corner `c`, from secants a short parameter distance either side.
    pub fn interior_angle(&self, c: f64) -> f64 {
        let delta = 1e-7;
        let z0 = self.gamma(c);
        let before = if c == 0.0 { self.gamma(1.0 - delta) } else { self.gamma(c - delta) };
        let after = self.gamma(c + delta);
        let incoming = z0 - before;
        let outgoing = after - z0;
        let turn = (outgoing / incoming).arg();
        let angle = PI - turn;
        match self.orientation {
            Orientation::Anticlockwise => angle,
            Orientation::Reflected => 2.0 * PI - angle,
        }
    }
}

/// Quadrature nodes, collocation points and tangent-absorbed weights on a contour.
#[derive(Debug, Clone, PartialEq)]
pub struct Discretization {
    pub t_nodes: Vec<f64>,
    pub t_coll: Vec<f64>,
    pub zeta_nodes: Vec<Complex64>,
    pub zeta_coll: Vec<Complex64>,
    pub weights_raw: Vec<f64>,
    /// `w_j γ̇_j`; at corners each side is absorbed separately before summing.
    pub weights: Vec<Complex64>,
    pub corner_count: usize,
}

impl Discretization {
    pub fn len(&self) -> usize {
        self.t_nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t_nodes.is_empty()
    }

    /// `Σ_j g(ζ_j) w_j ≈ ∮ g(ζ) dζ`.
    pub fn integrate<F: Fn(Complex64) -> Complex64>(&self, g: F) -> Complex64 {
        self.zeta_nodes
            .iter()
            .zip(&self.weights)
            .map(|(&z, &w)| g(z) * w)
            .sum()
    }
}

/// Map a closed composite rule onto the contour.
pub fn discretize(contour: &Contour, rule: &CompositeRule) -> Result<Discretization> {
    if !rule.closed {
        return invalid("contour discretisation needs a closed (wrapped) rule");
    }
    let n = rule.len();
    if n < 2 {
        return invalid("contour discretisation needs at least two nodes");
    }
    let mut rule_corners: Vec<f64> = rule
        .corners
        .iter()
        .map(|c| if c.corner == 0 { 0.0 } else { rule.params[c.node] })
        .collect();
    rule_corners.sort_by(f64::total_cmp);
    if rule_corners != contour.corner_params() {
        return invalid(format!(
            "rule segment boundaries {:?} do not match contour corners {:?}",
            rule_corners,
            contour.corner_params()
        ));
    }

    let t_nodes = rule.params.clone();
    let t_coll: Vec<f64> = (0..n)
        .map(|k| {
            let prev = if k == 0 { 0.0 } else { t_nodes[k - 1] };
            0.5 * (prev + t_nodes[k])
        })
        .collect();
    let zeta_nodes: Vec<Complex64> = t_nodes.iter().map(|&t| contour.gamma(t)).collect();
    let zeta_coll: Vec<Complex64> = t_coll.iter().map(|&t| contour.gamma(t)).collect();
    let mut weights: Vec<Complex64> = t_nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&t, &w)| w * contour.gamma_dot(t))
        .collect();
    for split in &rule.corners {
        let c = if split.corner == 0 { 0.0 } else { rule.params[split.node] };
        let (below, above) = contour.one_sided_tangents(c);
        weights[split.node] = split.below * below + split.above * above;
    }

    Ok(Discretization {
        t_nodes,
        t_coll,
        zeta_nodes,
        zeta_coll,
        weights_raw: rule.weights.clone(),
        weights,
        corner_count: contour.corner_count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::contour_rule;
    use approx::assert_abs_diff_eq;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn catalogue_points() {
        let td = Contour::teardrop();
        assert!(close(td.gamma(0.5), Complex64::new(2.0, 0.0), 1e-15));
        assert!(close(td.gamma(0.0), td.gamma(1.0), 1e-15));
        let circle = Contour::unit_circle();
        assert!(close(circle.gamma(0.25), Complex64::i(), 1e-15));
        assert!(close(circle.tangent_at_node(0.0, Side::Mean), Complex64::new(0.0, 2.0 * PI), 1e-14));
        assert!("hexagon".parse::<ContourKind>().is_err());
        assert!(make_contour(ContourKind::ReentrantCorner { exterior_angle_deg: 200.0 }).is_err());
    }

    #[test]
    fn corner_tangents() {
        let td = Contour::teardrop();
        let (below, above) = td.one_sided_tangents(0.0);
        assert!(close(below, Complex64::new(-2.0 * PI, -2.0 * PI), 1e-14));
        assert!(close(above, Complex64::new(2.0 * PI, -2.0 * PI), 1e-14));
        assert!(close(td.tangent_at_node(1.0, Side::Mean), Complex64::new(0.0, -2.0 * PI), 1e-14));
        // Literal +i sin(2πt) form: mean tangent flips sign.
        let reflected = Contour::teardrop().with_orientation(Orientation::Reflected);
        assert!(close(reflected.tangent_at_node(0.0, Side::Mean), Complex64::new(0.0, 2.0 * PI), 1e-14));
        let cusp = Contour::cardioid().tangent_at_node(1.0, Side::Mean);
        assert!(cusp.norm() < 1e-14);
    }

    #[test]
    fn interior_angles() {
        assert_abs_diff_eq!(Contour::teardrop().interior_angle(0.0), PI / 2.0, epsilon = 1e-6);
        let reflected = Contour::teardrop().with_orientation(Orientation::Reflected);
        assert_abs_diff_eq!(reflected.interior_angle(0.0), PI / 2.0, epsilon = 1e-6);
        let wedge = make_contour(ContourKind::ReentrantCorner { exterior_angle_deg: 90.0 }).unwrap();
        assert_abs_diff_eq!(wedge.interior_angle(0.0), 1.5 * PI, epsilon = 1e-6);
        assert_abs_diff_eq!(Contour::unit_circle().interior_angle(0.0), PI, epsilon = 1e-6);
    }

    /// Signed area by the shoelace formula on a fine polygon.
    fn signed_area(c: &Contour) -> f64 {
        let m = 20000;
        (0..m)
            .map(|k| {
                let a = c.gamma(k as f64 / m as f64);
                let b = c.gamma((k + 1) as f64 / m as f64);
                0.5 * (a.re * b.im - b.re * a.im)
            })
            .sum()
    }

    #[test]
    fn default_orientation_is_anticlockwise() {
        for kind in [
            ContourKind::UnitCircle,
            ContourKind::Teardrop,
            ContourKind::Cardioid,
            ContourKind::ReentrantCorner { exterior_angle_deg: 90.0 },
            ContourKind::ReentrantCorner { exterior_angle_deg: 20.0 },
        ] {
            let c = make_contour(kind).unwrap();
            assert!(signed_area(&c) > 0.0, "{kind} is not anticlockwise");
            assert!(signed_area(&c.with_orientation(Orientation::Reflected)) < 0.0);
        }
        assert_abs_diff_eq!(signed_area(&Contour::unit_circle()), PI, epsilon = 1e-6);
    }

    #[test]
    fn teardrop_mirror_symmetry() {
        let td = Contour::teardrop();
        for k in 0..=20 {
            let t = k as f64 / 20.0;
            assert!(close(td.gamma(1.0 - t), td.gamma(t).conj(), 1e-14));
        }
    }

    #[test]
    fn teardrop_discretisation() {
        let td = Contour::teardrop();
        let disc = discretize(&td, &contour_rule(&[0.0], 3, 0.1).unwrap()).unwrap();
        assert_eq!(disc.len(), 16);
        assert_eq!(disc.t_coll[0], 0.5 * disc.t_nodes[0]);
        for k in 0..disc.len() {
            for j in 0..disc.len() {
                assert!(disc.t_coll[k] != disc.t_nodes[j]);
            }
            assert!(disc.t_coll[k] > 0.0 && disc.t_coll[k] < 1.0);
        }
        // Merged corner: per-side absorption equals merged weight times mean tangent.
        let last = disc.len() - 1;
        let merged = disc.weights_raw[last] * Complex64::new(0.0, -2.0 * PI);
        assert!(close(disc.weights[last], merged, 1e-15));
    }

    #[test]
    fn circle_closed_contour_identities() {
        let circle = Contour::unit_circle().with_artificial_corners(4).unwrap();
        for depth in 6..=8 {
            let disc = discretize(&circle, &contour_rule(circle.corner_params(), depth, 0.15).unwrap()).unwrap();
            for q in 0..=2 {
                let v = disc.integrate(|z| z.powi(q));
                assert!(v.norm() < 1e-10, "D = {depth}, q = {q}: {v}");
            }
            let cauchy = disc.integrate(|z| 1.0 / z);
            assert!(close(cauchy, Complex64::new(0.0, 2.0 * PI), 1e-10));
        }
    }

    #[test]
    fn corner_mismatch_rejected() {
        let circle = Contour::unit_circle().with_artificial_corners(3).unwrap();
        assert!(discretize(&circle, &contour_rule(&[0.0, 0.5], 3, 0.15).unwrap()).is_err());
        let open = crate::mesh::compose_hp_rule(
            &crate::mesh::uniform_mesh(4).unwrap(),
            &[3],
            false,
        )
        .unwrap();
        assert!(discretize(&Contour::teardrop(), &open).is_err());
    }
}
