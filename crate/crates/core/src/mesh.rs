//! Graded meshes on `[0, 1]` and composite h-p rules built on them.
//!
//! Shared interval endpoints are merged by index bookkeeping: the last node
//! of one interval and the first node of the next are the same mesh point,
//! so their weights are summed without ever comparing coordinates.

use crate::error::{invalid, Result};
use crate::quadrature::{basic_rule, RuleFamily};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GradingSpec {
    Uniform,
    /// `x_j = (j/m)^γ`, `γ >= 1`.
    Algebraic(f64),
    /// `x_0 = 0`, `x_j = σ^(m-j)`, `0 < σ < 1`.
    Geometric(f64),
    /// Geometric refinement towards both ends of a segment: `D` graded
    /// intervals at each end and one wide central interval.
    SymmetricGeometric { depth: usize, sigma: f64 },
}

impl GradingSpec {
    /// Build the mesh. `intervals` is ignored for [`GradingSpec::SymmetricGeometric`],
    /// which always has `2D + 1` intervals.
    pub fn mesh(&self, intervals: usize) -> Result<Mesh> {
        match *self {
            GradingSpec::Uniform => uniform_mesh(intervals),
            GradingSpec::Algebraic(gamma) => algebraic_mesh(intervals, gamma),
            GradingSpec::Geometric(sigma) => geometric_mesh(intervals, sigma),
            GradingSpec::SymmetricGeometric { depth, sigma } => symmetric_segment_mesh(depth, sigma),
        }
    }
}

/// Breakpoints `0 = x_0 < x_1 < ... < x_m = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    points: Vec<f64>,
}

impl Mesh {
    pub fn new(points: Vec<f64>) -> Result<Mesh> {
        if points.len() < 2 {
            return invalid("a mesh needs at least two points");
        }
        if points[0] != 0.0 || *points.last().unwrap() != 1.0 {
            return invalid("mesh endpoints must be exactly 0 and 1");
        }
        if !points.windows(2).all(|p| p[0] < p[1]) {
            return invalid("mesh points must be strictly increasing");
        }
        Ok(Mesh { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Number of intervals `m`.
    pub fn intervals(&self) -> usize {
        self.points.len() - 1
    }

    pub fn widths(&self) -> Vec<f64> {
        self.points.windows(2).map(|p| p[1] - p[0]).collect()
    }
}

pub fn uniform_mesh(m: usize) -> Result<Mesh> {
    algebraic_mesh(m, 1.0)
}

pub fn algebraic_mesh(m: usize, gamma: f64) -> Result<Mesh> {
    if m < 1 {
        return invalid("algebraic mesh needs m >= 1");
    }
    if gamma.is_nan() || gamma < 1.0 || !gamma.is_finite() {
        return invalid(format!("algebraic grading needs γ >= 1, got {gamma}"));
    }
    let mut points: Vec<f64> = (0..=m).map(|j| (j as f64 / m as f64).powf(gamma)).collect();
    points[m] = 1.0;
    Mesh::new(points)
}

pub fn geometric_mesh(m: usize, sigma: f64) -> Result<Mesh> {
    if m < 2 {
        return invalid("geometric mesh needs m >= 2");
    }
    if !(sigma > 0.0 && sigma < 1.0) {
        return invalid(format!("geometric grading needs 0 < σ < 1, got {sigma}"));
    }
    let mut points = Vec::with_capacity(m + 1);
    points.push(0.0);
    points.extend((1..=m).map(|j| sigma.powi((m - j) as i32)));
    Mesh::new(points)
}

/// `{0, σ^D, ..., σ, 1-σ, ..., 1-σ^D, 1}`: `2D + 1` intervals.
pub fn symmetric_segment_mesh(depth: usize, sigma: f64) -> Result<Mesh> {
    if depth < 1 {
        return invalid("symmetric segment mesh needs D >= 1");
    }
    if !(sigma > 0.0 && sigma < 0.5) {
        return invalid(format!("symmetric segment grading needs 0 < σ < 0.5, got {sigma}"));
    }
    let lower: Vec<f64> = std::iter::once(0.0)
        .chain((1..=depth).rev().map(|k| sigma.powi(k as i32)))
        .collect();
    let mut points = lower.clone();
    points.extend(lower.iter().rev().map(|&x| 1.0 - x));
    Mesh::new(points)
}

/// Rule point counts `{2, 3, ..., D+1, D+2, D+1, ..., 3, 2}` for a symmetric segment.
pub fn symmetric_counts(depth: usize) -> Vec<usize> {
    (2..=depth + 2).chain((2..=depth + 1).rev()).collect()
}

/// Node count of a composite closed rule with `n` points on each of `m` intervals.
pub fn closed_node_count(m: usize, n: usize) -> usize {
    m * (n - 2) + m + 1
}

/// Where a composite node came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeOrigin {
    pub segment: usize,
    /// Mesh interval within the segment; mesh points belong to the interval on their left
    /// (the first point of a segment to interval 0).
    pub interval: usize,
}

/// A node where two segments meet, with the weight contributed from each side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CornerSplit {
    pub node: usize,
    /// Index into the corner list; corner 0 is `t = 0 ≡ 1`.
    pub corner: usize,
    /// Weight contributed by the segment ending at the corner.
    pub below: f64,
    /// Weight contributed by the segment starting at the corner.
    pub above: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompositeRule {
    pub params: Vec<f64>,
    pub weights: Vec<f64>,
    /// Whether `t = 0` was folded into `t = 1` for a closed contour.
    pub closed: bool,
    pub origins: Vec<NodeOrigin>,
    pub intervals_per_segment: usize,
    pub corners: Vec<CornerSplit>,
}

impl CompositeRule {
    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.params
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(t))
            .sum()
    }

    /// Number of intervals between a node's interval and the nearer end of its segment.
    pub fn intervals_from_corner(&self, node: usize) -> usize {
        let i = self.origins[node].interval;
        i.min(self.intervals_per_segment - 1 - i)
    }

    fn fold_closed(&mut self) {
        let first_w = self.weights.remove(0);
        self.params.remove(0);
        self.origins.remove(0);
        let last = self.params.len() - 1;
        let below = self.weights[last];
        self.weights[last] += first_w;
        for c in &mut self.corners {
            c.node -= 1;
        }
        self.corners.insert(
            0,
            CornerSplit {
                node: last,
                corner: 0,
                below,
                above: first_w,
            },
        );
        self.closed = true;
    }
}

/// Composite Gauss-Lobatto rule with `counts[j]` points on mesh interval `j`.
pub fn compose_hp_rule(mesh: &Mesh, counts: &[usize], wrap_closed: bool) -> Result<CompositeRule> {
    compose_rule(mesh, counts, RuleFamily::GaussLobatto, wrap_closed)
}

/// Composite rule from basic closed rules of `family`. A single count is broadcast.
pub fn compose_rule(
    mesh: &Mesh,
    counts: &[usize],
    family: RuleFamily,
    wrap_closed: bool,
) -> Result<CompositeRule> {
    let m = mesh.intervals();
    let counts: Vec<usize> = match counts.len() {
        1 => vec![counts[0]; m],
        len if len == m => counts.to_vec(),
        len => {
            return invalid(format!(
                "{len} rule counts supplied for a mesh with {m} intervals"
            ))
        }
    };
    if counts.iter().any(|&n| n < 2) {
        return invalid("every interval needs a rule with at least 2 points");
    }
    let x = mesh.points();
    let total: usize = 1 + counts.iter().map(|n| n - 1).sum::<usize>();
    let mut params = Vec::with_capacity(total);
    let mut weights = Vec::with_capacity(total);
    let mut origins = Vec::with_capacity(total);
    params.push(0.0);
    weights.push(0.0);
    origins.push(NodeOrigin { segment: 0, interval: 0 });
    for (j, &n) in counts.iter().enumerate() {
        let rule = basic_rule(family, n, x[j], x[j + 1])?;
        // Shared left endpoint: accumulate into the node already present.
        *weights.last_mut().unwrap() += rule.weights[0];
        for i in 1..n {
            params.push(rule.nodes[i]);
            weights.push(rule.weights[i]);
            origins.push(NodeOrigin { segment: 0, interval: j });
        }
    }
    let mut composite = CompositeRule {
        params,
        weights,
        closed: false,
        origins,
        intervals_per_segment: m,
        corners: Vec::new(),
    };
    if wrap_closed {
        composite.fold_closed();
    }
    Ok(composite)
}

/// Copy an open rule on `[0, 1]` onto each segment `[c_{k-1}, c_k]` of a contour
/// parameterisation, merging nodes shared at corners.
pub fn replicate_over_segments(
    corner_params: &[f64],
    segment_rule: &CompositeRule,
    wrap_closed: bool,
) -> Result<CompositeRule> {
    if segment_rule.closed {
        return invalid("segment rule must be open (include both endpoints)");
    }
    if corner_params.len() < 2
        || corner_params[0] != 0.0
        || *corner_params.last().unwrap() != 1.0
        || !corner_params.windows(2).all(|p| p[0] < p[1])
    {
        return invalid("corner parameters must increase strictly from 0 to 1");
    }
    let s = segment_rule.len();
    let nc = corner_params.len() - 1;
    let mut params = Vec::with_capacity(nc * (s - 1) + 1);
    let mut weights = Vec::with_capacity(nc * (s - 1) + 1);
    let mut origins = Vec::with_capacity(nc * (s - 1) + 1);
    let mut corners = Vec::new();
    params.push(0.0);
    weights.push(0.0);
    origins.push(NodeOrigin { segment: 0, interval: 0 });
    for k in 0..nc {
        let (lo, hi) = (corner_params[k], corner_params[k + 1]);
        let h = hi - lo;
        let first = segment_rule.weights[0] * h;
        if k > 0 {
            corners.push(CornerSplit {
                node: params.len() - 1,
                corner: k,
                below: *weights.last().unwrap(),
                above: first,
            });
        }
        *weights.last_mut().unwrap() += first;
        for i in 1..s {
            let t = if i == s - 1 { hi } else { lo + h * segment_rule.params[i] };
            params.push(t);
            weights.push(segment_rule.weights[i] * h);
            origins.push(NodeOrigin {
                segment: k,
                interval: segment_rule.origins[i].interval,
            });
        }
    }
    let mut composite = CompositeRule {
        params,
        weights,
        closed: false,
        origins,
        intervals_per_segment: segment_rule.intervals_per_segment,
        corners,
    };
    if wrap_closed {
        composite.fold_closed();
    }
    Ok(composite)
}

/// Closed h-p rule over a contour with corners at `corner_params` (`0` first, `1` excluded),
/// using the symmetric geometric segment grading and counts `{2, ..., D+2, ..., 2}`.
pub fn contour_rule(corners: &[f64], depth: usize, sigma: f64) -> Result<CompositeRule> {
    let mesh = symmetric_segment_mesh(depth, sigma)?;
    let segment = compose_hp_rule(&mesh, &symmetric_counts(depth), false)?;
    let mut c = corners.to_vec();
    c.push(1.0);
    replicate_over_segments(&c, &segment, true)
}
