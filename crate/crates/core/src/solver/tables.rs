//! Interpolation stencils `F` and Lagrange weights `L` used to approximate the
//! conjugate at collocation points from its node values.
//!
//! Stencils never straddle a corner. Segment `s` owns nodes
//! `s·NS .. (s+1)·NS - 1` (0-based, the last being the corner that closes it),
//! and the corner node that opens it belongs to the previous segment.

use crate::contour::Discretization;
use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct InterpolationTables {
    /// Points per stencil `O`.
    pub order: usize,
    pub n: usize,
    pub corners: usize,
    /// Nodes per segment, `NS = N / NC`.
    pub segment_len: usize,
    /// Row-major `N × O` node indices, 0-based.
    pub f: Vec<usize>,
    /// Row-major `N × O` Lagrange weights in the contour parameter.
    pub l: Vec<f64>,
    /// Leading zero count of each row of the skewed weight matrix; `-1` marks a
    /// row whose first stencil node wraps around to node `N`.
    pub shift: Vec<isize>,
}

impl InterpolationTables {
    pub fn build(disc: &Discretization, order: usize) -> Result<InterpolationTables> {
        let n = disc.len();
        let nc = disc.corner_count;
        let f = index_table(n, nc, order)?;
        let ns = n / nc;
        let half = order / 2;
        let mut l = vec![1.0; n * order];
        for k in 0..n {
            let stencil = &f[k * order..(k + 1) * order];
            // The wrapped corner node sits at t = 1 but acts as t = 0 here.
            let param = |i: usize| {
                if k < half && i == 0 {
                    0.0
                } else {
                    disc.t_nodes[stencil[i]]
                }
            };
            // t_{k-1/2} - t_v formed from node differences, so the halving is exact
            // even where the parameters crowd against t = 1.
            let prev = if k == 0 { 0.0 } else { disc.t_nodes[k - 1] };
            let cur = disc.t_nodes[k];
            let offset = |tv: f64| 0.5 * ((prev - tv) + (cur - tv));
            for i in 0..order {
                let ti = param(i);
                let mut value = 1.0;
                for v in 0..order {
                    if v != i {
                        let tv = param(v);
                        value *= offset(tv) / (ti - tv);
                    }
                }
                l[k * order + i] = value;
            }
        }
        Ok(InterpolationTables {
            order,
            n,
            corners: nc,
            segment_len: ns,
            f,
            l,
            shift: shift_vector(n, nc, order),
        })
    }

    pub fn stencil(&self, k: usize) -> &[usize] {
        &self.f[k * self.order..(k + 1) * self.order]
    }

    pub fn weights(&self, k: usize) -> &[f64] {
        &self.l[k * self.order..(k + 1) * self.order]
    }
}

fn check_order(n: usize, nc: usize, order: usize) -> Result<usize> {
    if nc == 0 || n < 2 || !n.is_multiple_of(nc) {
        return invalid(format!("{n} nodes cannot be split evenly over {nc} segments"));
    }
    let ns = n / nc;
    if order < 2 || !order.is_multiple_of(2) {
        return invalid(format!("interpolation order must be even and >= 2, got {order}"));
    }
    if order > ns {
        return invalid(format!(
            "interpolation order {order} exceeds the {ns} nodes available per segment"
        ));
    }
    Ok(ns)
}

/// Row-major `N × O` table of 0-based stencil node indices.
pub fn index_table(n: usize, nc: usize, order: usize) -> Result<Vec<usize>> {
    let ns = check_order(n, nc, order)?;
    let half = order / 2;
    let mut f = Vec::with_capacity(n * order);
    for k in 0..n {
        let (segment, r) = (k / ns, k % ns);
        // First node of the stencil, counted 1-based within the segment with 0
        // for the corner that opens it.
        let start = if r < half {
            0
        } else if r >= ns - half {
            ns - order + 1
        } else {
            r + 1 - half
        };
        for i in 0..order {
            let one_based = start + i + segment * ns;
            f.push(if one_based == 0 { n - 1 } else { one_based - 1 });
        }
    }
    Ok(f)
}

/// `[-1 × O/2, 0, 1, ..., NS-O-1, (NS-O) × O/2]` offset by `s·NS` per segment.
fn shift_vector(n: usize, nc: usize, order: usize) -> Vec<isize> {
    let ns = (n / nc) as isize;
    let o = order as isize;
    let half = order / 2;
    let mut base: Vec<isize> = vec![-1; half];
    base.extend(0..ns - o);
    base.extend(std::iter::repeat_n(ns - o, half));
    (0..nc as isize)
        .flat_map(|s| base.iter().map(move |&g| g + s * ns))
        .collect()
}
