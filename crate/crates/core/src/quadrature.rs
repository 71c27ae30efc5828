//! Basic closed quadrature rules on finite intervals.
//!
//! Gauss-Lobatto rules are computed from the bordered Jacobi matrix of the
//! Legendre recurrence (the Golub construction): the Legendre Jacobi matrix
//! of order `n - 1` is extended by one row and column chosen so that `±1`
//! are eigenvalues, and the eigenvalues/eigenvectors of the bordered matrix
//! give the nodes and weights. An independent Newton iteration on the
//! derivative of the Legendre polynomial is kept alongside for
//! cross-checking.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{invalid, Error, Result};

/// Absolute tolerance for iterative node solves.
pub const NODE_TOLERANCE: f64 = 1e-14;
/// Iteration cap for iterative node solves.
pub const MAX_ITERATIONS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleFamily {
    GaussLobatto,
    NewtonCotesClosed,
}

impl RuleFamily {
    /// Polynomial degree of exactness of the `n` point rule.
    pub fn degree(self, n: usize) -> usize {
        match self {
            RuleFamily::GaussLobatto => 2 * n - 3,
            RuleFamily::NewtonCotesClosed => {
                if n % 2 == 1 {
                    n
                } else {
                    n - 1
                }
            }
        }
    }
}

/// An `n` point closed rule on `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub family: RuleFamily,
    pub a: f64,
    pub b: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.family.degree(self.len())
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Affine image of this rule on `[a, b]`. Endpoints are placed exactly.
    pub fn mapped(&self, a: f64, b: f64) -> Result<QuadratureRule> {
        check_interval(a, b)?;
        let scale = (b - a) / (self.b - self.a);
        let n = self.len();
        let mut nodes: Vec<f64> = self
            .nodes
            .iter()
            .map(|&x| a + (x - self.a) * scale)
            .collect();
        nodes[0] = a;
        nodes[n - 1] = b;
        Ok(QuadratureRule {
            family: self.family,
            a,
            b,
            nodes,
            weights: self.weights.iter().map(|&w| w * scale).collect(),
        })
    }
}

fn check_interval(a: f64, b: f64) -> Result<()> {
    if !(a.is_finite() && b.is_finite()) || a >= b {
        return invalid(format!("interval [{a}, {b}] must satisfy a < b"));
    }
    Ok(())
}

type CacheKey = (RuleFamily, usize);

fn cache() -> &'static RwLock<HashMap<CacheKey, Arc<QuadratureRule>>> {
    static CACHE: OnceLock<RwLock<HashMap<CacheKey, Arc<QuadratureRule>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Reference rule on `[-1, 1]`, computed once per `(family, n)`.
fn reference_rule(family: RuleFamily, n: usize) -> Result<Arc<QuadratureRule>> {
    if let Some(rule) = cache().read().expect("rule cache poisoned").get(&(family, n)) {
        return Ok(Arc::clone(rule));
    }
    let rule = Arc::new(match family {
        RuleFamily::GaussLobatto => lobatto_reference_eigen(n)?,
        RuleFamily::NewtonCotesClosed => newton_cotes_reference(n)?,
    });
    let mut guard = cache().write().expect("rule cache poisoned");
    Ok(Arc::clone(guard.entry((family, n)).or_insert(rule)))
}

/// `n` point Gauss-Lobatto rule on `[a, b]`.
pub fn gauss_lobatto(n: usize, a: f64, b: f64) -> Result<QuadratureRule> {
    if n < 2 {
        return invalid(format!("Gauss-Lobatto rule needs n >= 2, got {n}"));
    }
    check_interval(a, b)?;
    reference_rule(RuleFamily::GaussLobatto, n)?.mapped(a, b)
}

/// `n` point Gauss-Lobatto rule on `[a, b]` from Newton's method on `P'_{n-1}`.
///
/// Same rule as [`gauss_lobatto`] by a different route; not cached.
pub fn gauss_lobatto_newton(n: usize, a: f64, b: f64) -> Result<QuadratureRule> {
    if n < 2 {
        return invalid(format!("Gauss-Lobatto rule needs n >= 2, got {n}"));
    }
    check_interval(a, b)?;
    lobatto_reference_newton(n)?.mapped(a, b)
}

/// Closed Newton-Cotes rule on `n` equally spaced points of `[0, 1]`, `2 <= n <= 11`.
pub fn newton_cotes_closed(n: usize) -> Result<QuadratureRule> {
    if !(2..=11).contains(&n) {
        return invalid(format!("closed Newton-Cotes rules are tabulated for 2 <= n <= 11, got {n}"));
    }
    reference_rule(RuleFamily::NewtonCotesClosed, n)?.mapped(0.0, 1.0)
}

/// Closed rule of the given family on `[a, b]`.
pub fn basic_rule(family: RuleFamily, n: usize, a: f64, b: f64) -> Result<QuadratureRule> {
    match family {
        RuleFamily::GaussLobatto => gauss_lobatto(n, a, b),
        RuleFamily::NewtonCotesClosed => newton_cotes_closed(n)?.mapped(a, b),
    }
}

fn closed_form_lobatto(n: usize) -> Option<QuadratureRule> {
    let (nodes, weights) = match n {
        2 => (vec![-1.0, 1.0], vec![1.0, 1.0]),
        3 => (vec![-1.0, 0.0, 1.0], vec![1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0]),
        _ => return None,
    };
    Some(QuadratureRule {
        family: RuleFamily::GaussLobatto,
        a: -1.0,
        b: 1.0,
        nodes,
        weights,
    })
}

fn lobatto_reference_eigen(n: usize) -> Result<QuadratureRule> {
    if let Some(rule) = closed_form_lobatto(n) {
        return Ok(rule);
    }
    // Legendre Jacobi matrix of order n - 1.
    let order = n - 1;
    let offdiag: Vec<f64> = (1..order)
        .map(|i| {
            let i = i as f64;
            i / ((2.0 * i - 1.0) * (2.0 * i + 1.0)).sqrt()
        })
        .collect();
    let jacobi = DMatrix::from_fn(order, order, |r, c| {
        if r + 1 == c {
            offdiag[r]
        } else if c + 1 == r {
            offdiag[c]
        } else {
            0.0
        }
    });
    let mut unit_last = DVector::zeros(order);
    unit_last[order - 1] = 1.0;
    let identity = DMatrix::<f64>::identity(order, order);
    let plus = (&jacobi + &identity)
        .lu()
        .solve(&unit_last)
        .ok_or_else(|| Error::NumericalFailure("singular J + I in Lobatto bordering".into()))?;
    let minus = (&jacobi - &identity)
        .lu()
        .solve(&unit_last)
        .ok_or_else(|| Error::NumericalFailure("singular J - I in Lobatto bordering".into()))?;
    // [1 -g; 1 -m] [alpha; beta^2] = [-1; 1]
    let g = plus[order - 1];
    let m = minus[order - 1];
    let det = g - m;
    if det == 0.0 {
        return Err(Error::NumericalFailure("degenerate Lobatto bordering system".into()));
    }
    let beta_sq = 2.0 / det;
    let alpha = -1.0 + g * beta_sq;
    if beta_sq <= 0.0 {
        return Err(Error::NumericalFailure("negative bordering coefficient".into()));
    }
    let beta = beta_sq.sqrt();

    let mut bordered = DMatrix::<f64>::zeros(n, n);
    bordered.view_mut((0, 0), (order, order)).copy_from(&jacobi);
    bordered[(order - 1, order)] = beta;
    bordered[(order, order - 1)] = beta;
    bordered[(order, order)] = alpha;

    let eig = SymmetricEigen::try_new(bordered, f64::EPSILON, 0)
        .ok_or_else(|| Error::NumericalFailure("bordered Jacobi eigensolve did not converge".into()))?;
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let v0 = eig.eigenvectors[(0, k)];
            (eig.eigenvalues[k], 2.0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let (mut nodes, mut weights): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    nodes[0] = -1.0;
    nodes[n - 1] = 1.0;
    symmetrize(&mut nodes, &mut weights);
    Ok(QuadratureRule {
        family: RuleFamily::GaussLobatto,
        a: -1.0,
        b: 1.0,
        nodes,
        weights,
    })
}

/// Legendre `P_{k-1}(x)` and `P_k(x)` by the three term recurrence.
fn legendre_pair(k: usize, x: f64) -> (f64, f64) {
    let (mut prev, mut cur) = (1.0, x);
    if k == 0 {
        return (0.0, 1.0);
    }
    for j in 1..k {
        let j = j as f64;
        let next = ((2.0 * j + 1.0) * x * cur - j * prev) / (j + 1.0);
        prev = cur;
        cur = next;
    }
    (prev, cur)
}

fn lobatto_reference_newton(n: usize) -> Result<QuadratureRule> {
    let degree = n - 1;
    let nf = n as f64;
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        // Chebyshev-Gauss-Lobatto starting guess.
        let mut x = -(std::f64::consts::PI * i as f64 / degree as f64).cos();
        let mut converged = false;
        for _ in 0..MAX_ITERATIONS {
            let (p_prev, p) = legendre_pair(degree, x);
            let step = (x * p - p_prev) / (nf * p);
            x -= step;
            if step.abs() <= NODE_TOLERANCE {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NumericalFailure(format!(
                "Newton iteration for Lobatto node {i} of {n} did not converge"
            )));
        }
        let (_, p) = legendre_pair(degree, x);
        nodes.push(x);
        weights.push(2.0 / (nf * degree as f64 * p * p));
    }
    nodes[0] = -1.0;
    nodes[n - 1] = 1.0;
    symmetrize(&mut nodes, &mut weights);
    Ok(QuadratureRule {
        family: RuleFamily::GaussLobatto,
        a: -1.0,
        b: 1.0,
        nodes,
        weights,
    })
}

/// Average mirror pairs about the origin so the reference rule is exactly symmetric.
fn symmetrize(nodes: &mut [f64], weights: &mut [f64]) {
    let n = nodes.len();
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (nodes[j] - nodes[i]);
        let w = 0.5 * (weights[i] + weights[j]);
        nodes[i] = -x;
        nodes[j] = x;
        weights[i] = w;
        weights[j] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
}

/// Integer Newton-Cotes weights, column `n - 2` holds the `n` point rule.
const NEWTON_COTES_TABLE: [[i64; 10]; 11] = [
    [1, 1, 1, 7, 19, 41, 751, 989, 2857, 16067],
    [1, 4, 3, 32, 75, 216, 3577, 5888, 15741, 106300],
    [0, 1, 3, 12, 50, 27, 1323, -928, 1080, -48525],
    [0, 0, 1, 32, 50, 272, 2989, 10496, 19344, 272400],
    [0, 0, 0, 7, 75, 27, 2989, -4540, 5778, -260550],
    [0, 0, 0, 0, 19, 216, 1323, 10496, 5778, 427368],
    [0, 0, 0, 0, 0, 41, 3577, -928, 19344, -260550],
    [0, 0, 0, 0, 0, 0, 751, 5888, 1080, 272400],
    [0, 0, 0, 0, 0, 0, 0, 989, 15741, -48525],
    [0, 0, 0, 0, 0, 0, 0, 0, 2857, 106300],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 16067],
];

fn newton_cotes_reference(n: usize) -> Result<QuadratureRule> {
    if !(2..=11).contains(&n) {
        return invalid(format!("closed Newton-Cotes rules are tabulated for 2 <= n <= 11, got {n}"));
    }
    let column = n - 2;
    let ints: Vec<i64> = (0..n).map(|r| NEWTON_COTES_TABLE[r][column]).collect();
    let total: i64 = ints.iter().sum();
    // Reference interval is [-1, 1], so weights sum to 2.
    let weights = ints.iter().map(|&k| 2.0 * k as f64 / total as f64).collect();
    let step = 2.0 / (n - 1) as f64;
    let mut nodes: Vec<f64> = (0..n).map(|j| -1.0 + step * j as f64).collect();
    nodes[n - 1] = 1.0;
    Ok(QuadratureRule {
        family: RuleFamily::NewtonCotesClosed,
        a: -1.0,
        b: 1.0,
        nodes,
        weights,
    })
}

/// Error constant `C(p)` of a degree `p` Gauss-Lobatto rule on an interval of width `h`,
/// in the per-interval error model `e = C(p) h^(p+2) f^(p+1)(ξ)`.
pub fn error_constant(p: i64) -> Result<f64> {
    if p < 1 || p % 2 == 0 {
        return invalid(format!("error constant needs an odd positive degree, got {p}"));
    }
    let factorial = |k: i64| -> f64 { (1..=k).map(|i| i as f64).product() };
    let pf = p as f64;
    let half = factorial((p - 1) / 2);
    let full = factorial(p + 1);
    Ok(-(pf + 3.0) * (pf + 5.0) * half.powi(4) / (4.0 * (pf + 2.0) * full.powi(3)))
}

/// `Q(x^(2n-2)) - ∫₀¹ x^(2n-2) dx` for the `n` point Gauss-Lobatto rule on `[0, 1]`:
/// `n (n-1)³ ((n-2)!)⁴ / ((2n-1) ((2n-2)!)²)`. Positive, and below `1e-6` from `n = 7`.
pub fn lobatto_remainder(n: usize) -> Result<f64> {
    if n < 2 {
        return invalid(format!("a Gauss-Lobatto rule needs at least 2 points, got {n}"));
    }
    let factorial = |k: usize| -> f64 { (1..=k).map(|i| i as f64).product() };
    let nf = n as f64;
    Ok(nf * (nf - 1.0).powi(3) * factorial(n - 2).powi(4)
        / ((2.0 * nf - 1.0) * factorial(2 * n - 2).powi(2)))
}
