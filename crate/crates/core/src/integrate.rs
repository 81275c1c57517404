//! Composite Gauss–Legendre panel rules.
//!
//! Every Lebesgue-side integral in the crate goes through [`PanelRule`]: a
//! fixed-order Gauss–Legendre rule replicated over panels of bounded width,
//! with geometric refinement toward declared breakpoints (points where the
//! integrand is only Hölder continuous, such as `sqrt(|x|)` at the origin).

use crate::error::{Error, Result};

/// Nodes per panel used by the oracle integrator.
pub const PANEL_ORDER: usize = 32;

/// Default panel width of the oracle integrator.
pub const ORACLE_PANEL_WIDTH: f64 = 0.25;

/// Half-width of the oracle integration window. Every Hermite function used in
/// the crate is below 1e-300 beyond it.
pub const ORACLE_HALF_WIDTH: f64 = 40.0;

const GRADING_RATIO: f64 = 0.15;
const GRADING_LEVELS: usize = 18;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1, "Gauss-Legendre order must be positive");
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A composite quadrature rule on a bounded interval.
#[derive(Debug, Clone)]
pub struct PanelRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    lower: f64,
    upper: f64,
}

impl PanelRule {
    /// Builds a rule on `[lower, upper]` with panels no wider than `max_width`.
    ///
    /// Breakpoints inside the interval become panel edges, and the panels
    /// touching a breakpoint are refined geometrically toward it.
    pub fn new(lower: f64, upper: f64, max_width: f64, breakpoints: &[f64]) -> Result<Self> {
        Self::with_order(lower, upper, max_width, breakpoints, PANEL_ORDER)
    }

    pub fn with_order(
        lower: f64,
        upper: f64,
        max_width: f64,
        breakpoints: &[f64],
        order: usize,
    ) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite() && lower < upper) {
            return Err(Error::domain(format!(
                "panel rule needs a finite interval with lower < upper, got [{lower}, {upper}]"
            )));
        }
        if !(max_width > 0.0) || order == 0 {
            return Err(Error::domain("panel width and order must be positive"));
        }

        let mut cuts: Vec<f64> = breakpoints
            .iter()
            .copied()
            .filter(|b| b.is_finite() && *b > lower && *b < upper)
            .collect();
        cuts.push(lower);
        cuts.push(upper);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let is_break = |x: f64| breakpoints.contains(&x);

        let mut panels: Vec<(f64, f64)> = Vec::new();
        for seg in cuts.windows(2) {
            let (a, b) = (seg[0], seg[1]);
            let count = ((b - a) / max_width).ceil().max(1.0) as usize;
            let width = (b - a) / count as f64;
            for i in 0..count {
                let l = a + i as f64 * width;
                let r = if i + 1 == count { b } else { a + (i + 1) as f64 * width };
                let left_sing = i == 0 && is_break(a);
                let right_sing = i + 1 == count && is_break(b);
                push_graded(&mut panels, l, r, left_sing, right_sing);
            }
        }

        let (gx, gw) = gauss_legendre(order);
        let mut nodes = Vec::with_capacity(panels.len() * order);
        let mut weights = Vec::with_capacity(panels.len() * order);
        for (l, r) in panels {
            let half = 0.5 * (r - l);
            let mid = 0.5 * (r + l);
            for (x, w) in gx.iter().zip(&gw) {
                nodes.push(mid + half * x);
                weights.push(half * w);
            }
        }
        Ok(Self { nodes, weights, lower, upper })
    }

    /// The oracle integrator: panels of width 0.25 on `[-40, 40]`.
    pub fn oracle() -> Self {
        Self::new(-ORACLE_HALF_WIDTH, ORACLE_HALF_WIDTH, ORACLE_PANEL_WIDTH, &[])
            .expect("oracle window is valid")
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(*x)).sum()
    }
}

fn push_graded(panels: &mut Vec<(f64, f64)>, l: f64, r: f64, left: bool, right: bool) {
    match (left, right) {
        (false, false) => panels.push((l, r)),
        (true, true) => {
            let m = 0.5 * (l + r);
            push_graded(panels, l, m, true, false);
            push_graded(panels, m, r, false, true);
        }
        (true, false) => {
            let len = r - l;
            let mut edges = vec![l];
            for k in (0..=GRADING_LEVELS).rev() {
                edges.push(l + len * GRADING_RATIO.powi(k as i32));
            }
            panels.extend(edges.windows(2).map(|e| (e[0], e[1])));
        }
        (false, true) => {
            let len = r - l;
            let mut edges = Vec::new();
            for k in 0..=GRADING_LEVELS {
                edges.push(r - len * GRADING_RATIO.powi(k as i32));
            }
            edges.push(r);
            panels.extend(edges.windows(2).map(|e| (e[0], e[1])));
        }
    }
}
