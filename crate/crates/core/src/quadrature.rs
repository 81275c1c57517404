//! Point sets, discrete measures and quadrature rules exact for products of
//! weighted polynomials.
//!
//! A rule of order `n` on points `y_1 < ... < y_{M+1}` puts signed masses
//! `w_1, ..., w_M` on the first `M` points so that
//!
//! ```text
//! int P(y) Q(y) dy = sum_k w_k P(y_k) Q(y_k),   P, Q in Pi_n.
//! ```
//!
//! Products `PQ` are exactly the functions `R(y) exp(-y^2)` with
//! `deg R <= 2 ceil(n^2) - 2`, which are spanned by `phi_m(y) = psi_m(y sqrt 2)`.
//! The weights are the minimum Euclidean norm solution of the moment system
//! `sum_k w_k phi_m(y_k) = int phi_m`, which is well conditioned because the
//! `phi_m` are bounded and nearly orthogonal on a fine point set.

use std::f64::consts::SQRT_2;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermite::{dot, psi_integrals, psi_into, space_dimension, WeightedPolynomial};
use crate::integrate::PanelRule;
use crate::reduce::chunked_sum;

/// Target for the relative moment residual of a solved rule.
pub const SOLVER_TOLERANCE: f64 = 1e-8;

/// Rank threshold on `|R_ii| / max |R_jj|` in the dense solver.
const RANK_TOLERANCE: f64 = 1e-12;

/// Moment systems with more rows than this are solved matrix-free.
const DENSE_MAX_ROWS: usize = 255;

/// Strictly increasing points `y_1 < ... < y_{M+1}` with `M >= 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    ys: Vec<f64>,
}

impl PointSet {
    /// Sorts the input; duplicates and non-finite values are rejected.
    pub fn new(mut ys: Vec<f64>) -> Result<Self> {
        if ys.iter().any(|y| !y.is_finite()) {
            return Err(Error::domain("points must be finite"));
        }
        ys.sort_by(f64::total_cmp);
        if ys.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::domain("points must be distinct"));
        }
        if ys.len() < 2 {
            return Err(Error::domain(format!("a point set needs at least 2 points, got {}", ys.len())));
        }
        Ok(Self { ys })
    }

    /// Equispaced points whose `M` mass-carrying points are symmetric about 0
    /// and cover `[-half_width, half_width]`; the final point closes the last gap.
    pub fn equispaced_covering(half_width: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) || !(half_width > 0.0) {
            return Err(Error::domain("equispaced points need positive step and half width"));
        }
        let m = (2.0 * half_width / step).ceil() as usize + 1;
        let centre = (m as f64 - 1.0) / 2.0;
        let mut ys: Vec<f64> = (0..m).map(|i| (i as f64 - centre) * step).collect();
        ys.push(ys[m - 1] + step);
        Self::new(ys)
    }

    pub fn points(&self) -> &[f64] {
        &self.ys
    }

    /// `M`, the number of points carrying mass.
    pub fn mass_count(&self) -> usize {
        self.ys.len() - 1
    }

    pub fn first(&self) -> f64 {
        self.ys[0]
    }

    pub fn last(&self) -> f64 {
        self.ys[self.ys.len() - 1]
    }

    /// `y_{k+1} - y_k` for `k = 1..M`.
    pub fn gaps(&self) -> Vec<f64> {
        self.ys.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.ys.iter().map(|y| y * factor).collect())
    }
}

/// Maximum consecutive gap of a point set.
pub fn density_content(points: &PointSet) -> f64 {
    points.gaps().into_iter().fold(0.0, f64::max)
}

/// Signed masses on the first `M` points of a [`PointSet`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    points: PointSet,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(points: PointSet, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != points.mass_count() {
            return Err(Error::domain(format!(
                "expected {} weights for {} points, got {}",
                points.mass_count(),
                points.points().len(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::domain("weights must be finite"));
        }
        Ok(Self { points, weights })
    }

    /// A measure from nodes and weights of an arbitrary rule; `upper` closes the last gap.
    pub fn from_nodes(nodes: &[f64], weights: &[f64], upper: f64) -> Result<Self> {
        let mut ys = nodes.to_vec();
        ys.push(upper);
        let points = PointSet::new(ys)?;
        if points.points()[..nodes.len()] != *nodes {
            return Err(Error::domain("rule nodes must be increasing and below the closing point"));
        }
        Self::new(points, weights.to_vec())
    }

    /// The composite Gauss–Legendre rule of [`PanelRule`] as a discrete measure.
    pub fn from_panel_rule(rule: &PanelRule) -> Result<Self> {
        Self::from_nodes(rule.nodes(), rule.weights(), rule.upper() + 1.0)
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    /// The mass-carrying points `y_1..y_M`.
    pub fn support(&self) -> &[f64] {
        &self.points.points()[..self.weights.len()]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_variation(&self) -> f64 {
        self.weights.iter().map(|w| w.abs()).sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { points: self.points.clone(), weights: self.weights.iter().map(|w| w * factor).collect() }
    }

    /// `sum_k w_k f(y_k)`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.support().iter().zip(&self.weights).map(|(y, w)| w * f(*y)).sum()
    }
}

/// Estimate of `sup_{x,r} |nu|(B(x,r)) / (r + 1/t)`.
///
/// Centres run over the support and radii over `r = 0` (the point-mass limit)
/// and `2^k / t` for `-2 <= k <= ceil(log2(span * t))`.
pub fn regularity_norm(measure: &DiscreteMeasure, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::domain(format!("regularity scale must be positive, got {t}")));
    }
    let support = measure.support();
    if support.is_empty() {
        return Err(Error::domain("regularity norm of an empty measure"));
    }
    let mut prefix = Vec::with_capacity(support.len() + 1);
    prefix.push(0.0);
    for w in measure.weights() {
        prefix.push(prefix[prefix.len() - 1] + w.abs());
    }
    let span = support[support.len() - 1] - support[0];
    let kmax = (span * t).max(1.0).log2().ceil() as i32;
    let mut radii = vec![0.0];
    radii.extend((-2..=kmax).map(|k| 2f64.powi(k) / t));

    let best = support
        .par_iter()
        .map(|&x| {
            radii
                .iter()
                .map(|&r| {
                    let lo = support.partition_point(|y| *y < x - r);
                    let hi = support.partition_point(|y| *y <= x + r);
                    (prefix[hi] - prefix[lo]) / (r + 1.0 / t)
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    Ok(best)
}

/// The constants `C` and `D` in the coverage intervals
/// `A_n = n sqrt2 (1 + C n^{-4/3})` and `B_n = n sqrt2 (1 + D n^{-4/3})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageConstants {
    pub c: f64,
    pub d: f64,
}

impl Default for CoverageConstants {
    /// Values found by calibration at `n` in {2, 4, 8, 16}.
    fn default() -> Self {
        Self { c: 1.0, d: 1.0 }
    }
}

impl CoverageConstants {
    pub fn new(c: f64, d: f64) -> Result<Self> {
        if !(c > 0.0 && d > 0.0) {
            return Err(Error::domain("coverage constants must be positive"));
        }
        Ok(Self { c, d })
    }

    pub fn a_n(&self, n: f64) -> f64 {
        n * SQRT_2 * (1.0 + self.c * n.powf(-4.0 / 3.0))
    }

    pub fn b_n(&self, n: f64) -> f64 {
        n * SQRT_2 * (1.0 + self.d * n.powf(-4.0 / 3.0))
    }

    /// `A'_n = 2n (1 + C n^{-4/3})`, the coverage in the variable `x = y sqrt2`.
    pub fn a_prime_n(&self, n: f64) -> f64 {
        2.0 * n * (1.0 + self.c * n.powf(-4.0 / 3.0))
    }
}

/// Outcome of [`admissible_order`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Admissibility {
    Admissible { n: f64 },
    Rejected { n: f64, required: (f64, f64), available: (f64, f64) },
}

impl Admissibility {
    pub fn order(&self) -> Option<f64> {
        match self {
            Admissibility::Admissible { n } => Some(*n),
            Admissibility::Rejected { .. } => None,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Admissibility::Admissible { n } => format!("admissible order n = {n}"),
            Admissibility::Rejected { n, required, available } => format!(
                "order n = {n} needs points covering [{}, {}], but they span [{}, {}]",
                required.0, required.1, available.0, available.1
            ),
        }
    }
}

/// `n = alpha / delta(C)` if the points cover `[-A_n, A_n]`.
pub fn admissible_order(points: &PointSet, alpha: f64, constants: &CoverageConstants) -> Result<Admissibility> {
    if !(alpha > 0.0) {
        return Err(Error::domain(format!("alpha must be positive, got {alpha}")));
    }
    let n = alpha / density_content(points);
    let a = constants.a_n(n);
    let (lo, hi) = (points.first(), points.last());
    if lo <= -a && hi >= a {
        Ok(Admissibility::Admissible { n })
    } else {
        Ok(Admissibility::Rejected { n, required: (-a, a), available: (lo, hi) })
    }
}

/// A discrete measure reproducing `int PQ` for `P, Q in Pi_order`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub measure: DiscreteMeasure,
    pub order: f64,
    /// Maximum moment defect relative to `max_m |int phi_m|`.
    pub residual: f64,
    pub regularity_norm: f64,
    pub alpha_used: Option<f64>,
    /// Residual above [`SOLVER_TOLERANCE`].
    pub flagged: bool,
}

impl QuadratureRule {
    pub fn support(&self) -> &[f64] {
        self.measure.support()
    }

    pub fn weights(&self) -> &[f64] {
        self.measure.weights()
    }

    /// `max_k |w_k| / (y_{k+1} - y_k)`.
    pub fn max_weight_ratio(&self) -> f64 {
        self.measure
            .weights()
            .iter()
            .zip(self.measure.points().gaps())
            .map(|(w, g)| w.abs() / g)
            .fold(0.0, f64::max)
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha_used = Some(alpha);
        self
    }
}

/// How [`solve_mz_weights_with`] solves the moment system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolveMethod {
    /// Dense QR for small systems, conjugate gradients otherwise.
    #[default]
    Auto,
    /// Householder QR of the transposed moment matrix.
    DenseQr,
    /// Conjugate gradients on the normal equations of the second kind,
    /// `(Phi Phi^T) z = b`, `w = Phi^T z`, never forming `Phi`.
    MatrixFree,
}

/// Number of moment rows for a rule of order `n`: `2 ceil(n^2) - 1`.
pub fn moment_count(n: f64) -> usize {
    2 * space_dimension(n) - 1
}

/// `int phi_m(y) dy = psi_integral(m) / sqrt2` for `m < rows`.
pub fn moment_targets(rows: usize) -> Vec<f64> {
    psi_integrals(rows).into_iter().map(|v| v / SQRT_2).collect()
}

/// Minimum-norm solution of the moment system for order `n`.
pub fn solve_mz_weights(points: &PointSet, n: f64) -> Result<QuadratureRule> {
    solve_mz_weights_with(points, n, SolveMethod::Auto)
}

pub fn solve_mz_weights_with(points: &PointSet, n: f64, method: SolveMethod) -> Result<QuadratureRule> {
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::domain(format!("quadrature order must be positive, got {n}")));
    }
    let rows = moment_count(n);
    let m = points.mass_count();
    if m < rows {
        return Err(Error::domain(format!(
            "order {n} needs at least {rows} mass points for {rows} moments, got {m}"
        )));
    }
    let support = &points.points()[..m];
    let targets = moment_targets(rows);
    let method = match method {
        SolveMethod::Auto if rows <= DENSE_MAX_ROWS => SolveMethod::DenseQr,
        SolveMethod::Auto => SolveMethod::MatrixFree,
        other => other,
    };
    let weights = match method {
        SolveMethod::DenseQr => dense_min_norm(support, &targets)?,
        _ => matrix_free_min_norm(support, &targets)?,
    };
    let residual = moment_residual(support, &weights, &targets);
    let measure = DiscreteMeasure::new(points.clone(), weights)?;
    let regularity = regularity_norm(&measure, n)?;
    Ok(QuadratureRule {
        measure,
        order: n,
        residual,
        regularity_norm: regularity,
        alpha_used: None,
        flagged: !(residual <= SOLVER_TOLERANCE),
    })
}

#[inline]
fn moment_basis_into(y: f64, out: &mut [f64]) {
    psi_into(y * SQRT_2, out);
}

/// `max_m |sum_k w_k phi_m(y_k) - b_m| / max_m |b_m|`.
pub fn moment_residual(support: &[f64], weights: &[f64], targets: &[f64]) -> f64 {
    let applied = apply_moments(support, weights, targets.len());
    let scale = targets.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    applied.iter().zip(targets).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale
}

/// `Phi w`: the moments of the measure `sum w_k delta_{y_k}`.
fn apply_moments(support: &[f64], weights: &[f64], rows: usize) -> Vec<f64> {
    chunked_sum(support.len(), rows, |range, acc| {
        let mut buf = vec![0.0; rows];
        for k in range {
            moment_basis_into(support[k], &mut buf);
            for (a, b) in acc.iter_mut().zip(&buf) {
                *a += weights[k] * b;
            }
        }
    })
}

/// `Phi^T z`: `w_k = sum_m z_m phi_m(y_k)`.
fn apply_transpose(support: &[f64], z: &[f64]) -> Vec<f64> {
    let rows = z.len();
    support
        .par_iter()
        .map_init(
            || vec![0.0; rows],
            |buf, y| {
                moment_basis_into(*y, buf);
                dot(z, buf)
            },
        )
        .collect()
}

fn dense_min_norm(support: &[f64], targets: &[f64]) -> Result<Vec<f64>> {
    let rows = targets.len();
    let m = support.len();
    // A = Phi^T, M x rows, filled row by row from the recurrence.
    let mut a = DMatrix::<f64>::zeros(m, rows);
    let mut buf = vec![0.0; rows];
    for (k, y) in support.iter().enumerate() {
        moment_basis_into(*y, &mut buf);
        for (j, v) in buf.iter().enumerate() {
            a[(k, j)] = *v;
        }
    }
    let qr = a.qr();
    let r = qr.r();
    let diag: Vec<f64> = (0..rows).map(|i| r[(i, i)].abs()).collect();
    let dmax = diag.iter().cloned().fold(0.0, f64::max);
    let dmin = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(dmin > RANK_TOLERANCE * dmax) {
        return Err(Error::Solver(format!(
            "moment matrix is rank deficient (min/max pivot {:.3e})",
            dmin / dmax
        )));
    }
    let q = qr.q();
    let rt = r.transpose();
    let solve = |rhs: &DVector<f64>| -> Result<DVector<f64>> {
        let z = rt
            .solve_lower_triangular(rhs)
            .ok_or_else(|| Error::Solver("triangular solve failed".into()))?;
        Ok(&q * z)
    };
    let b = DVector::from_column_slice(targets);
    let mut w = solve(&b)?;
    // one step of iterative refinement
    let applied = apply_moments(support, w.as_slice(), rows);
    let resid = DVector::from_iterator(rows, targets.iter().zip(&applied).map(|(t, a)| t - a));
    w += solve(&resid)?;
    Ok(w.as_slice().to_vec())
}

fn matrix_free_min_norm(support: &[f64], targets: &[f64]) -> Result<Vec<f64>> {
    let rows = targets.len();
    let gram = |z: &[f64]| apply_moments(support, &apply_transpose(support, z), rows);
    let norm = |v: &[f64]| dot(v, v).sqrt();
    let bnorm = norm(targets);
    let mut z = vec![0.0; rows];
    let mut r = targets.to_vec();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    let max_iter = 20 * rows.min(500) + 50;
    for _ in 0..max_iter {
        if rr.sqrt() <= 1e-13 * bnorm {
            break;
        }
        let gp = gram(&p);
        let pgp = dot(&p, &gp);
        if !(pgp > 0.0) {
            return Err(Error::Solver("moment Gram matrix is not positive definite".into()));
        }
        let step = rr / pgp;
        for i in 0..rows {
            z[i] += step * p[i];
            r[i] -= step * gp[i];
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        rr = rr_new;
        for i in 0..rows {
            p[i] = r[i] + beta * p[i];
        }
    }
    if !(rr.sqrt() <= 1e-10 * bnorm) {
        return Err(Error::Solver(format!(
            "conjugate gradients stalled at relative residual {:.3e}",
            rr.sqrt() / bnorm
        )));
    }
    Ok(apply_transpose(support, &z))
}

/// Standard-normal coefficient vectors of length `dim`, drawn in sequence.
pub fn random_expansions(count: usize, dim: usize, rng: &mut ChaCha8Rng) -> Vec<WeightedPolynomial> {
    (0..count)
        .map(|_| WeightedPolynomial::new((0..dim).map(|_| StandardNormal.sample(rng)).collect()))
        .collect()
}

/// Worst normalized defect `|int PQ - sum w_k P(y_k) Q(y_k)| / (|P|_2 |Q|_2)` over
/// random `P, Q in Pi_order` with standard-normal coefficients.
///
/// `int PQ` is the coefficient dot product, exact by orthonormality.
pub fn verify_quadrature(rule: &QuadratureRule, trials: usize, seed: u64) -> f64 {
    let dim = space_dimension(rule.order);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ps = random_expansions(trials, dim, &mut rng);
    let qs = random_expansions(trials, dim, &mut rng);
    let support = rule.support();
    let weights = rule.weights();
    let discrete = chunked_sum(support.len(), trials, |range, acc| {
        let mut buf = vec![0.0; dim];
        for k in range {
            psi_into(support[k], &mut buf);
            for t in 0..trials {
                acc[t] += weights[k] * dot(ps[t].coeffs(), &buf) * dot(qs[t].coeffs(), &buf);
            }
        }
    });
    (0..trials)
        .map(|t| {
            let exact = dot(ps[t].coeffs(), qs[t].coeffs());
            (exact - discrete[t]).abs() / (ps[t].l2_norm() * qs[t].l2_norm())
        })
        .fold(0.0, f64::max)
}

/// `sum |w_k| / n^beta`.
pub fn bounded_variation_check(rule: &QuadratureRule, beta: f64) -> f64 {
    rule.measure.total_variation() / rule.order.powf(beta)
}

/// A closed interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// `[-2n-1, 2n+1]`, the window outside which elements of `Pi_n` are negligible.
pub fn range_truncation(n: f64) -> Interval {
    Interval { lo: -2.0 * n - 1.0, hi: 2.0 * n + 1.0 }
}

/// Panel width resolving every `psi_j` with `sqrt(j) < n` (node spacing <= 1/(10n)).
pub fn resolving_panel_width(n: f64) -> f64 {
    (0.25f64).min(3.2 / n.max(1.0))
}

/// `int |P|` with the oracle panel rule on a window covering the support of `P`.
pub fn l1_norm(p: &WeightedPolynomial, extra: Option<Interval>) -> f64 {
    l1_norms(std::slice::from_ref(p), extra)[0]
}

/// [`l1_norm`] for several expansions, sharing the basis evaluations.
pub fn l1_norms(ps: &[WeightedPolynomial], extra: Option<Interval>) -> Vec<f64> {
    let dim = ps.iter().map(|p| p.coeffs().len()).max().unwrap_or(0);
    if dim == 0 {
        return vec![0.0; ps.len()];
    }
    let order = (dim as f64).sqrt().max(1.0);
    let mut win = range_truncation(order);
    if let Some(e) = extra {
        win = Interval { lo: win.lo.min(e.lo), hi: win.hi.max(e.hi) };
    }
    let rule = PanelRule::new(win.lo, win.hi, resolving_panel_width(order), &[]).expect("finite window");
    weighted_abs_sums(ps, rule.nodes(), rule.weights(), dim)
}

/// `sum_k w_k |P(x_k)|` for each `P`.
fn weighted_abs_sums(ps: &[WeightedPolynomial], xs: &[f64], ws: &[f64], dim: usize) -> Vec<f64> {
    chunked_sum(xs.len(), ps.len(), |range, acc| {
        let mut buf = vec![0.0; dim];
        for k in range {
            psi_into(xs[k], &mut buf);
            for (a, p) in acc.iter_mut().zip(ps) {
                *a += ws[k] * dot(p.coeffs(), &buf[..p.coeffs().len()]).abs();
            }
        }
    })
}

/// `sum_k (x_{k+1} - x_k) |P(x_k)| / int |P|`.
pub fn mz_sandwich_ratio(points: &PointSet, p: &WeightedPolynomial) -> f64 {
    mz_sandwich_ratios(points, std::slice::from_ref(p))[0]
}

pub fn mz_sandwich_ratios(points: &PointSet, ps: &[WeightedPolynomial]) -> Vec<f64> {
    let xs = points.points();
    let m = points.mass_count();
    let dim = ps.iter().map(|p| p.coeffs().len()).max().unwrap_or(0);
    let riemann = weighted_abs_sums(ps, &xs[..m], &points.gaps(), dim);
    let l1 = l1_norms(ps, Some(Interval { lo: points.first(), hi: points.last() }));
    riemann.iter().zip(l1).map(|(r, l)| r / l).collect()
}

/// Result of checking one order during α calibration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationCheck {
    pub n: f64,
    pub points: usize,
    pub residual: f64,
    pub sandwich_min: f64,
    pub sandwich_max: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub alpha: f64,
    pub constants: CoverageConstants,
    pub checks: Vec<CalibrationCheck>,
}

/// Equispaced points with gap `alpha / n` covering `[-A_n - 1, A_n + 1]`.
pub fn calibrated_points(n: f64, alpha: f64, constants: &CoverageConstants) -> Result<PointSet> {
    PointSet::equispaced_covering(constants.a_n(n) + 1.0, alpha / n)
}

/// Checks one `(n, alpha)`: the rule residual and the sandwich ratios of
/// `trials` random `P in Pi_{n sqrt2}` on the points `x_k = y_k sqrt2`.
pub fn check_order(
    n: f64,
    alpha: f64,
    constants: &CoverageConstants,
    trials: usize,
    seed: u64,
) -> Result<(QuadratureRule, CalibrationCheck)> {
    let points = calibrated_points(n, alpha, constants)?;
    let rule = solve_mz_weights(&points, n)?.with_alpha(alpha);
    let xs = points.scaled(SQRT_2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ps = random_expansions(trials, space_dimension(n * SQRT_2), &mut rng);
    let ratios = mz_sandwich_ratios(&xs, &ps);
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().cloned().fold(0.0, f64::max);
    let pass = rule.residual <= SOLVER_TOLERANCE && lo >= 0.75 && hi <= 1.25;
    let check = CalibrationCheck {
        n,
        points: points.points().len(),
        residual: rule.residual,
        sandwich_min: lo,
        sandwich_max: hi,
        pass,
    };
    Ok((rule, check))
}

/// Halves α from 0.5 until every order in `orders` passes [`check_order`].
pub fn calibrate_alpha(orders: &[f64], constants: &CoverageConstants, trials: usize, seed: u64) -> Result<Calibration> {
    let mut alpha = 0.5;
    while alpha >= 1.0 / 64.0 {
        let checks = orders
            .iter()
            .map(|&n| check_order(n, alpha, constants, trials, seed).map(|(_, c)| c))
            .collect::<Result<Vec<_>>>()?;
        if checks.iter().all(|c| c.pass) {
            return Ok(Calibration { alpha, constants: *constants, checks });
        }
        alpha /= 2.0;
    }
    Err(Error::Solver("no alpha down to 1/64 satisfies the calibration checks".into()))
}
