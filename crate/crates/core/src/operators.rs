//! Fourier–Hermite coefficients, the summability operators `sigma_n`, the
//! frame operators `tau_n` and reconstruction from frame levels.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::filter::{LocalizedKernel, LowPassFilter};
use crate::functions::Builtin;
use crate::hermite::{dot, psi_and_derivative_into, psi_into, space_dimension, EvalGrid, WeightedPolynomial};
use crate::integrate::PanelRule;
use crate::quadrature::{range_truncation, resolving_panel_width, DiscreteMeasure, QuadratureRule, SOLVER_TOLERANCE};
use crate::reduce::chunked_sum;

/// Smallest half-width of a Lebesgue integration window.
const MIN_HALF_WIDTH: f64 = 13.0;

/// A user-supplied analytic function.
#[derive(Clone)]
pub struct CustomFunction {
    pub name: String,
    pub f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub breakpoints: Vec<f64>,
    /// Radius beyond which `f` is negligible.
    pub support_radius: f64,
}

impl fmt::Debug for CustomFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomFunction")
            .field("name", &self.name)
            .field("breakpoints", &self.breakpoints)
            .field("support_radius", &self.support_radius)
            .finish()
    }
}

/// Samples of a function at the support of a discrete measure.
#[derive(Debug, Clone)]
pub struct SampledFunction {
    measure: DiscreteMeasure,
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(measure: DiscreteMeasure, values: Vec<f64>) -> Result<Self> {
        if values.len() != measure.support().len() {
            return Err(Error::domain(format!(
                "{} samples for a measure with {} support points",
                values.len(),
                measure.support().len()
            )));
        }
        Ok(Self { measure, values })
    }

    pub fn measure(&self) -> &DiscreteMeasure {
        &self.measure
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Debug, Clone)]
pub enum TargetFunction {
    Builtin(Builtin),
    Expansion(WeightedPolynomial),
    Custom(CustomFunction),
    Sampled(SampledFunction),
}

impl TargetFunction {
    pub fn custom<F>(name: &str, f: F, breakpoints: Vec<f64>, support_radius: f64) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        TargetFunction::Custom(CustomFunction { name: name.to_string(), f: Arc::new(f), breakpoints, support_radius })
    }

    pub fn name(&self) -> String {
        match self {
            TargetFunction::Builtin(b) => b.to_string(),
            TargetFunction::Expansion(p) => format!("expansion[{}]", p.coeffs().len()),
            TargetFunction::Custom(c) => c.name.clone(),
            TargetFunction::Sampled(s) => format!("samples[{}]", s.values.len()),
        }
    }

    pub fn is_analytic(&self) -> bool {
        !matches!(self, TargetFunction::Sampled(_))
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        self.eval_for_band(x, f64::INFINITY)
    }

    /// Value with spectral content beyond what `psi_j`, `sqrt(2j+1) <= band`, can see removed.
    pub fn eval_for_band(&self, x: f64, band: f64) -> Result<f64> {
        match self {
            TargetFunction::Builtin(b) => Ok(b.eval_for_band(x, band)),
            TargetFunction::Expansion(p) => Ok(p.eval(x)),
            TargetFunction::Custom(c) => Ok((c.f)(x)),
            TargetFunction::Sampled(_) => {
                Err(Error::domain("a sampled function can only be used with its own discrete measure"))
            }
        }
    }

    pub fn breakpoints(&self, lo: f64, hi: f64) -> Vec<f64> {
        match self {
            TargetFunction::Builtin(b) => b.breakpoints(lo, hi),
            TargetFunction::Custom(c) => c.breakpoints.iter().copied().filter(|x| lo <= *x && *x <= hi).collect(),
            _ => Vec::new(),
        }
    }

    pub fn support_radius(&self) -> f64 {
        match self {
            TargetFunction::Builtin(b) => b.support_radius(),
            TargetFunction::Expansion(p) => 2.0 * (p.coeffs().len() as f64).sqrt() + 10.0,
            TargetFunction::Custom(c) => c.support_radius,
            TargetFunction::Sampled(s) => {
                let sup = s.measure.support();
                sup[0].abs().max(sup[sup.len() - 1].abs())
            }
        }
    }

    fn frequency(&self, band: f64) -> f64 {
        match self {
            TargetFunction::Builtin(b) => b.frequency(band),
            TargetFunction::Expansion(p) => (2.0 * p.coeffs().len() as f64).sqrt(),
            _ => 1.0,
        }
    }

    /// Values at the support of `measure`.
    pub fn values_on(&self, measure: &DiscreteMeasure) -> Result<Vec<f64>> {
        match self {
            TargetFunction::Sampled(s) => {
                if s.measure.support() != measure.support() {
                    return Err(Error::domain("samples are missing at the support of the requested measure"));
                }
                Ok(s.values.clone())
            }
            _ => measure.support().iter().map(|y| self.eval(*y)).collect(),
        }
    }

    /// Lebesgue integration rule for this function against `psi_j`, `j < count`.
    pub fn lebesgue_rule(&self, count: usize) -> Result<PanelRule> {
        let order = (count as f64).sqrt().max(1.0);
        let band = (2.0 * count as f64 + 1.0).sqrt();
        let half = range_truncation(order).hi.max(MIN_HALF_WIDTH).min(self.support_radius().max(1.0));
        let width = resolving_panel_width(order).min(4.5 / self.frequency(band));
        PanelRule::new(-half, half, width, &self.breakpoints(-half, half))
    }

    /// `int |f|^2` with the Lebesgue rule of the function.
    pub fn l2_norm_sq(&self) -> Result<f64> {
        let rule = self.lebesgue_rule(1)?;
        let vals = rule.nodes().iter().map(|x| self.eval(*x)).collect::<Result<Vec<_>>>()?;
        Ok(vals.iter().zip(rule.weights()).map(|(v, w)| w * v * v).sum())
    }
}

impl From<Builtin> for TargetFunction {
    fn from(b: Builtin) -> Self {
        TargetFunction::Builtin(b)
    }
}

impl From<WeightedPolynomial> for TargetFunction {
    fn from(p: WeightedPolynomial) -> Self {
        TargetFunction::Expansion(p)
    }
}

#[derive(Debug, Clone)]
pub enum Measure {
    Lebesgue,
    Discrete(DiscreteMeasure),
}

impl Measure {
    pub fn is_lebesgue(&self) -> bool {
        matches!(self, Measure::Lebesgue)
    }
}

/// `f_hat(nu; j) = int f psi_j dnu` for `j < count`.
pub fn fourier_hermite(f: &TargetFunction, nu: &Measure, count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    match nu {
        Measure::Lebesgue => {
            let rule = f.lebesgue_rule(count)?;
            let band = (2.0 * count as f64 + 1.0).sqrt();
            let values = rule.nodes().iter().map(|x| f.eval_for_band(*x, band)).collect::<Result<Vec<_>>>()?;
            Ok(project(rule.nodes(), rule.weights(), &values, count))
        }
        Measure::Discrete(m) => {
            let values = f.values_on(m)?;
            Ok(project(m.support(), m.weights(), &values, count))
        }
    }
}

/// `sum_k w_k v_k psi_j(x_k)` for `j < count`.
fn project(xs: &[f64], ws: &[f64], values: &[f64], count: usize) -> Vec<f64> {
    chunked_sum(xs.len(), count, |range, acc| {
        let mut buf = vec![0.0; count];
        for k in range {
            let wv = ws[k] * values[k];
            if wv == 0.0 {
                continue;
            }
            psi_into(xs[k], &mut buf);
            for (a, b) in acc.iter_mut().zip(&buf) {
                *a += wv * b;
            }
        }
    })
}

/// `sum_j c_j psi_j(x)` at every point.
pub fn expansion_values(coeffs: &[f64], xs: &[f64]) -> Vec<f64> {
    let count = coeffs.len();
    xs.par_iter()
        .map_init(
            || vec![0.0; count],
            |buf, x| {
                psi_into(*x, buf);
                dot(coeffs, buf)
            },
        )
        .collect()
}

/// `sum_j c_j psi_j'(x)` at every point.
pub fn expansion_derivatives(coeffs: &[f64], xs: &[f64]) -> Vec<f64> {
    let count = coeffs.len();
    xs.par_iter()
        .map_init(
            || (vec![0.0; count], vec![0.0; count]),
            |(p, d), x| {
                psi_and_derivative_into(*x, p, d);
                dot(coeffs, d)
            },
        )
        .collect()
}

/// `sigma_n(nu; f)` on a grid, stored with its filtered coefficients.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Projection {
    pub n: f64,
    /// `h(sqrt(j)/n) f_hat(nu; j)` for `j < ceil(n^2)`.
    pub coefficients: Vec<f64>,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

impl Projection {
    pub fn from_coefficients(n: f64, coefficients: Vec<f64>, grid: &EvalGrid) -> Self {
        let values = expansion_values(&coefficients, grid.points());
        Self { n, coefficients, grid: grid.points().to_vec(), values }
    }

    pub fn eval(&self, x: f64) -> f64 {
        expansion_values(&self.coefficients, &[x])[0]
    }

    pub fn derivative_values(&self) -> Vec<f64> {
        expansion_derivatives(&self.coefficients, &self.grid)
    }
}

/// Filtered coefficients `h(sqrt(j)/n) c_j` for `j < ceil(n^2)`.
pub fn filtered(coeffs: &[f64], n: f64, filter: &LowPassFilter) -> Vec<f64> {
    let h = filter.coefficients(n);
    h.iter().zip(coeffs).map(|(h, c)| h * c).collect()
}

/// `sigma_n(nu; f)` with the default smooth filter.
pub fn sigma(n: f64, nu: &Measure, f: &TargetFunction, grid: &EvalGrid) -> Result<Projection> {
    sigma_with_filter(n, nu, f, grid, &LowPassFilter::smooth())
}

pub fn sigma_with_filter(
    n: f64,
    nu: &Measure,
    f: &TargetFunction,
    grid: &EvalGrid,
    filter: &LowPassFilter,
) -> Result<Projection> {
    check_scale(n)?;
    let coeffs = fourier_hermite(f, nu, space_dimension(n))?;
    Ok(Projection::from_coefficients(n, filtered(&coeffs, n, filter), grid))
}

/// `d/dx sigma_n(nu; f)` on a grid.
pub fn sigma_dx(n: f64, nu: &Measure, f: &TargetFunction, grid: &EvalGrid) -> Result<Vec<f64>> {
    check_scale(n)?;
    let coeffs = fourier_hermite(f, nu, space_dimension(n))?;
    Ok(expansion_derivatives(&filtered(&coeffs, n, &LowPassFilter::smooth()), grid.points()))
}

/// `int Phi_n(x, y) f(y) dnu(y)` computed through the kernel, without coefficients.
pub fn sigma_kernel_form(n: f64, nu: &Measure, f: &TargetFunction, x: f64) -> Result<f64> {
    check_scale(n)?;
    let kernel = LocalizedKernel::new(n, LowPassFilter::smooth())?;
    let (ys, ws, vs) = match nu {
        Measure::Lebesgue => {
            let rule = f.lebesgue_rule(space_dimension(n))?;
            let band = (2.0 * space_dimension(n) as f64 + 1.0).sqrt();
            let vs = rule.nodes().iter().map(|y| f.eval_for_band(*y, band)).collect::<Result<Vec<_>>>()?;
            (rule.nodes().to_vec(), rule.weights().to_vec(), vs)
        }
        Measure::Discrete(m) => (m.support().to_vec(), m.weights().to_vec(), f.values_on(m)?),
    };
    let total = chunked_sum(ys.len(), 1, |range, acc| {
        for k in range {
            acc[0] += ws[k] * vs[k] * kernel.eval(x, ys[k]);
        }
    });
    Ok(total[0])
}

fn check_scale(n: f64) -> Result<()> {
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::domain(format!("scale must be positive, got {n}")));
    }
    Ok(())
}

/// The measure used at one frame level, tagged with its MZ order.
#[derive(Debug, Clone)]
pub struct LevelMeasure {
    pub order: f64,
    pub measure: Measure,
    pub residual: f64,
}

/// Measures `nu_0, ..., nu_N` with `nu_n` exact to order `2^{n+1}`.
#[derive(Debug, Clone)]
pub struct MeasureSequence {
    levels: Vec<LevelMeasure>,
}

/// Default number of frame levels for discrete sequences (MZ order 64 at the top).
pub const DEFAULT_DISCRETE_LEVELS: usize = 5;

/// Largest supported level.
pub const MAX_LEVEL: usize = 8;

impl MeasureSequence {
    /// Lebesgue measure at levels `0..=levels`.
    pub fn lebesgue(levels: usize) -> Result<Self> {
        check_levels(levels)?;
        let levels = (0..=levels)
            .map(|n| LevelMeasure { order: level_order(n), measure: Measure::Lebesgue, residual: 0.0 })
            .collect();
        Ok(Self { levels })
    }

    /// Solved rules for levels `0, 1, ...`; rule `n` must have order at least `2^{n+1}`.
    pub fn from_rules(rules: Vec<QuadratureRule>) -> Result<Self> {
        if rules.is_empty() {
            return Err(Error::domain("a measure sequence needs at least one level"));
        }
        check_levels(rules.len() - 1)?;
        let mut levels = Vec::with_capacity(rules.len());
        for (n, rule) in rules.into_iter().enumerate() {
            if rule.order < level_order(n) {
                return Err(Error::domain(format!(
                    "level {n} needs MZ order {} but the rule has order {}",
                    level_order(n),
                    rule.order
                )));
            }
            if !(rule.residual <= SOLVER_TOLERANCE) {
                return Err(Error::domain(format!("level {n} rule has moment residual {:.3e}", rule.residual)));
            }
            levels.push(LevelMeasure { order: rule.order, measure: Measure::Discrete(rule.measure), residual: rule.residual });
        }
        Ok(Self { levels })
    }

    pub fn levels(&self) -> &[LevelMeasure] {
        &self.levels
    }

    /// Highest level `N`.
    pub fn top(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn is_lebesgue(&self) -> bool {
        self.levels.iter().all(|l| l.measure.is_lebesgue())
    }

    fn measure(&self, level: usize) -> Result<&Measure> {
        self.levels
            .get(level)
            .map(|l| &l.measure)
            .ok_or_else(|| Error::domain(format!("no measure for level {level}; sequence stops at {}", self.top())))
    }
}

/// MZ order required at level `n`: `2^{n+1}`.
pub fn level_order(level: usize) -> f64 {
    2f64.powi(level as i32 + 1)
}

/// Scale of level `n`: `2^n`.
pub fn level_scale(level: usize) -> f64 {
    2f64.powi(level as i32)
}

fn check_levels(levels: usize) -> Result<()> {
    if levels > MAX_LEVEL {
        return Err(Error::domain(format!("at most {MAX_LEVEL} levels are supported, got {levels}")));
    }
    Ok(())
}

/// `tau_level(f)` on a grid.
pub fn tau(seq: &MeasureSequence, level: usize, f: &TargetFunction, grid: &EvalGrid) -> Result<Vec<f64>> {
    let upper = sigma(level_scale(level), seq.measure(level)?, f, grid)?;
    if level == 0 {
        return Ok(upper.values);
    }
    let lower = sigma(level_scale(level - 1), seq.measure(level - 1)?, f, grid)?;
    Ok(upper.values.iter().zip(&lower.values).map(|(a, b)| a - b).collect())
}

/// Projections `sigma_{2^n}(nu_n; f)` for `n = 0..=N` and their differences.
#[derive(Debug, Clone)]
pub struct FrameDecomposition {
    grid: EvalGrid,
    projections: Vec<Projection>,
    taus: Vec<Vec<f64>>,
}

impl FrameDecomposition {
    pub fn compute(f: &TargetFunction, seq: &MeasureSequence, levels: usize, grid: &EvalGrid) -> Result<Self> {
        let coeffs = frame_coefficients(f, seq, levels)?;
        let values = expansion_values_multi(&coeffs, grid.points());
        let projections: Vec<Projection> = coeffs
            .into_iter()
            .zip(values)
            .enumerate()
            .map(|(n, (coefficients, values))| Projection {
                n: level_scale(n),
                coefficients,
                grid: grid.points().to_vec(),
                values,
            })
            .collect();
        let taus = (0..=levels)
            .map(|n| match n {
                0 => projections[0].values.clone(),
                _ => projections[n].values.iter().zip(&projections[n - 1].values).map(|(a, b)| a - b).collect(),
            })
            .collect();
        Ok(Self { grid: grid.clone(), projections, taus })
    }

    pub fn grid(&self) -> &EvalGrid {
        &self.grid
    }

    pub fn levels(&self) -> usize {
        self.projections.len() - 1
    }

    pub fn projection(&self, level: usize) -> &Projection {
        &self.projections[level]
    }

    pub fn tau_values(&self, level: usize) -> &[f64] {
        &self.taus[level]
    }

    /// Coefficients of `tau_level` in the Hermite basis.
    pub fn tau_coefficients(&self, level: usize) -> Vec<f64> {
        let coeffs: Vec<Vec<f64>> = self.projections[level.saturating_sub(1)..=level]
            .iter()
            .map(|p| p.coefficients.clone())
            .collect();
        tau_coefficients(&coeffs, coeffs.len() - 1)
    }

    /// `||tau_n||_2` for every level, exact by orthonormality.
    pub fn tau_l2_norms(&self) -> Vec<f64> {
        (0..=self.levels()).map(|n| dot(&self.tau_coefficients(n), &self.tau_coefficients(n)).sqrt()).collect()
    }

    /// `sum_n ||tau_n||_2^2 / ||f||_2^2`.
    pub fn frame_ratio(&self, f_l2_sq: f64) -> f64 {
        self.tau_l2_norms().iter().map(|v| v * v).sum::<f64>() / f_l2_sq
    }

    /// `sum_{n <= levels} tau_n` on the decomposition grid.
    pub fn partial_sum(&self, levels: usize) -> Vec<f64> {
        let mut total = vec![0.0; self.grid.len()];
        for tau in &self.taus[..=levels.min(self.levels())] {
            for (t, v) in total.iter_mut().zip(tau) {
                *t += v;
            }
        }
        total
    }

    /// CSV with columns `x, tau_0, ..., tau_N`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x");
        for n in 0..=self.levels() {
            out.push_str(&format!(",tau_{n}"));
        }
        out.push('\n');
        for (i, x) in self.grid.points().iter().enumerate() {
            out.push_str(&format!("{x:.16e}"));
            for tau in &self.taus {
                out.push_str(&format!(",{:.16e}", tau[i]));
            }
            out.push('\n');
        }
        out
    }

    /// JSON with the filtered coefficients of every level.
    pub fn to_json(&self) -> serde_json::Value {
        let levels: Vec<_> = self
            .projections
            .iter()
            .enumerate()
            .map(|(n, p)| json!({ "level": n, "scale": p.n, "coefficients": p.coefficients }))
            .collect();
        json!({ "levels": levels })
    }
}

/// Filtered coefficients of `sigma_{2^n}(nu_n; f)` for `n = 0..=levels`.
///
/// Lebesgue sequences share one coefficient computation across levels.
pub fn frame_coefficients(f: &TargetFunction, seq: &MeasureSequence, levels: usize) -> Result<Vec<Vec<f64>>> {
    if levels > seq.top() {
        return Err(Error::domain(format!("{levels} levels requested; the sequence stops at {}", seq.top())));
    }
    let filter = LowPassFilter::smooth();
    if seq.is_lebesgue() {
        let coeffs = fourier_hermite(f, &Measure::Lebesgue, space_dimension(level_scale(levels)))?;
        return Ok((0..=levels).map(|n| filtered(&coeffs, level_scale(n), &filter)).collect());
    }
    (0..=levels)
        .map(|n| {
            let s = level_scale(n);
            Ok(filtered(&fourier_hermite(f, &seq.levels[n].measure, space_dimension(s))?, s, &filter))
        })
        .collect()
}

/// `tau_n` coefficients from per-level projection coefficients.
pub fn tau_coefficients(projections: &[Vec<f64>], level: usize) -> Vec<f64> {
    let upper = &projections[level];
    if level == 0 {
        return upper.clone();
    }
    let lower = &projections[level - 1];
    upper.iter().enumerate().map(|(j, c)| c - lower.get(j).copied().unwrap_or(0.0)).collect()
}

/// Several expansions evaluated at every point, sharing the basis evaluations.
/// Returns one vector of values per expansion.
pub fn expansion_values_multi(coeff_sets: &[Vec<f64>], xs: &[f64]) -> Vec<Vec<f64>> {
    let count = coeff_sets.iter().map(Vec::len).max().unwrap_or(0);
    let rows: Vec<Vec<f64>> = xs
        .par_iter()
        .map_init(
            || vec![0.0; count],
            |buf, x| {
                psi_into(*x, buf);
                coeff_sets.iter().map(|c| dot(c, &buf[..c.len()])).collect()
            },
        )
        .collect();
    (0..coeff_sets.len()).map(|i| rows.iter().map(|r| r[i]).collect()).collect()
}

/// `sum_{n <= levels} tau_n(f)` on `grid`.
pub fn reconstruct(decomposition: &FrameDecomposition, levels: usize, grid: &EvalGrid) -> Result<Vec<f64>> {
    if levels > decomposition.levels() {
        return Err(Error::domain(format!("{levels} levels requested; {} computed", decomposition.levels())));
    }
    if grid == decomposition.grid() {
        return Ok(decomposition.partial_sum(levels));
    }
    Ok(expansion_values(&decomposition.projection(levels).coefficients, grid.points()))
}

/// `r_n = ||sigma_n(nu; f) - f||_p`.
///
/// `r_n` bounds the best approximation error from `Pi_n` above and, up to an
/// unspecified constant, the one from `Pi_{n/2}` below.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApproxErrorEstimate {
    pub n: f64,
    pub p: f64,
    pub residual: f64,
}

/// Computes `r_n` on the panel nodes of the window `[-R, R]`, `R` covering both
/// `range_truncation(n)` and the support of `f`; `p = inf` takes the max over nodes.
pub fn approx_error_estimate(f: &TargetFunction, n: f64, p: f64, nu: &Measure) -> Result<ApproxErrorEstimate> {
    check_scale(n)?;
    check_exponent(p)?;
    if !f.is_analytic() {
        return Err(Error::domain("approximation errors need a function evaluable on the whole window"));
    }
    let coeffs = filtered(&fourier_hermite(f, nu, space_dimension(n))?, n, &LowPassFilter::smooth());
    let half = range_truncation(n).hi.max(f.support_radius());
    let width = resolving_panel_width(n).min(4.5 / f.frequency(f64::INFINITY));
    let rule = PanelRule::new(-half, half, width, &f.breakpoints(-half, half))?;
    let approx = expansion_values(&coeffs, rule.nodes());
    let errors = rule.nodes().iter().zip(&approx).map(|(x, s)| Ok(f.eval(*x)? - s)).collect::<Result<Vec<_>>>()?;
    Ok(ApproxErrorEstimate { n, p, residual: lp_norm(&errors, rule.weights(), p) })
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if !(p >= 1.0) {
        return Err(Error::domain(format!("p must lie in [1, inf], got {p}")));
    }
    Ok(())
}

/// `(sum w |v|^p)^{1/p}`, or `max |v|` for `p = inf`.
pub fn lp_norm(values: &[f64], weights: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        values.iter().fold(0.0, |a, v| a.max(v.abs()))
    } else {
        values.iter().zip(weights).map(|(v, w)| w * v.abs().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// `max |v|` over a slice.
pub fn sup_norm(values: &[f64]) -> f64 {
    lp_norm(values, &[], f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{calibrated_points, random_expansions, solve_mz_weights, CoverageConstants};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grid() -> EvalGrid {
        EvalGrid::from_range(-4.0, 4.0, 0.05).unwrap()
    }

    fn mz_rule(n: f64) -> QuadratureRule {
        let pts = calibrated_points(n, 0.5, &CoverageConstants::default()).unwrap();
        solve_mz_weights(&pts, n).unwrap()
    }

    #[test]
    fn coefficients_of_psi3() {
        let c = fourier_hermite(&Builtin::Hermite(3).into(), &Measure::Lebesgue, 8).unwrap();
        for (j, v) in c.iter().enumerate() {
            let e = if j == 3 { 1.0 } else { 0.0 };
            assert!((v - e).abs() <= 1e-9, "j={j}: {v}");
        }
        let rule = mz_rule(4.0);
        let d = fourier_hermite(&Builtin::Hermite(3).into(), &Measure::Discrete(rule.measure), 8).unwrap();
        for (j, v) in d.iter().enumerate() {
            let e = if j == 3 { 1.0 } else { 0.0 };
            assert!((v - e).abs() <= 1e-6, "j={j}: {v}");
        }
    }

    #[test]
    fn even_functions_have_no_odd_coefficients() {
        for b in [Builtin::Gaussian, Builtin::SqrtAbsBump, Builtin::F1Tapered, Builtin::F2Tapered] {
            let c = fourier_hermite(&b.into(), &Measure::Lebesgue, 64).unwrap();
            for v in c.iter().skip(1).step_by(2) {
                assert!(v.abs() <= 1e-10, "{b}: {v}");
            }
        }
    }

    #[test]
    fn sampled_function_needs_matching_measure() {
        let rule = mz_rule(2.0);
        let other = mz_rule(3.0);
        let vals = TargetFunction::from(Builtin::Gaussian).values_on(&rule.measure).unwrap();
        let f = TargetFunction::Sampled(SampledFunction::new(rule.measure.clone(), vals).unwrap());
        assert!(fourier_hermite(&f, &Measure::Discrete(rule.measure.clone()), 4).is_ok());
        assert!(fourier_hermite(&f, &Measure::Discrete(other.measure), 4).is_err());
        assert!(fourier_hermite(&f, &Measure::Lebesgue, 4).is_err());
    }

    #[test]
    fn sigma_reproduces_low_order() {
        let g = grid();
        let s = sigma(4.0, &Measure::Lebesgue, &Builtin::Hermite(1).into(), &g).unwrap();
        for (x, v) in g.points().iter().zip(&s.values) {
            assert!((v - Builtin::Hermite(1).eval(*x)).abs() <= 1e-9);
        }
        let z = sigma(4.0, &Measure::Lebesgue, &Builtin::Hermite(16).into(), &g).unwrap();
        assert!(sup_norm(&z.values) <= 1e-12);
    }

    #[test]
    fn sigma_reproduces_through_quadrature() {
        let n = 8.0;
        let g = grid();
        let rule = mz_rule(n);
        let nu = Measure::Discrete(rule.measure);
        let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
        for p in random_expansions(5, space_dimension(n / 2.0), &mut rng) {
            let exact = expansion_values(p.coeffs(), g.points());
            let s = sigma(n, &nu, &p.into(), &g).unwrap();
            let err = s.values.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err <= 1e-6 * sup_norm(&exact), "{err}");
        }
    }

    #[test]
    fn kernel_and_coefficient_forms_agree() {
        let f: TargetFunction = Builtin::Gaussian.into();
        let s = sigma(6.0, &Measure::Lebesgue, &f, &EvalGrid::new(vec![-1.3, 0.0, 0.4, 2.2]).unwrap()).unwrap();
        let scale = sup_norm(&s.values);
        for (x, v) in s.grid.iter().zip(&s.values) {
            let k = sigma_kernel_form(6.0, &Measure::Lebesgue, &f, *x).unwrap();
            assert!((k - v).abs() <= 1e-9 * scale, "x={x}: {k} vs {v}");
        }
    }

    #[test]
    fn sigma_dx_examples() {
        let g = grid();
        let d = sigma_dx(2.0, &Measure::Lebesgue, &Builtin::Hermite(0).into(), &g).unwrap();
        for (x, v) in g.points().iter().zip(&d) {
            assert!((v + x * Builtin::Hermite(0).eval(*x)).abs() <= 1e-12);
        }
        let f: TargetFunction = Builtin::Gaussian.into();
        let n = 8.0;
        let dx = sigma_dx(n, &Measure::Lebesgue, &f, &g).unwrap();
        let s = sigma(n, &Measure::Lebesgue, &f, &g).unwrap();
        let h = 1e-5;
        for (i, x) in g.points().iter().enumerate().step_by(7) {
            let fd = (s.eval(x + h) - s.eval(x - h)) / (2.0 * h);
            assert!((fd - dx[i]).abs() <= 1e-4 * n * n);
        }
    }

    #[test]
    fn sigma_dx_reproduces_derivatives() {
        let n = 4.0;
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = random_expansions(1, space_dimension(n), &mut rng).remove(0);
        let d = sigma_dx(2.0 * n, &Measure::Lebesgue, &p.clone().into(), &g).unwrap();
        for (x, v) in g.points().iter().zip(&d) {
            assert!((v - p.eval_derivative(*x)).abs() <= 1e-8);
        }
    }

    #[test]
    fn tau_examples() {
        let g = grid();
        let seq = MeasureSequence::lebesgue(4).unwrap();
        let psi0: TargetFunction = Builtin::Hermite(0).into();
        for level in 1..=4 {
            assert!(sup_norm(&tau(&seq, level, &psi0, &g).unwrap()) <= 1e-8);
        }
        // psi_3: sqrt(3) lies in the transition of h at scales 2 and 4
        let j = 3;
        let h = LowPassFilter::smooth();
        let t2 = tau(&seq, 2, &Builtin::Hermite(j).into(), &g).unwrap();
        let factor = h.eval((j as f64).sqrt() / 4.0) - h.eval((j as f64).sqrt() / 2.0);
        assert!(factor.abs() > 0.1);
        for (x, v) in g.points().iter().zip(&t2) {
            assert!((v - factor * Builtin::Hermite(j).eval(*x)).abs() <= 1e-9);
        }
    }

    #[test]
    fn decomposition_telescopes_and_reconstructs() {
        let g = grid();
        let seq = MeasureSequence::lebesgue(5).unwrap();
        let f: TargetFunction = Builtin::Gaussian.into();
        let d = FrameDecomposition::compute(&f, &seq, 5, &g).unwrap();
        let sum = d.partial_sum(5);
        for (a, b) in sum.iter().zip(&d.projection(5).values) {
            assert!((a - b).abs() <= 1e-10);
        }
        let exact: Vec<f64> = g.points().iter().map(|x| Builtin::Gaussian.eval(*x)).collect();
        let err = sum.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err <= 1e-3, "{err}");
        let other = EvalGrid::new(vec![0.1, 0.2]).unwrap();
        let r = reconstruct(&d, 5, &other).unwrap();
        assert!((r[0] - d.projection(5).eval(0.1)).abs() < 1e-12);

        let psi5 = FrameDecomposition::compute(&Builtin::Hermite(5).into(), &seq, 3, &g).unwrap();
        let r = reconstruct(&psi5, 3, &g).unwrap();
        for (x, v) in g.points().iter().zip(&r) {
            assert!((v - Builtin::Hermite(5).eval(*x)).abs() <= 1e-8);
        }
        let ratio = d.frame_ratio(f.l2_norm_sq().unwrap());
        assert!((0.5..=1.0 + 1e-9).contains(&ratio), "{ratio}");
    }

    #[test]
    fn discrete_sequence_decomposition() {
        let rules: Vec<QuadratureRule> = (0..=3).map(|n| mz_rule(level_order(n))).collect();
        let seq = MeasureSequence::from_rules(rules.clone()).unwrap();
        let g = grid();
        let f: TargetFunction = Builtin::Gaussian.into();
        let a = FrameDecomposition::compute(&f, &seq, 3, &g).unwrap();
        let b = FrameDecomposition::compute(&f, &MeasureSequence::lebesgue(3).unwrap(), 3, &g).unwrap();
        for (x, y) in a.partial_sum(3).iter().zip(b.partial_sum(3)) {
            assert!((x - y).abs() <= 1e-6);
        }
        let mut short = rules;
        short.swap(0, 3);
        assert!(MeasureSequence::from_rules(short).is_err());
        assert!(MeasureSequence::lebesgue(9).is_err());
    }

    #[test]
    fn approx_error_examples() {
        let n = 8.0;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = random_expansions(1, space_dimension(n / 2.0), &mut rng).remove(0);
        let norm = p.l2_norm();
        let r = approx_error_estimate(&p.into(), n, 2.0, &Measure::Lebesgue).unwrap();
        assert!(r.residual <= 1e-7 * norm);

        let f: TargetFunction = Builtin::Gaussian.into();
        let mut last = f64::INFINITY;
        for n in [2.0, 4.0, 8.0, 16.0] {
            let r = approx_error_estimate(&f, n, f64::INFINITY, &Measure::Lebesgue).unwrap().residual;
            assert!(r <= last * (1.0 + 1e-6) + 1e-14, "n={n}: {r} > {last}");
            last = r;
        }

        let psi = Builtin::Hermite(20);
        let r = approx_error_estimate(&psi.into(), 4.0, 2.0, &Measure::Lebesgue).unwrap();
        assert!((r.residual - 1.0).abs() <= 1e-9, "{}", r.residual);
    }

    #[test]
    fn exports() {
        let g = EvalGrid::from_range(-1.0, 1.0, 0.5).unwrap();
        let d = FrameDecomposition::compute(&Builtin::Gaussian.into(), &MeasureSequence::lebesgue(2).unwrap(), 2, &g).unwrap();
        let csv = d.to_csv();
        assert_eq!(csv.lines().next().unwrap(), "x,tau_0,tau_1,tau_2");
        assert_eq!(csv.lines().count(), 6);
        let js = d.to_json();
        assert_eq!(js["levels"].as_array().unwrap().len(), 3);
        assert_eq!(js["levels"][2]["coefficients"].as_array().unwrap().len(), 16);
    }
}
