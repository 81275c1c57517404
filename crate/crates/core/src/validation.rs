//! Named property suites with pass/fail reports.

use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::analysis::modulus;
use crate::error::{Error, Result};
use crate::filter::{localization_report, LocalizedKernel, LowPassFilter};
use crate::functions::Builtin;
use crate::hermite::{
    dot, heat_kernel_closed, heat_kernel_dx_closed, heat_kernel_dxdy_closed, psi_and_derivative_into, psi_into,
    space_dimension, EvalGrid,
};
use crate::integrate::PanelRule;
use crate::operators::{
    approx_error_estimate, expansion_values, fourier_hermite, filtered, sup_norm,
    FrameDecomposition, Measure, MeasureSequence, TargetFunction,
};
use crate::quadrature::{
    bounded_variation_check, check_order, mz_sandwich_ratios, random_expansions, range_truncation,
    solve_mz_weights, verify_quadrature, CoverageConstants, PointSet,
};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 0xC0FFEE;

/// Point spacing factor found by calibration.
pub const CALIBRATED_ALPHA: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Orthonormality,
    Mehler,
    Localization,
    Reproduction,
    Bernstein,
    MzSandwich,
    Quadrature,
    Frame,
    Christoffel,
    Modulus,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Orthonormality,
        Suite::Mehler,
        Suite::Localization,
        Suite::Reproduction,
        Suite::Bernstein,
        Suite::MzSandwich,
        Suite::Quadrature,
        Suite::Frame,
        Suite::Christoffel,
        Suite::Modulus,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Orthonormality => "orthonormality",
            Suite::Mehler => "mehler",
            Suite::Localization => "localization",
            Suite::Reproduction => "reproduction",
            Suite::Bernstein => "bernstein",
            Suite::MzSandwich => "mz_sandwich",
            Suite::Quadrature => "quadrature",
            Suite::Frame => "frame",
            Suite::Christoffel => "christoffel",
            Suite::Modulus => "modulus",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::Unknown { kind: "suite", name: s.to_string() })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Comparison {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub description: String,
    pub measured: f64,
    pub threshold: f64,
    pub comparison: Comparison,
    pub pass: bool,
}

impl Check {
    pub fn at_most(description: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Self { description: description.into(), measured, threshold, comparison: Comparison::AtMost, pass: measured <= threshold }
    }

    pub fn at_least(description: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Self { description: description.into(), measured, threshold, comparison: Comparison::AtLeast, pass: measured >= threshold }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub pass: bool,
    /// Informational only.
    pub elapsed_seconds: f64,
    pub details: serde_json::Value,
}

impl SuiteReport {
    fn new(suite: Suite, seed: u64, checks: Vec<Check>, details: serde_json::Value, started: Instant) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self { suite: suite.name().into(), seed, checks, pass, elapsed_seconds: started.elapsed().as_secs_f64(), details }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// Inputs shared by the suites.
#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub seed: u64,
    pub alpha: f64,
    pub constants: CoverageConstants,
    /// Point set for the MZ sandwich suite instead of calibrated equispaced points.
    pub points: Option<PointSet>,
    /// Order used with `points`.
    pub order: Option<f64>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { seed: DEFAULT_SEED, alpha: CALIBRATED_ALPHA, constants: CoverageConstants::default(), points: None, order: None }
    }
}

pub fn run_suite(suite: Suite, options: &SuiteOptions) -> Result<SuiteReport> {
    let started = Instant::now();
    let (checks, details) = match suite {
        Suite::Orthonormality => orthonormality(),
        Suite::Mehler => mehler()?,
        Suite::Localization => localization()?,
        Suite::Reproduction => reproduction(options)?,
        Suite::Bernstein => bernstein(options),
        Suite::MzSandwich => mz_sandwich(options)?,
        Suite::Quadrature => quadrature(options)?,
        Suite::Frame => frame()?,
        Suite::Christoffel => christoffel(),
        Suite::Modulus => modulus_suite()?,
    };
    Ok(SuiteReport::new(suite, options.seed, checks, details, started))
}

/// Runs a suite by name.
pub fn run_named_suite(name: &str, options: &SuiteOptions) -> Result<SuiteReport> {
    run_suite(name.parse()?, options)
}

type SuiteOutput = (Vec<Check>, serde_json::Value);

fn orthonormality() -> SuiteOutput {
    let count = 65;
    let rule = PanelRule::oracle();
    let gram = crate::reduce::chunked_sum(rule.len(), count * count, |range, acc| {
        let mut buf = vec![0.0; count];
        for k in range {
            psi_into(rule.nodes()[k], &mut buf);
            let w = rule.weights()[k];
            for j in 0..count {
                let wj = w * buf[j];
                for l in 0..count {
                    acc[j * count + l] += wj * buf[l];
                }
            }
        }
    });
    let defect = (0..count * count)
        .map(|i| (gram[i] - if i / count == i % count { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max);
    (vec![Check::at_most("max_{j,l<=64} |int psi_j psi_l - delta_jl|", defect, 1e-8)], json!({ "max_index": 64 }))
}

/// Series terms so that `exp(-t j)` is negligible.
fn series_terms(t: f64) -> usize {
    (42.0 / t).ceil() as usize
}

fn mehler() -> Result<SuiteOutput> {
    let grid = EvalGrid::from_range(-3.0, 3.0, 0.25)?;
    let xs = grid.points();
    let mut checks = Vec::new();
    for t in [0.1, 0.2, 0.5, 1.0] {
        let terms = series_terms(t);
        let decay: Vec<f64> = (0..terms).map(|j| (-t * j as f64).exp()).collect();
        let basis: Vec<(Vec<f64>, Vec<f64>)> = xs
            .iter()
            .map(|&x| {
                let mut p = vec![0.0; terms];
                let mut d = vec![0.0; terms];
                psi_and_derivative_into(x, &mut p, &mut d);
                (p, d)
            })
            .collect();
        let mut worst = [0.0f64; 3];
        let mut scale = [0.0f64; 3];
        for (i, &x) in xs.iter().enumerate() {
            for (m, &y) in xs.iter().enumerate() {
                let (px, dx) = &basis[i];
                let (py, dy) = &basis[m];
                let series = [
                    (0..terms).map(|j| decay[j] * px[j] * py[j]).sum::<f64>(),
                    (0..terms).map(|j| decay[j] * dx[j] * py[j]).sum::<f64>(),
                    (0..terms).map(|j| decay[j] * dx[j] * dy[j]).sum::<f64>(),
                ];
                let closed = [heat_kernel_closed(x, y, t)?, heat_kernel_dx_closed(x, y, t)?, heat_kernel_dxdy_closed(x, y, t)?];
                for q in 0..3 {
                    worst[q] = worst[q].max((series[q] - closed[q]).abs());
                    scale[q] = scale[q].max(closed[q].abs());
                }
            }
        }
        let labels = ["kernel", "d/dx kernel", "d2/dxdy kernel"];
        for q in 0..3 {
            checks.push(Check::at_most(
                format!("t={t}: {} series vs closed form, max error / max |closed| on 25x25 grid", labels[q]),
                worst[q] / scale[q],
                1e-8,
            ));
        }
    }
    Ok((checks, json!({ "grid": "[-3,3]^2, 25x25", "times": [0.1, 0.2, 0.5, 1.0] })))
}

fn localization() -> Result<SuiteOutput> {
    let grid = EvalGrid::from_range(-4.0, 4.0, 0.05)?;
    let mut sups = Vec::new();
    for n in [8.0, 16.0, 32.0] {
        let k = LocalizedKernel::new(n, LowPassFilter::smooth())?;
        let r = localization_report(&k, 6, &grid)?;
        sups.push((n, r.sup_kernel(), r.sup_dx_kernel(), r.decay_violated));
    }
    let (first, last) = (sups[0], sups[2]);
    let mut checks = vec![
        Check::at_most("growth of sup |Phi_n| max(1,(n|x-y|)^6)/n from n=8 to n=32", last.1 / first.1, 2.0),
        Check::at_most("growth of sup |d/dx Phi_n| max(1,(n|x-y|)^6)/n^2 from n=8 to n=32", last.2 / first.2, 2.0),
    ];
    for (n, _, _, flagged) in &sups {
        checks.push(Check::at_most(format!("smooth filter decay flag at n={n}"), *flagged as u8 as f64, 0.0));
    }
    let sharp = localization_report(&LocalizedKernel::new(16.0, LowPassFilter::sharp())?, 6, &grid)?;
    checks.push(Check::at_least("sharp filter (negative control) decay flag at n=16", sharp.decay_violated as u8 as f64, 1.0));
    let table: Vec<_> = sups.iter().map(|(n, k, d, _)| json!({ "n": n, "sup_kernel": k, "sup_dx_kernel": d })).collect();
    Ok((checks, json!({ "decay_exponent": 6, "grid": "[-4,4]^2 step 0.05", "sups": table })))
}

fn relative_sup_error(values: &[f64], exact: &[f64]) -> f64 {
    let err = values.iter().zip(exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    err / sup_norm(exact)
}

fn reproduction(options: &SuiteOptions) -> Result<SuiteOutput> {
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut checks = Vec::new();
    let filter = LowPassFilter::smooth();
    for n in [4.0, 8.0, 16.0] {
        let ps = random_expansions(50, space_dimension(n / 2.0), &mut rng);
        let win = range_truncation(n);
        let grid = EvalGrid::from_range(win.lo, win.hi, 1.0 / (4.0 * n))?;
        let points = crate::quadrature::calibrated_points(n, options.alpha, &options.constants)?;
        let rule = solve_mz_weights(&points, n)?;
        let measures = [("Lebesgue", Measure::Lebesgue, 1e-8), ("MZ", Measure::Discrete(rule.measure), 1e-6)];
        for (label, nu, tol) in &measures {
            let worst = ps
                .par_iter()
                .map(|p| {
                    let exact = expansion_values(p.coeffs(), grid.points());
                    let coeffs = filtered(&fourier_hermite(&p.clone().into(), nu, space_dimension(n))?, n, &filter);
                    Ok(relative_sup_error(&expansion_values(&coeffs, grid.points()), &exact))
                })
                .collect::<Result<Vec<f64>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            checks.push(Check::at_most(
                format!("n={n}, {label}: max over 50 P in Pi_{{n/2}} of ||sigma_n P - P||_grid / ||P||_grid"),
                worst,
                *tol,
            ));
        }
    }
    Ok((checks, json!({ "alpha": options.alpha, "coverage_c": options.constants.c })))
}

/// `max ||P'||_inf / (n ||P||_inf)` over random `P in Pi_n`.
pub fn bernstein_ratio(n: f64, trials: usize, rng: &mut ChaCha8Rng) -> f64 {
    let dim = space_dimension(n);
    let ps = random_expansions(trials, dim, rng);
    let half = (2.0 * dim as f64).sqrt() + 3.0;
    let step = 1.0 / (6.0 * n);
    let count = (2.0 * half / step).ceil() as usize + 1;
    let xs: Vec<f64> = (0..count).map(|i| -half + i as f64 * step).collect();
    let (vmax, dmax) = xs
        .par_iter()
        .map_init(
            || (vec![0.0; dim], vec![0.0; dim]),
            |(p, d), &x| {
                psi_and_derivative_into(x, p, d);
                let v: Vec<f64> = ps.iter().map(|q| dot(q.coeffs(), p).abs()).collect();
                let dv: Vec<f64> = ps.iter().map(|q| dot(q.coeffs(), d).abs()).collect();
                (v, dv)
            },
        )
        .reduce(
            || (vec![0.0; trials], vec![0.0; trials]),
            |a, b| {
                (
                    a.0.iter().zip(&b.0).map(|(x, y)| x.max(*y)).collect(),
                    a.1.iter().zip(&b.1).map(|(x, y)| x.max(*y)).collect(),
                )
            },
        );
    vmax.iter().zip(&dmax).map(|(v, d)| d / (n * v)).fold(0.0, f64::max)
}

fn bernstein(options: &SuiteOptions) -> SuiteOutput {
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let orders = [4.0, 8.0, 16.0, 32.0];
    let ratios: Vec<f64> = orders.iter().map(|&n| bernstein_ratio(n, 100, &mut rng)).collect();
    let checks = ratios
        .windows(2)
        .zip(orders.windows(2))
        .map(|(r, n)| Check::at_most(format!("max ||P'||/(n||P||) growth from n={} to n={}", n[0], n[1]), r[1] / r[0], 1.5))
        .collect();
    (checks, json!({ "orders": orders, "ratios": ratios, "trials": 100 }))
}

fn mz_sandwich(options: &SuiteOptions) -> Result<SuiteOutput> {
    let mut checks = Vec::new();
    let mut table = Vec::new();
    if let Some(points) = &options.points {
        let n = options.order.ok_or_else(|| Error::domain("an explicit point set needs an order"))?;
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
        let ps = random_expansions(50, space_dimension(n * SQRT_2), &mut rng);
        let ratios = mz_sandwich_ratios(points, &ps);
        let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().cloned().fold(0.0, f64::max);
        checks.push(Check::at_least(format!("n={n}: min sandwich ratio on given points"), lo, 0.75));
        checks.push(Check::at_most(format!("n={n}: max sandwich ratio on given points"), hi, 1.25));
        return Ok((checks, json!({ "order": n, "points": points.points().len() })));
    }
    for n in [2.0, 4.0, 8.0, 16.0] {
        let (_, c) = check_order(n, options.alpha, &options.constants, 50, options.seed)?;
        checks.push(Check::at_least(format!("n={n}: min over 50 P in Pi_{{n sqrt2}} of sandwich ratio"), c.sandwich_min, 0.75));
        checks.push(Check::at_most(format!("n={n}: max over 50 P in Pi_{{n sqrt2}} of sandwich ratio"), c.sandwich_max, 1.25));
        table.push(c);
    }
    Ok((checks, json!({ "alpha": options.alpha, "coverage_c": options.constants.c, "orders": table })))
}

fn quadrature(options: &SuiteOptions) -> Result<SuiteOutput> {
    let mut checks = Vec::new();
    let mut table = Vec::new();
    for n in [2.0, 4.0, 8.0] {
        let points = crate::quadrature::calibrated_points(n, options.alpha, &options.constants)?;
        let rule = solve_mz_weights(&points, n)?.with_alpha(options.alpha);
        let defect = verify_quadrature(&rule, 50, options.seed);
        let tv = bounded_variation_check(&rule, 1.0);
        checks.push(Check::at_most(format!("n={n}: relative moment residual"), rule.residual, 1e-8));
        checks.push(Check::at_most(format!("n={n}: max product defect over 50 random P,Q"), defect, 1e-7));
        checks.push(Check::at_most(format!("n={n}: max |w_k| / gap_k"), rule.max_weight_ratio(), 3.0));
        checks.push(Check::at_most(format!("n={n}: sum |w_k| / n"), tv, 5.0));
        table.push(json!({ "n": n, "points": points.points().len(), "regularity_norm": rule.regularity_norm }));
    }
    Ok((checks, json!({ "alpha": options.alpha, "coverage_c": options.constants.c, "rules": table })))
}

/// Functions whose frame ratios are compared.
pub fn frame_battery() -> Vec<TargetFunction> {
    vec![
        Builtin::Gaussian.into(),
        Builtin::SqrtAbsBump.into(),
        Builtin::F1Tapered.into(),
        Builtin::F2Tapered.into(),
        TargetFunction::custom("shifted_gaussian", |x| (-(x - 1.0) * (x - 1.0)).exp(), vec![], 8.0),
        TargetFunction::custom("wide_gaussian", |x| (-x * x / 8.0).exp(), vec![], 19.0),
        TargetFunction::custom("modulated_gaussian", |x| (3.0 * x).cos() * (-x * x / 2.0).exp(), vec![], 10.0),
        TargetFunction::custom("abs_bump", |x| x.abs() * (-x * x).exp(), vec![0.0], 7.0),
        TargetFunction::custom("sech", |x| 1.0 / x.cosh(), vec![], 45.0),
        TargetFunction::custom("tent", |x| (1.0 - x.abs()).max(0.0), vec![-1.0, 0.0, 1.0], 1.0),
    ]
}

fn frame() -> Result<SuiteOutput> {
    let levels = 5;
    let seq = MeasureSequence::lebesgue(levels)?;
    let grid = EvalGrid::from_range(-6.0, 6.0, 0.01)?;
    let f: TargetFunction = Builtin::Gaussian.into();
    let d = FrameDecomposition::compute(&f, &seq, levels, &grid)?;
    let exact: Vec<f64> = grid.points().iter().map(|x| Builtin::Gaussian.eval(*x)).collect();
    let partial = d.partial_sum(levels);
    let recon = relative_sup_error(&partial, &exact);
    let telescoping = partial.iter().zip(&d.projection(levels).values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let battery = frame_battery();
    let ratios = battery
        .iter()
        .map(|g| Ok(FrameDecomposition::compute(g, &seq, levels, &EvalGrid::new(vec![0.0])?)?.frame_ratio(g.l2_norm_sq()?)))
        .collect::<Result<Vec<f64>>>()?;
    let mut sorted = ratios.clone();
    sorted.sort_by(f64::total_cmp);
    let median = 0.5 * (sorted[4] + sorted[5]);
    let spread = ratios.iter().map(|r| (r / median - 1.0).abs()).fold(0.0, f64::max);
    let checks = vec![
        Check::at_most("||f - sum_{n<=5} tau_n f||_grid / ||f||_grid, f = exp(-x^2)", recon, 1e-3),
        Check::at_most("max |sum_{n<=5} tau_n - sigma_32| on grid", telescoping, 1e-10),
        Check::at_most("max |ratio / median - 1| of sum ||tau_n||^2 / ||f||^2 over the battery", spread, 0.2),
    ];
    let names: Vec<String> = battery.iter().map(TargetFunction::name).collect();
    Ok((checks, json!({ "levels": levels, "battery": names, "frame_ratios": ratios, "median": median })))
}

/// `sup_x sum_{sqrt j < u} psi_j(x)^2` and `sup_x sum psi_j'(x)^2` over a grid.
pub fn christoffel_sups(u: f64, xs: &[f64]) -> (f64, f64) {
    let count = space_dimension(u);
    xs.par_iter()
        .map_init(
            || (vec![0.0; count], vec![0.0; count]),
            |(p, d), &x| {
                psi_and_derivative_into(x, p, d);
                (dot(p, p), dot(d, d))
            },
        )
        .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)))
}

fn christoffel() -> SuiteOutput {
    let xs: Vec<f64> = (0..=2000).map(|i| -10.0 + 0.01 * i as f64).collect();
    let us = [4.0, 8.0, 16.0];
    let vals: Vec<(f64, f64)> = us.iter().map(|&u| christoffel_sups(u, &xs)).collect();
    let plain: Vec<f64> = vals.iter().zip(&us).map(|(v, u)| v.0 / u).collect();
    let deriv: Vec<f64> = vals.iter().zip(&us).map(|(v, u)| v.1 / u.powi(3)).collect();
    let variation = |v: &[f64]| {
        let max = v.iter().cloned().fold(0.0, f64::max);
        let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
        (max - min) / min
    };
    let checks = vec![
        Check::at_most("variation of sup_x sum psi_j(x)^2 / u over u in {4,8,16}", variation(&plain), 0.25),
        Check::at_most("variation of sup_x sum psi_j'(x)^2 / u^3 over u in {4,8,16}", variation(&deriv), 0.25),
    ];
    (checks, json!({ "u": us, "normalized": plain, "normalized_derivative": deriv, "x_range": [-10.0, 10.0] }))
}

fn modulus_suite() -> Result<SuiteOutput> {
    let psi0: TargetFunction = Builtin::Hermite(0).into();
    let deltas = [0.2, 0.1, 0.05];
    let omegas = deltas.iter().map(|d| modulus(&psi0, 2.0, 1, *d)).collect::<Result<Vec<f64>>>()?;
    let mut checks = vec![
        Check::at_most("omega_1(2; psi_0, 0.1) / omega_1(2; psi_0, 0.2)", omegas[1] / omegas[0], 1.0),
        Check::at_most("omega_1(2; psi_0, 0.05) / omega_1(2; psi_0, 0.1)", omegas[2] / omegas[1], 1.0),
    ];
    let mut fitted = Vec::new();
    for (b, r) in [(Builtin::Gaussian, 2), (Builtin::SqrtAbsBump, 1)] {
        let f: TargetFunction = b.into();
        let ratios = [4.0, 8.0, 16.0]
            .iter()
            .map(|&n| {
                let e = approx_error_estimate(&f, n, f64::INFINITY, &Measure::Lebesgue)?.residual;
                Ok(e / modulus(&f, f64::INFINITY, r, 1.0 / n)?)
            })
            .collect::<Result<Vec<f64>>>()?;
        let growth = ratios.iter().cloned().fold(0.0, f64::max) / ratios[0];
        checks.push(Check::at_most(
            format!("{b}: max_n c_n / c_4 with c_n = ||sigma_n f - f||_inf / omega_{r}(inf; f, 1/n), n in {{4,8,16}}"),
            growth,
            1.5,
        ));
        fitted.push(json!({ "function": b.to_string(), "r": r, "constants": ratios }));
    }
    Ok((checks, json!({ "psi0_moduli": omegas, "deltas": deltas, "direct_estimate": fitted })))
}

/// Runs every suite in order.
pub fn run_all(options: &SuiteOptions) -> Result<Vec<SuiteReport>> {
    Suite::ALL.iter().map(|s| run_suite(*s, options)).collect()
}
