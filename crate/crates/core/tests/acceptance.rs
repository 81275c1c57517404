//! Acceptance criteria 1-10: one PASS/FAIL line each, nonzero exit on any failure.

use std::f64::consts::FRAC_PI_2;
use std::process::ExitCode;
use std::time::Instant;

use hermloc::analysis::{analysis_grid_step, local_smoothness_map, SmoothnessReport, Window};
use hermloc::functions::Builtin;
use hermloc::hermite::EvalGrid;
use hermloc::operators::MeasureSequence;
use hermloc::validation::{run_suite, Check, Suite, SuiteOptions};
use hermloc::Result;

struct Outcome {
    checks: Vec<Check>,
    notes: String,
}

fn from_suite(suite: Suite) -> Result<Outcome> {
    let r = run_suite(suite, &SuiteOptions::default())?;
    Ok(Outcome { checks: r.checks, notes: format!("seed {:#x}", r.seed) })
}

fn smoothness(f: Builtin, windows: &[Window], levels: usize, refine: f64) -> Result<SmoothnessReport> {
    let seq = MeasureSequence::lebesgue(levels)?;
    let grid = EvalGrid::from_range(-3.75, 3.75, analysis_grid_step(levels) / refine)?;
    local_smoothness_map(&f.into(), &seq, f64::INFINITY, windows, levels, &grid)
}

/// Local smoothness detection at one resolution.
fn detection_checks(levels: usize, refine: f64, label: &str) -> Result<Vec<Check>> {
    let radius = hermloc::analysis::DEFAULT_WINDOW_RADIUS;
    let probes = [Window::new(0.0, radius)?, Window::new(-2.0, radius)?, Window::new(2.0, radius)?];
    let sq = smoothness(Builtin::SqrtAbsBump, &probes, levels, refine)?;
    let origin = sq.windows[0].gamma_hat.unwrap_or(f64::NAN);
    let mut checks = vec![
        Check::at_least(format!("{label}: sqrtabs gamma_hat at 0 >= 0.35"), origin, 0.35),
        Check::at_most(format!("{label}: sqrtabs gamma_hat at 0 <= 0.65"), origin, 0.65),
    ];
    for w in &sq.windows[1..] {
        let value = if w.resolved_smooth { f64::INFINITY } else { w.gamma_hat.unwrap_or(f64::NAN) };
        checks.push(Check::at_least(format!("{label}: sqrtabs gamma_hat at {} (inf = resolved)", w.center), value, 1.5));
    }
    let windows = Window::stride(-3.0, 3.0, radius, 0.5 * radius)?;
    let f1 = smoothness(Builtin::F1Tapered, &windows, levels, refine)?;
    let mins = f1.minimum_windows(1e-6);
    let distance = if mins.is_empty() {
        f64::INFINITY
    } else {
        mins.iter().map(|w| (w.center.abs() - FRAC_PI_2).abs()).fold(0.0, f64::max)
    };
    checks.push(Check::at_most(format!("{label}: f1 minimum windows, max distance to +-pi/2"), distance, 0.15));
    Ok(checks)
}

fn local_detection() -> Result<Outcome> {
    let mut checks = detection_checks(5, 1.0, "N=5")?;
    checks.extend(detection_checks(6, 2.0, "oracle N=6, grid step halved")?);
    Ok(Outcome { checks, notes: "window radius 0.25, p = inf".into() })
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit_seconds: f64,
    run: fn() -> Result<Outcome>,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "orthonormality", limit_seconds: 30.0, run: || from_suite(Suite::Orthonormality) },
        Criterion { id: 2, name: "heat kernel series vs closed form", limit_seconds: 10.0, run: || from_suite(Suite::Mehler) },
        Criterion { id: 3, name: "reproduction of Pi_{n/2}", limit_seconds: 60.0, run: || from_suite(Suite::Reproduction) },
        Criterion { id: 4, name: "kernel localization", limit_seconds: 60.0, run: || from_suite(Suite::Localization) },
        Criterion { id: 5, name: "Markov-Bernstein", limit_seconds: 30.0, run: || from_suite(Suite::Bernstein) },
        Criterion { id: 6, name: "quadrature exactness", limit_seconds: 120.0, run: || from_suite(Suite::Quadrature) },
        Criterion { id: 7, name: "MZ sandwich", limit_seconds: 60.0, run: || from_suite(Suite::MzSandwich) },
        Criterion { id: 8, name: "frame reconstruction", limit_seconds: 120.0, run: || from_suite(Suite::Frame) },
        Criterion { id: 9, name: "local smoothness detection", limit_seconds: 300.0, run: local_detection },
        Criterion { id: 10, name: "Christoffel bounds", limit_seconds: 30.0, run: || from_suite(Suite::Christoffel) },
    ];
    let mut all_pass = true;
    for c in &criteria {
        let started = Instant::now();
        let outcome = (c.run)();
        let elapsed = started.elapsed().as_secs_f64();
        let line = match outcome {
            Ok(o) => {
                let within = elapsed < c.limit_seconds;
                let pass = within && o.checks.iter().all(|k| k.pass);
                all_pass &= pass;
                let worst = o.checks.iter().find(|k| !k.pass).or(o.checks.first());
                let summary = worst
                    .map(|k| format!("{}: {:.4e} vs {:.4e}", k.description, k.measured, k.threshold))
                    .unwrap_or_default();
                format!(
                    "{} {:>2} {}: {} checks, {}; {:.2} s (limit {} s); {}",
                    if pass { "PASS" } else { "FAIL" },
                    c.id,
                    c.name,
                    o.checks.len(),
                    summary,
                    elapsed,
                    c.limit_seconds,
                    o.notes
                )
            }
            Err(e) => {
                all_pass = false;
                format!("FAIL {:>2} {}: error: {e}", c.id, c.name)
            }
        };
        println!("{line}");
    }
    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
