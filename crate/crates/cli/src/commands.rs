use std::io::Write;
use std::path::Path;

use hermloc::analysis::{analysis_grid_step, local_smoothness_map, Window};
use hermloc::filter::{FilterProfile, LocalizedKernel, LowPassFilter};
use hermloc::functions::Builtin;
use hermloc::hermite::{psi_into, EvalGrid};
use hermloc::io::{read_points, read_samples, rule_to_string, RuleHeader};
use hermloc::operators::{
    level_order, FrameDecomposition, MeasureSequence, SampledFunction, TargetFunction,
};
use hermloc::quadrature::{
    admissible_order, bounded_variation_check, density_content, solve_mz_weights, verify_quadrature, Admissibility,
    CoverageConstants, PointSet,
};
use hermloc::validation::{run_suite, Suite, SuiteOptions, SuiteReport};
use hermloc::{Error, Result};
use serde_json::json;

use crate::{Cli, Command, FilterArg, Format, SourceArgs};

/// Outcome of a command that ran to completion.
pub enum Status {
    Success,
    Failed,
}

/// Random trials behind the defect reported by `quadrature`.
const VERIFY_TRIALS: usize = 50;

pub fn run(cli: &Cli) -> Result<Status> {
    let format = |default| cli.output.output.unwrap_or(default);
    let (text, status) = match &cli.command {
        Command::Basis { max_j, grid } => (basis(*max_j, &EvalGrid::parse(grid)?, format(Format::Csv))?, Status::Success),
        Command::Kernel { order, center, grid, filter, sharpness } => {
            let profile = match filter {
                FilterArg::Smooth => FilterProfile::Smooth,
                FilterArg::Linear => FilterProfile::Linear,
                FilterArg::Sharp => FilterProfile::Sharp,
            };
            let k = LocalizedKernel::new(*order, LowPassFilter::new(profile, *sharpness)?)?;
            (kernel(&k, *center, &EvalGrid::parse(grid)?, format(Format::Csv)), Status::Success)
        }
        Command::Quadrature { points, alpha, order } => quadrature(points, *alpha, *order, format(Format::Csv))?,
        Command::Project { source, levels, grid } => {
            let (f, seq) = source_sequence(source, *levels)?;
            let d = FrameDecomposition::compute(&f, &seq, *levels, &EvalGrid::parse(grid)?)?;
            let text = match format(Format::Csv) {
                Format::Csv => d.to_csv(),
                Format::Json => pretty(&d.to_json()),
            };
            (text, Status::Success)
        }
        Command::Analyze { source, levels, window_radius, centers, range, p } => {
            let (lo, hi) = parse_range(range)?;
            let windows = match centers {
                Some(cs) => cs.iter().map(|c| Window::new(*c, *window_radius)).collect::<Result<Vec<_>>>()?,
                None => Window::stride(lo, hi, *window_radius, 0.5 * window_radius)?,
            };
            let span_lo = windows.iter().map(Window::lo).fold(f64::INFINITY, f64::min);
            let span_hi = windows.iter().map(Window::hi).fold(f64::NEG_INFINITY, f64::max);
            let grid = EvalGrid::from_range(span_lo - 0.5, span_hi + 0.5, analysis_grid_step(*levels))?;
            let (f, seq) = source_sequence(source, *levels)?;
            let report = local_smoothness_map(&f, &seq, *p, &windows, *levels, &grid)?;
            let text = match format(Format::Json) {
                Format::Csv => report.to_csv(),
                Format::Json => pretty(&report.to_json()),
            };
            (text, Status::Success)
        }
        Command::Validate { suite, seed, alpha, points, order } => {
            let options = SuiteOptions {
                seed: *seed,
                alpha: *alpha,
                constants: CoverageConstants::default(),
                points: points.as_deref().map(read_points).transpose()?,
                order: *order,
            };
            let suites = match suite {
                Some(name) => vec![name.parse::<Suite>()?],
                None => Suite::ALL.to_vec(),
            };
            let reports = suites.iter().map(|s| run_suite(*s, &options)).collect::<Result<Vec<_>>>()?;
            for r in &reports {
                eprintln!("{} {} ({:.2} s)", if r.pass { "PASS" } else { "FAIL" }, r.suite, r.elapsed_seconds);
            }
            let status = if reports.iter().all(|r| r.pass) { Status::Success } else { Status::Failed };
            (validation_output(&reports, format(Format::Json)), status)
        }
    };
    emit(&text, cli.output.out.as_deref())?;
    Ok(status)
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json serializes");
    s.push('\n');
    s
}

/// Writes to stdout, or atomically replaces `path`.
fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    let Some(path) = path else {
        std::io::stdout().write_all(text.as_bytes())?;
        return Ok(());
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.persist(path).map_err(|e| Error::Io(format!("{}: {}", path.display(), e.error)))?;
    Ok(())
}

fn parse_range(spec: &str) -> Result<(f64, f64)> {
    let bad = || Error::Parse(format!("range must be min:max, got {spec:?}"));
    let (a, b) = spec.split_once(':').ok_or_else(bad)?;
    let (lo, hi) = (a.trim().parse::<f64>().map_err(|_| bad())?, b.trim().parse::<f64>().map_err(|_| bad())?);
    if lo.partial_cmp(&hi).is_none_or(|o| o.is_gt()) {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn basis(count: usize, grid: &EvalGrid, format: Format) -> Result<String> {
    if count == 0 {
        return Err(Error::Domain("--max-j must be at least 1".into()));
    }
    let mut rows = Vec::with_capacity(grid.len());
    let mut buf = vec![0.0; count];
    for &x in grid.points() {
        psi_into(x, &mut buf);
        rows.push(buf.clone());
    }
    Ok(match format {
        Format::Csv => {
            let mut out = String::from("x");
            for j in 0..count {
                out.push_str(&format!(",psi_{j}"));
            }
            out.push('\n');
            for (x, row) in grid.points().iter().zip(&rows) {
                out.push_str(&format!("{x:.16e}"));
                for v in row {
                    out.push_str(&format!(",{v:.16e}"));
                }
                out.push('\n');
            }
            out
        }
        Format::Json => pretty(&json!({ "x": grid.points(), "psi": rows })),
    })
}

fn kernel(k: &LocalizedKernel, center: f64, grid: &EvalGrid, format: Format) -> String {
    let values: Vec<f64> = grid.points().iter().map(|x| k.eval(*x, center)).collect();
    let dx: Vec<f64> = grid.points().iter().map(|x| k.eval_dx(*x, center)).collect();
    match format {
        Format::Csv => {
            let mut out = String::from("x,kernel,dx_kernel\n");
            for ((x, v), d) in grid.points().iter().zip(&values).zip(&dx) {
                out.push_str(&format!("{x:.16e},{v:.16e},{d:.16e}\n"));
            }
            out
        }
        Format::Json => pretty(&json!({
            "order": k.scale(),
            "center": center,
            "x": grid.points(),
            "kernel": values,
            "dx_kernel": dx,
        })),
    }
}

fn quadrature(path: &Path, alpha: f64, order: Option<f64>, format: Format) -> Result<(String, Status)> {
    let points = read_points(path)?;
    let constants = CoverageConstants::default();
    let n = match (admissible_order(&points, alpha, &constants)?, order) {
        (a @ Admissibility::Rejected { .. }, _) => return Err(Error::Domain(a.describe())),
        (Admissibility::Admissible { n }, Some(requested)) if requested > n => {
            return Err(Error::Domain(format!("order {requested} exceeds the admissible order {n} of these points")))
        }
        (Admissibility::Admissible { n }, requested) => requested.unwrap_or(n),
    };
    let rule = solve_mz_weights(&points, n)?.with_alpha(alpha);
    let defect = verify_quadrature(&rule, VERIFY_TRIALS, hermloc::validation::DEFAULT_SEED);
    let summary = json!({
        "order": rule.order,
        "points": points.points().len(),
        "residual": rule.residual,
        "flagged": rule.flagged,
        "product_defect": defect,
        "max_weight_ratio": rule.max_weight_ratio(),
        "total_variation_over_n": bounded_variation_check(&rule, 1.0),
    });
    eprintln!("{summary}");
    let text = match format {
        Format::Csv => rule_to_string(&rule),
        Format::Json => {
            let header = RuleHeader {
                order: rule.order,
                residual: rule.residual,
                regularity_norm: rule.regularity_norm,
                alpha_used: rule.alpha_used,
                upper_endpoint: rule.measure.points().last(),
            };
            pretty(&json!({ "header": header, "y": rule.support(), "w": rule.weights(), "summary": summary }))
        }
    };
    Ok((text, if rule.flagged { Status::Failed } else { Status::Success }))
}

/// MZ rules of orders `2^{n+1}`, `n = 0..=levels`, all on `points`.
///
/// Coverage is checked at the top order, reached with spacing factor `needed * gap <= alpha`.
fn mz_sequence(points: &PointSet, alpha: f64, levels: usize) -> Result<MeasureSequence> {
    let needed = level_order(levels);
    let spacing = needed * density_content(points);
    if spacing > alpha {
        return Err(Error::Domain(format!(
            "{levels} levels need MZ order {needed}, but these points only admit order {:.3} at alpha {alpha}",
            alpha / density_content(points)
        )));
    }
    if let a @ Admissibility::Rejected { .. } = admissible_order(points, spacing, &CoverageConstants::default())? {
        return Err(Error::Domain(a.describe()));
    }
    let rules = (0..=levels).map(|n| solve_mz_weights(points, level_order(n))).collect::<Result<Vec<_>>>()?;
    MeasureSequence::from_rules(rules)
}

fn source_sequence(source: &SourceArgs, levels: usize) -> Result<(TargetFunction, MeasureSequence)> {
    if let Some(path) = &source.samples {
        let (points, mut values) = read_samples(path)?;
        let seq = mz_sequence(&points, source.alpha, levels)?;
        let measure = match &seq.levels()[0].measure {
            hermloc::operators::Measure::Discrete(m) => m.clone(),
            hermloc::operators::Measure::Lebesgue => unreachable!("sequence built from rules"),
        };
        values.truncate(measure.support().len());
        return Ok((TargetFunction::Sampled(SampledFunction::new(measure, values)?), seq));
    }
    let name = source.function.as_deref().ok_or_else(|| Error::Domain("give --fn NAME or --samples FILE".into()))?;
    let f: TargetFunction = name.parse::<Builtin>()?.into();
    let seq = match &source.points {
        Some(path) => mz_sequence(&read_points(path)?, source.alpha, levels)?,
        None => MeasureSequence::lebesgue(levels)?,
    };
    Ok((f, seq))
}

fn validation_output(reports: &[SuiteReport], format: Format) -> String {
    match format {
        Format::Json => {
            let all: Vec<_> = reports.iter().map(SuiteReport::to_json).collect();
            pretty(&json!({ "pass": reports.iter().all(|r| r.pass), "reports": all }))
        }
        Format::Csv => {
            let mut out = String::from("suite,description,measured,threshold,pass\n");
            for r in reports {
                for c in &r.checks {
                    out.push_str(&format!(
                        "{},\"{}\",{:.16e},{:.16e},{}\n",
                        r.suite,
                        c.description.replace('"', "\"\""),
                        c.measured,
                        c.threshold,
                        c.pass
                    ));
                }
            }
            out
        }
    }
}
