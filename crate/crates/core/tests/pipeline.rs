//! End to end: scattered points, quadrature rules, frame decomposition and smoothness analysis.

use hermloc::analysis::{analysis_grid_step, local_smoothness_map, Window};
use hermloc::functions::Builtin;
use hermloc::hermite::EvalGrid;
use hermloc::io::{parse_rule, rule_to_string};
use hermloc::operators::{level_order, FrameDecomposition, MeasureSequence, SampledFunction, TargetFunction};
use hermloc::quadrature::{
    admissible_order, solve_mz_weights, verify_quadrature, Admissibility, CoverageConstants, PointSet,
};

fn jittered_points(half: f64, step: f64) -> PointSet {
    let m = (2.0 * half / step).round() as i64;
    let ys = (0..=m)
        .map(|i| {
            let jitter = 0.3 * step * ((i as f64 * 1.618).fract() - 0.5);
            -half + i as f64 * step + if i == 0 || i == m { 0.0 } else { jitter }
        })
        .collect();
    PointSet::new(ys).unwrap()
}

#[test]
fn rules_on_scattered_points_survive_export() {
    let points = jittered_points(14.0, 0.05);
    let n = match admissible_order(&points, 0.5, &CoverageConstants::default()).unwrap() {
        Admissibility::Admissible { n } => n,
        rejected => panic!("{}", rejected.describe()),
    };
    assert!(n >= 8.0, "{n}");
    let rule = solve_mz_weights(&points, 8.0).unwrap();
    assert!(rule.residual <= 1e-8 && !rule.flagged);
    let defect = verify_quadrature(&rule, 20, 11);
    assert!(defect <= 1e-7, "{defect}");
    let back = parse_rule(&rule_to_string(&rule)).unwrap();
    assert!((verify_quadrature(&back, 20, 11) - defect).abs() <= 1e-12);
}

/// Jittered points admissible for the MZ order of level 3.
fn level3_points() -> PointSet {
    let points = jittered_points(30.0, 0.025);
    let a = admissible_order(&points, 0.5, &CoverageConstants::default()).unwrap();
    assert!(matches!(a, Admissibility::Admissible { n } if n >= level_order(3)), "{}", a.describe());
    points
}

fn sequence(points: &PointSet, levels: usize) -> MeasureSequence {
    let rules = (0..=levels).map(|n| solve_mz_weights(points, level_order(n)).unwrap()).collect();
    MeasureSequence::from_rules(rules).unwrap()
}

#[test]
fn discrete_projections_approach_lebesgue_ones() {
    let levels = 3;
    let discrete = sequence(&level3_points(), levels);
    let lebesgue = MeasureSequence::lebesgue(levels).unwrap();
    let grid = EvalGrid::from_range(-3.0, 3.0, 0.1).unwrap();
    let f: TargetFunction = Builtin::Gaussian.into();
    let a = FrameDecomposition::compute(&f, &discrete, levels, &grid).unwrap();
    let b = FrameDecomposition::compute(&f, &lebesgue, levels, &grid).unwrap();
    let diffs: Vec<f64> = (0..=levels)
        .map(|n| {
            let (pa, pb) = (&a.projection(n).values, &b.projection(n).values);
            pa.iter().zip(pb).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
        })
        .collect();
    assert!(diffs[0] <= 1e-3, "{diffs:?}");
    assert!(diffs.windows(2).all(|w| w[1] <= w[0] || w[1] <= 1e-13), "{diffs:?}");
    assert!(diffs[levels] <= 1e-9, "{diffs:?}");
}

#[test]
fn sampled_input_matches_analytic_input() {
    let levels = 3;
    let seq = sequence(&level3_points(), levels);
    let measure = match &seq.levels()[0].measure {
        hermloc::operators::Measure::Discrete(m) => m.clone(),
        hermloc::operators::Measure::Lebesgue => unreachable!(),
    };
    let analytic: TargetFunction = Builtin::SqrtAbsBump.into();
    let values = analytic.values_on(&measure).unwrap();
    let samples = TargetFunction::Sampled(SampledFunction::new(measure, values).unwrap());
    let windows = [Window::new(0.0, 0.25).unwrap(), Window::new(2.0, 0.25).unwrap()];
    let grid = EvalGrid::from_range(-3.0, 3.0, analysis_grid_step(levels)).unwrap();
    let a = local_smoothness_map(&analytic, &seq, f64::INFINITY, &windows, levels, &grid).unwrap();
    let b = local_smoothness_map(&samples, &seq, f64::INFINITY, &windows, levels, &grid).unwrap();
    assert_eq!(a.windows, b.windows);
    assert!(a.windows[0].level_norms[levels] > 2.0 * a.windows[1].level_norms[levels]);
}
