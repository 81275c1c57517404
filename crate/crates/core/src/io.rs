//! Text formats for point sets, samples and quadrature rules.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{DiscreteMeasure, PointSet, QuadratureRule, SOLVER_TOLERANCE};

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_error(line: usize, message: impl std::fmt::Display) -> Error {
    Error::Parse(format!("line {line}: {message}"))
}

fn parse_real(field: &str, line: usize) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| parse_error(line, format!("expected a real number, got {:?}", field.trim())))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// One real per line; blank lines and `#` comments are skipped. Sorted on ingest.
pub fn parse_points(text: &str) -> Result<PointSet> {
    let ys = data_lines(text).map(|(i, l)| parse_real(l, i)).collect::<Result<Vec<f64>>>()?;
    PointSet::new(ys)
}

pub fn read_points(path: &Path) -> Result<PointSet> {
    parse_points(&read(path)?)
}

/// Lines `x,f(x)`, sorted by `x` on ingest.
pub fn parse_samples(text: &str) -> Result<(PointSet, Vec<f64>)> {
    let mut rows = data_lines(text)
        .map(|(i, l)| match l.split(',').collect::<Vec<_>>().as_slice() {
            [x, v] => Ok((parse_real(x, i)?, parse_real(v, i)?)),
            _ => Err(parse_error(i, "expected two comma-separated values")),
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let values = rows.iter().map(|r| r.1).collect();
    Ok((PointSet::new(rows.into_iter().map(|r| r.0).collect())?, values))
}

pub fn read_samples(path: &Path) -> Result<(PointSet, Vec<f64>)> {
    parse_samples(&read(path)?)
}

/// Metadata written on the first line of an exported rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleHeader {
    pub order: f64,
    pub residual: f64,
    pub regularity_norm: f64,
    pub alpha_used: Option<f64>,
    /// `y_{M+1}`, which closes the last gap and carries no mass.
    pub upper_endpoint: f64,
}

/// `# {header}` followed by `y,w` and one `y_k,w_k` row per mass point, 17 significant digits.
pub fn rule_to_string(rule: &QuadratureRule) -> String {
    let header = RuleHeader {
        order: rule.order,
        residual: rule.residual,
        regularity_norm: rule.regularity_norm,
        alpha_used: rule.alpha_used,
        upper_endpoint: rule.measure.points().last(),
    };
    let mut out = format!("# {}\ny,w\n", serde_json::to_string(&header).expect("header serializes"));
    for (y, w) in rule.support().iter().zip(rule.weights()) {
        out.push_str(&format!("{y:.16e},{w:.16e}\n"));
    }
    out
}

pub fn parse_rule(text: &str) -> Result<QuadratureRule> {
    let mut lines = text.lines().enumerate();
    let header: RuleHeader = match lines.next() {
        Some((_, l)) if l.starts_with('#') => serde_json::from_str(l.trim_start_matches('#').trim())
            .map_err(|e| parse_error(1, format!("bad rule header: {e}")))?,
        _ => return Err(parse_error(1, "missing `# {...}` rule header")),
    };
    let mut ys = Vec::new();
    let mut ws = Vec::new();
    for (i, l) in lines {
        let l = l.trim();
        if l.is_empty() || l == "y,w" {
            continue;
        }
        match l.split(',').collect::<Vec<_>>().as_slice() {
            [y, w] => {
                ys.push(parse_real(y, i + 1)?);
                ws.push(parse_real(w, i + 1)?);
            }
            _ => return Err(parse_error(i + 1, "expected `y,w`")),
        }
    }
    let measure = DiscreteMeasure::from_nodes(&ys, &ws, header.upper_endpoint)?;
    Ok(QuadratureRule {
        measure,
        order: header.order,
        residual: header.residual,
        regularity_norm: header.regularity_norm,
        alpha_used: header.alpha_used,
        flagged: !(header.residual <= SOLVER_TOLERANCE),
    })
}

pub fn read_rule(path: &Path) -> Result<QuadratureRule> {
    parse_rule(&read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{solve_mz_weights, verify_quadrature};

    #[test]
    fn points_are_sorted_on_ingest() {
        let p = parse_points("3\n# note\n\n-1.5\n0\n").unwrap();
        assert_eq!(p.points(), &[-1.5, 0.0, 3.0]);
        assert!(matches!(parse_points("1\nx\n"), Err(Error::Parse(m)) if m.starts_with("line 2")));
        assert!(parse_points("1\n").is_err());
    }

    #[test]
    fn samples_sort_with_their_values() {
        let (p, v) = parse_samples("1,10\n-1,-10\n0,0\n").unwrap();
        assert_eq!(p.points(), &[-1.0, 0.0, 1.0]);
        assert_eq!(v, vec![-10.0, 0.0, 10.0]);
        assert!(parse_samples("1,2,3\n").is_err());
    }

    #[test]
    fn rule_round_trip_reproduces_defects() {
        let points = PointSet::equispaced_covering(5.0, 0.1).unwrap();
        let rule = solve_mz_weights(&points, 4.0).unwrap().with_alpha(0.4);
        let back = parse_rule(&rule_to_string(&rule)).unwrap();
        assert_eq!(back, rule);
        let (a, b) = (verify_quadrature(&rule, 20, 3), verify_quadrature(&back, 20, 3));
        assert!((a - b).abs() <= 1e-12);
    }

    #[test]
    fn rule_without_header_is_rejected() {
        assert!(matches!(parse_rule("y,w\n0,1\n"), Err(Error::Parse(m)) if m.starts_with("line 1")));
        assert!(parse_rule("# {\"order\":1}\n").is_err());
    }
}
