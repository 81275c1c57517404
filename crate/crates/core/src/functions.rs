//! Built-in test functions.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermite::psi_batch;

/// Number of terms kept in the lacunary series of [`Builtin::F2Tapered`].
pub const F2_TERMS: u32 = 9;

/// Frequency margin kept by [`Builtin::eval_for_band`].
pub const BAND_MARGIN: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Builtin {
    /// `exp(-x^2)`
    Gaussian,
    /// `psi_j`
    Hermite(usize),
    /// `sqrt|x| exp(-x^2)`
    SqrtAbsBump,
    /// `sqrt|cos x| exp(-x^2/8)`
    F1Tapered,
    /// `sum_{k=0}^{8} 2^{-k} cos(4^k x) exp(-x^2/8)`
    F2Tapered,
}

impl Builtin {
    pub const NAMES: [&'static str; 5] = ["gaussian", "hermite:j", "sqrtabs_bump", "f1_tapered", "f2_tapered"];

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Builtin::Gaussian => (-x * x).exp(),
            Builtin::Hermite(j) => psi_batch(j + 1, x).map(|v| v[j]).unwrap_or(0.0),
            Builtin::SqrtAbsBump => x.abs().sqrt() * (-x * x).exp(),
            Builtin::F1Tapered => x.cos().abs().sqrt() * (-x * x / 8.0).exp(),
            Builtin::F2Tapered => {
                let series: f64 = (0..F2_TERMS).map(|k| (4f64.powi(k as i32) * x).cos() / 2f64.powi(k as i32)).sum();
                series * (-x * x / 8.0).exp()
            }
        }
    }

    /// Points in `[lo, hi]` where the function is not smooth.
    pub fn breakpoints(&self, lo: f64, hi: f64) -> Vec<f64> {
        match self {
            Builtin::SqrtAbsBump if lo <= 0.0 && 0.0 <= hi => vec![0.0],
            Builtin::F1Tapered => {
                let first = ((lo - FRAC_PI_2) / std::f64::consts::PI).ceil() as i64;
                let last = ((hi - FRAC_PI_2) / std::f64::consts::PI).floor() as i64;
                (first..=last).map(|k| FRAC_PI_2 + k as f64 * std::f64::consts::PI).collect()
            }
            _ => Vec::new(),
        }
    }

    /// Radius beyond which `|f|` is below 1e-18.
    pub fn support_radius(&self) -> f64 {
        match *self {
            Builtin::Gaussian | Builtin::SqrtAbsBump => 7.0,
            Builtin::Hermite(j) => 2.0 * (j as f64).sqrt() + 10.0,
            Builtin::F1Tapered | Builtin::F2Tapered => 19.0,
        }
    }

    /// The function with spectral content above `band + BAND_MARGIN` removed.
    ///
    /// Inner products with `psi_j`, `sqrt(2j+1) <= band`, are unchanged to
    /// far below rounding: the Fourier transform of `psi_j` is `psi_j` itself,
    /// which is negligible that far past its turning point.
    pub fn eval_for_band(&self, x: f64, band: f64) -> f64 {
        match *self {
            Builtin::F2Tapered => {
                let series: f64 = (0..F2_TERMS)
                    .map(|k| 4f64.powi(k as i32))
                    .take_while(|w| *w <= band + BAND_MARGIN)
                    .enumerate()
                    .map(|(k, w)| (w * x).cos() / 2f64.powi(k as i32))
                    .sum();
                series * (-x * x / 8.0).exp()
            }
            _ => self.eval(x),
        }
    }

    /// Highest angular frequency of [`Builtin::eval_for_band`].
    pub fn frequency(&self, band: f64) -> f64 {
        match *self {
            Builtin::Hermite(j) => (2.0 * j as f64 + 1.0).sqrt(),
            Builtin::F2Tapered => (0..F2_TERMS)
                .map(|k| 4f64.powi(k as i32))
                .take_while(|w| *w <= band + BAND_MARGIN)
                .fold(1.0, f64::max),
            _ => 1.0,
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Builtin::Gaussian => write!(f, "gaussian"),
            Builtin::Hermite(j) => write!(f, "hermite:{j}"),
            Builtin::SqrtAbsBump => write!(f, "sqrtabs_bump"),
            Builtin::F1Tapered => write!(f, "f1_tapered"),
            Builtin::F2Tapered => write!(f, "f2_tapered"),
        }
    }
}

impl FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::Unknown { kind: "function", name: s.to_string() };
        match s {
            "gaussian" => Ok(Builtin::Gaussian),
            "sqrtabs_bump" => Ok(Builtin::SqrtAbsBump),
            "f1_tapered" => Ok(Builtin::F1Tapered),
            "f2_tapered" => Ok(Builtin::F2Tapered),
            _ => match s.strip_prefix("hermite:") {
                Some(j) => j.parse().map(Builtin::Hermite).map_err(|_| unknown()),
                None => Err(unknown()),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for b in [Builtin::Gaussian, Builtin::Hermite(7), Builtin::SqrtAbsBump, Builtin::F1Tapered, Builtin::F2Tapered] {
            assert_eq!(b.to_string().parse::<Builtin>().unwrap(), b);
        }
        assert!(matches!("nope".parse::<Builtin>(), Err(Error::Unknown { .. })));
        assert!("hermite:x".parse::<Builtin>().is_err());
    }

    #[test]
    fn values() {
        assert_eq!(Builtin::Gaussian.eval(0.0), 1.0);
        assert_eq!(Builtin::SqrtAbsBump.eval(0.0), 0.0);
        assert!((Builtin::F1Tapered.eval(0.0) - 1.0).abs() < 1e-15);
        assert!(Builtin::F1Tapered.eval(FRAC_PI_2).abs() < 1e-7);
        let full: f64 = (0..F2_TERMS).map(|k| 0.5f64.powi(k as i32)).sum();
        assert!((Builtin::F2Tapered.eval(0.0) - full).abs() < 1e-15);
        let psi3 = psi_batch(4, 0.7).unwrap()[3];
        assert_eq!(Builtin::Hermite(3).eval(0.7), psi3);
    }

    #[test]
    fn band_limiting_keeps_low_terms() {
        let x = 0.3;
        assert_eq!(Builtin::F2Tapered.eval_for_band(x, 1e6), Builtin::F2Tapered.eval(x));
        let low = (x.cos() + (4.0 * x).cos() / 2.0 + (16.0 * x).cos() / 4.0) * (-x * x / 8.0).exp();
        assert!((Builtin::F2Tapered.eval_for_band(x, 10.0) - low).abs() < 1e-15);
        assert_eq!(Builtin::F2Tapered.frequency(10.0), 16.0);
        assert_eq!(Builtin::Gaussian.eval_for_band(x, 1.0), Builtin::Gaussian.eval(x));
    }

    #[test]
    fn f1_breakpoints() {
        let b = Builtin::F1Tapered.breakpoints(-5.0, 5.0);
        assert_eq!(b.len(), 4);
        assert!((b[1] + FRAC_PI_2).abs() < 1e-15 && (b[2] - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(Builtin::SqrtAbsBump.breakpoints(1.0, 2.0), Vec::<f64>::new());
    }

    #[test]
    fn negligible_beyond_support_radius() {
        for b in [Builtin::Gaussian, Builtin::Hermite(30), Builtin::SqrtAbsBump, Builtin::F1Tapered, Builtin::F2Tapered] {
            let r = b.support_radius();
            assert!(b.eval(r).abs() < 1e-18 && b.eval(-r - 1.0).abs() < 1e-18, "{b}");
        }
    }
}
