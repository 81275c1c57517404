//! Orthonormal Hermite functions and the closed-form kernels built from them.
//!
//! The functions are
//!
//! ```text
//! psi_j(x) = (-1)^j (sqrt(pi) 2^j j!)^{-1/2} e^{x^2/2} (d/dx)^j e^{-x^2}
//! ```
//!
//! evaluated by the orthonormal three-term recurrence
//!
//! ```text
//! psi_0(x)     = pi^{-1/4} e^{-x^2/2}
//! psi_{j+1}(x) = x sqrt(2/(j+1)) psi_j(x) - sqrt(j/(j+1)) psi_{j-1}(x)
//! ```
//!
//! with the Gaussian weight folded into the starting value. Beyond `|x| ~ 24`
//! the starting value underflows long before the higher functions do, so the
//! recurrence runs on a rescaled mantissa with a separate log-scale there.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `pi^{-1/4}`, the value of `psi_0(0)`.
pub const PSI0_AT_ZERO: f64 = 0.751_125_544_464_942_5;

const DIRECT_LIMIT: f64 = 24.0;
const RESCALE_ABOVE: f64 = 1e150;
const RESCALE_BY: f64 = 1e-150;
const LN_RESCALE: f64 = 345.387_763_949_107; // 150 ln 10

/// Writes `psi_0(x), ..., psi_{out.len()-1}(x)` into `out`. No validation.
pub fn psi_into(x: f64, out: &mut [f64]) {
    let n = out.len();
    if n == 0 {
        return;
    }
    if x.abs() <= DIRECT_LIMIT {
        let mut prev = 0.0;
        let mut cur = PSI0_AT_ZERO * (-0.5 * x * x).exp();
        out[0] = cur;
        for j in 0..n - 1 {
            let jf = j as f64;
            let next = x * (2.0 / (jf + 1.0)).sqrt() * cur - (jf / (jf + 1.0)).sqrt() * prev;
            prev = cur;
            cur = next;
            out[j + 1] = cur;
        }
        return;
    }

    // psi_j(x) = m_j * exp(log_scale)
    let mut log_scale = -0.5 * x * x;
    let mut prev = 0.0;
    let mut cur = PSI0_AT_ZERO;
    out[0] = scaled(cur, log_scale);
    for j in 0..n - 1 {
        let jf = j as f64;
        let next = x * (2.0 / (jf + 1.0)).sqrt() * cur - (jf / (jf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE_ABOVE {
            cur *= RESCALE_BY;
            prev *= RESCALE_BY;
            log_scale += LN_RESCALE;
        }
        out[j + 1] = scaled(cur, log_scale);
    }
}

#[inline]
fn scaled(mantissa: f64, log_scale: f64) -> f64 {
    if log_scale >= -700.0 {
        mantissa * log_scale.exp()
    } else {
        let half = (0.5 * log_scale).exp();
        mantissa * half * half
    }
}

/// Writes `psi_j(x)` and `psi_j'(x)` for `j < psi.len()`.
///
/// Uses `psi_j' = sqrt(2j) psi_{j-1} - x psi_j`.
pub fn psi_and_derivative_into(x: f64, psi: &mut [f64], dpsi: &mut [f64]) {
    assert_eq!(psi.len(), dpsi.len());
    psi_into(x, psi);
    for j in 0..psi.len() {
        let lower = if j == 0 { 0.0 } else { (2.0 * j as f64).sqrt() * psi[j - 1] };
        dpsi[j] = lower - x * psi[j];
    }
}

fn check_args(count: usize, x: f64) -> Result<()> {
    if count == 0 {
        return Err(Error::domain("at least one Hermite function must be requested"));
    }
    if !x.is_finite() {
        return Err(Error::domain(format!("abscissa must be finite, got {x}")));
    }
    Ok(())
}

/// `[psi_0(x), ..., psi_{count-1}(x)]`.
pub fn psi_batch(count: usize, x: f64) -> Result<Vec<f64>> {
    check_args(count, x)?;
    let mut out = vec![0.0; count];
    psi_into(x, &mut out);
    Ok(out)
}

/// `[psi_0'(x), ..., psi_{count-1}'(x)]`.
pub fn psi_derivative_batch(count: usize, x: f64) -> Result<Vec<f64>> {
    check_args(count, x)?;
    let mut psi = vec![0.0; count];
    let mut dpsi = vec![0.0; count];
    psi_and_derivative_into(x, &mut psi, &mut dpsi);
    Ok(dpsi)
}

/// The Gaussian weight `w(x) = exp(-x^2/2)`.
pub fn weight(x: f64) -> f64 {
    (-0.5 * x * x).exp()
}

/// Evaluator for `psi_0, ..., psi_{J-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HermiteBasis {
    max_index: usize,
}

impl HermiteBasis {
    pub fn new(max_index: usize) -> Result<Self> {
        if max_index == 0 {
            return Err(Error::domain("a Hermite basis needs at least one function"));
        }
        Ok(Self { max_index })
    }

    /// Basis spanning `Pi_t = span{psi_j : sqrt(j) < t}`.
    pub fn for_order(t: f64) -> Result<Self> {
        Self::new(space_dimension(t).max(1))
    }

    pub fn len(&self) -> usize {
        self.max_index
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self, x: f64) -> Result<Vec<f64>> {
        psi_batch(self.max_index, x)
    }

    pub fn derivatives(&self, x: f64) -> Result<Vec<f64>> {
        psi_derivative_batch(self.max_index, x)
    }

    pub fn weight(&self, x: f64) -> f64 {
        weight(x)
    }
}

/// Number of indices `j >= 0` with `sqrt(j) < t`, i.e. `ceil(t^2)` for `t > 0`.
pub fn space_dimension(t: f64) -> usize {
    if !(t > 0.0) {
        return 0;
    }
    let t2 = t * t;
    let mut d = t2.ceil() as usize;
    // guard against t^2 landing a hair above an integer
    while d > 0 && ((d - 1) as f64).sqrt() >= t {
        d -= 1;
    }
    while (d as f64).sqrt() < t {
        d += 1;
    }
    d
}

/// A finite Hermite expansion `sum_j a_j psi_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedPolynomial {
    coeffs: Vec<f64>,
}

impl WeightedPolynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    /// The single basis function `psi_index`.
    pub fn basis(index: usize) -> Self {
        let mut coeffs = vec![0.0; index + 1];
        coeffs[index] = 1.0;
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Whether the expansion lies in `Pi_t`.
    pub fn in_space(&self, t: f64) -> bool {
        let dim = space_dimension(t);
        self.coeffs.iter().skip(dim).all(|a| *a == 0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        if self.coeffs.is_empty() {
            return 0.0;
        }
        let mut psi = vec![0.0; self.coeffs.len()];
        psi_into(x, &mut psi);
        dot(&self.coeffs, &psi)
    }

    pub fn eval_derivative(&self, x: f64) -> f64 {
        if self.coeffs.is_empty() {
            return 0.0;
        }
        let n = self.coeffs.len();
        let mut psi = vec![0.0; n];
        let mut dpsi = vec![0.0; n];
        psi_and_derivative_into(x, &mut psi, &mut dpsi);
        dot(&self.coeffs, &dpsi)
    }

    /// `L^2` norm, which by orthonormality is the Euclidean norm of the coefficients.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|a| a * a).sum::<f64>().sqrt()
    }
}

/// `sum_j P.a_j psi_j(x)`.
pub fn weighted_poly_eval(p: &WeightedPolynomial, x: f64) -> f64 {
    p.eval(x)
}

/// Left-to-right dot product; all expansions are summed in this order.
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Strictly increasing evaluation abscissae.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalGrid {
    xs: Vec<f64>,
}

impl EvalGrid {
    pub fn new(xs: Vec<f64>) -> Result<Self> {
        if xs.iter().any(|x| !x.is_finite()) {
            return Err(Error::domain("grid abscissae must be finite"));
        }
        if xs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain("grid abscissae must be strictly increasing"));
        }
        Ok(Self { xs })
    }

    /// `min, min + step, ...` up to and including `max` (within a rounding slack).
    pub fn from_range(min: f64, max: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::domain(format!("grid step must be positive, got {step}")));
        }
        if !(min.is_finite() && max.is_finite()) || max < min {
            return Err(Error::domain(format!("invalid grid range {min}:{max}")));
        }
        let count = ((max - min) / step + 1e-9).floor() as usize + 1;
        Self::new((0..count).map(|i| min + i as f64 * step).collect())
    }

    /// Parses `min:max:step`.
    pub fn parse(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("grid spec must be min:max:step, got {spec:?}")));
        }
        let mut vals = [0.0; 3];
        for (v, p) in vals.iter_mut().zip(&parts) {
            *v = p
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("bad grid number {p:?}: {e}")))?;
        }
        Self::from_range(vals[0], vals[1], vals[2])
    }

    pub fn points(&self) -> &[f64] {
        &self.xs
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Indices of the grid points inside `[lo, hi]`.
    pub fn indices_within(&self, lo: f64, hi: f64) -> std::ops::Range<usize> {
        let start = self.xs.partition_point(|x| *x < lo);
        let end = self.xs.partition_point(|x| *x <= hi);
        start..end.max(start)
    }
}

/// Mehler's closed form of `sum_j r^j psi_j(x) psi_j(y)`.
pub fn mehler(x: f64, y: f64, r: f64) -> Result<f64> {
    if !(r.abs() < 1.0) {
        return Err(Error::domain(format!("Mehler parameter must satisfy |r| < 1, got {r}")));
    }
    let one_minus = 1.0 - r * r;
    let d = x - y;
    let expo = -r / one_minus * d * d - (1.0 - r) / (1.0 + r) * 0.5 * (x * x + y * y);
    Ok((PI * one_minus).powf(-0.5) * expo.exp())
}

struct HeatParts {
    kernel: f64,
    sinh: f64,
    tanh_half: f64,
}

fn heat_parts(x: f64, y: f64, t: f64) -> Result<HeatParts> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("heat kernel time must be positive, got {t}")));
    }
    // e^{t/2} (2 pi sinh t)^{-1/2} = (pi (1 - e^{-2t}))^{-1/2}
    let prefactor = (PI * -(-2.0 * t).exp_m1()).powf(-0.5);
    let sinh = t.sinh();
    let tanh_half = (0.5 * t).tanh();
    let d = x - y;
    let expo = -d * d / (2.0 * sinh) - 0.5 * tanh_half * (x * x + y * y);
    Ok(HeatParts { kernel: prefactor * expo.exp(), sinh, tanh_half })
}

/// Closed form of `sum_j e^{-jt} psi_j(x) psi_j(y)`, i.e. Mehler at `r = e^{-t}`.
pub fn heat_kernel_closed(x: f64, y: f64, t: f64) -> Result<f64> {
    Ok(heat_parts(x, y, t)?.kernel)
}

/// Closed form of `sum_j e^{-jt} psi_j'(x) psi_j(y)`.
pub fn heat_kernel_dx_closed(x: f64, y: f64, t: f64) -> Result<f64> {
    let p = heat_parts(x, y, t)?;
    Ok(p.kernel * ((y - x) / p.sinh - x * p.tanh_half))
}

/// Closed form of `sum_j e^{-jt} psi_j'(x) psi_j'(y)`.
pub fn heat_kernel_dxdy_closed(x: f64, y: f64, t: f64) -> Result<f64> {
    let p = heat_parts(x, y, t)?;
    let ax = (y - x) / p.sinh - x * p.tanh_half;
    let ay = (x - y) / p.sinh - y * p.tanh_half;
    Ok(p.kernel * (1.0 / p.sinh + ax * ay))
}

/// Truncated series `sum_{j<terms} e^{-jt} psi_j(x) psi_j(y)`.
pub fn heat_kernel_series(x: f64, y: f64, t: f64, terms: usize) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("heat kernel time must be positive, got {t}")));
    }
    let px = psi_batch(terms, x)?;
    let py = psi_batch(terms, y)?;
    Ok(px
        .iter()
        .zip(&py)
        .enumerate()
        .map(|(j, (a, b))| (-(j as f64) * t).exp() * a * b)
        .sum())
}

/// `integral over R of psi_m(u) du`.
///
/// Zero for odd `m`; for `m = 2r` it equals `sqrt(2 pi) |psi_{2r}(0)|`, which
/// follows from `psi_m` being an eigenfunction of the Fourier transform with
/// eigenvalue `(-i)^m` together with `sign psi_{2r}(0) = (-1)^r`.
pub fn psi_integral(m: usize) -> f64 {
    psi_integrals(m + 1)[m]
}

/// `[psi_integral(0), ..., psi_integral(count-1)]`.
pub fn psi_integrals(count: usize) -> Vec<f64> {
    let mut out = vec![0.0; count];
    let mut even = (2.0 * PI).sqrt() * PSI0_AT_ZERO;
    for (m, slot) in out.iter_mut().enumerate() {
        if m % 2 == 0 {
            if m > 0 {
                let mf = m as f64;
                even *= ((mf - 1.0) / mf).sqrt();
            }
            *slot = even;
        }
    }
    out
}
