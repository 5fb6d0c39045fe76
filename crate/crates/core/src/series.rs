//! Maclaurin coefficients of `F` and of its inverse `S`.
//!
//! Both series are odd under `z -> omega z` in the sense that only the powers
//! `z^{nj+1}` occur. Writing `F(z) = z f(z^n)` and `S(w) = w s(w^n)`, only the
//! reduced coefficients `b_j` are stored, so the support pattern holds by
//! construction.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::Params;

/// Largest supported truncation order.
pub const MAX_ORDER: usize = 4096;
/// Minimum number of nonzero coefficients for a radius estimate.
pub const MIN_RADIUS_TERMS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SeriesRole {
    FSeries,
    SSeries,
}

/// Truncated Maclaurin series `sum_j b_j z^{nj+1}` with `nj + 1 <= order`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSeries {
    pub params: Params,
    pub role: SeriesRole,
    pub order: usize,
    /// `b[j]` is the coefficient of `z^{nj+1}`.
    pub b: Vec<f64>,
}

impl CoefficientSeries {
    /// Coefficient of `z^m`.
    pub fn coeff(&self, m: usize) -> f64 {
        let n = self.params.n as usize;
        if m == 0 || !(m - 1).is_multiple_of(n) {
            return 0.0;
        }
        self.b.get((m - 1) / n).copied().unwrap_or(0.0)
    }

    /// Dense coefficients, index `m` holding the coefficient of `z^m`.
    pub fn dense(&self) -> Vec<f64> {
        (0..=self.order).map(|m| self.coeff(m)).collect()
    }

    /// Exponent `nj + 1` of the `j`-th stored coefficient.
    pub fn exponent(&self, j: usize) -> usize {
        self.params.n as usize * j + 1
    }

    /// Partial sum at `z`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let y = z.powu(self.params.n);
        let reduced = self.b.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &b| acc * y + b);
        z * reduced
    }
}

fn reduced_len(params: &Params, order: usize) -> Result<usize> {
    if order == 0 || order > MAX_ORDER {
        return Err(Error::InvalidArgument(format!("series order must be in 1..={MAX_ORDER}, got {order}")));
    }
    Ok((order - 1) / params.n as usize + 1)
}

/// Series of `F`: `b_j = (k/n)_j / (j! (nj + 1))`.
pub fn f_series(params: &Params, order: usize) -> Result<CoefficientSeries> {
    let len = reduced_len(params, order)?;
    let alpha = params.alpha();
    let n = params.nf();
    let mut rising = 1.0;
    let b = (0..len)
        .map(|j| {
            let jf = j as f64;
            let v = rising / (n * jf + 1.0);
            rising *= (alpha + jf) / (jf + 1.0);
            v
        })
        .collect();
    Ok(CoefficientSeries {
        params: *params,
        role: SeriesRole::FSeries,
        order,
        b,
    })
}

/// Neumaier-compensated sum.
fn compensated_sum(terms: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for t in terms {
        let s = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - s) + t;
        } else {
            comp += (t - s) + sum;
        }
        sum = s;
    }
    sum + comp
}

/// Truncated product of two series to `len` terms.
pub(crate) fn mul(a: &[f64], b: &[f64], len: usize) -> Vec<f64> {
    (0..len)
        .map(|m| {
            let lo = m.saturating_sub(b.len().saturating_sub(1));
            let hi = m.min(a.len().saturating_sub(1));
            if lo > hi || a.is_empty() || b.is_empty() {
                0.0
            } else {
                compensated_sum((lo..=hi).map(|i| a[i] * b[m - i]))
            }
        })
        .collect()
}

/// `v^beta` for a series with `v[0] = 1`, by the J.C.P. Miller recurrence
/// `m P_m = sum_{i=1}^m ((beta + 1) i - m) v_i P_{m-i}`.
pub(crate) fn pow(v: &[f64], beta: f64, len: usize) -> Vec<f64> {
    debug_assert!((v[0] - 1.0).abs() < 1e-15);
    let mut out = vec![0.0; len];
    if len == 0 {
        return out;
    }
    out[0] = 1.0;
    for m in 1..len {
        let mf = m as f64;
        let top = m.min(v.len() - 1);
        let s = compensated_sum((1..=top).map(|i| ((beta + 1.0) * i as f64 - mf) * v[i] * out[m - i]));
        out[m] = s / mf;
    }
    out
}

/// One Newton step on the reduced series `s` of length `len`.
fn newton_step(s: &[f64], params: &Params) -> Vec<f64> {
    let len = s.len();
    let n = params.nf();
    let alpha = params.alpha();
    let u = pow(s, n, len);
    // v = 1 - y u
    let mut v = vec![0.0; len];
    v[0] = 1.0;
    for j in 1..len {
        v[j] = -u[j - 1];
    }
    let ds: Vec<f64> = s.iter().enumerate().map(|(j, &c)| (n * j as f64 + 1.0) * c).collect();
    let h = mul(&pow(&v, -alpha, len), &ds, len);
    let mut err: Vec<f64> = h.iter().enumerate().map(|(j, &c)| c / (n * j as f64 + 1.0)).collect();
    err[0] -= 1.0;
    let delta = mul(&err, &pow(&v, alpha, len), len);
    s.iter().zip(&delta).map(|(a, d)| a - d).collect()
}

/// Series of `S` by Newton iteration on the equation `F(S(w)) = w`,
/// doubling the number of correct terms each step.
pub fn s_series(params: &Params, order: usize) -> Result<CoefficientSeries> {
    let len = reduced_len(params, order)?;
    let mut s = vec![1.0];
    let mut cur = 1;
    while cur < len {
        cur = (2 * cur).min(len);
        s.resize(cur, 0.0);
        s = newton_step(&s, params);
    }
    // Final sweep at full length cleans up rounding.
    s = newton_step(&s, params);
    if s.iter().any(|c| !c.is_finite()) {
        return Err(Error::Divergent("series reversion produced non-finite coefficients"));
    }
    Ok(CoefficientSeries {
        params: *params,
        role: SeriesRole::SSeries,
        order,
        b: s,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RadiusMethod {
    DombSykes,
    RootTest,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusEstimate {
    pub radius: f64,
    /// RMS residual of the extrapolation fit relative to the radius; for the
    /// root test, the relative spread of the tail values.
    pub quality: f64,
    pub method: RadiusMethod,
}

/// Radius of convergence of an `S` series from the last half of its
/// nonzero coefficients.
pub fn radius_estimate(series: &CoefficientSeries) -> Result<RadiusEstimate> {
    if series.role != SeriesRole::SSeries {
        return Err(Error::InvalidArgument("radius estimation needs an S series".into()));
    }
    let nonzero = series.b.iter().filter(|b| **b != 0.0).count();
    if nonzero < MIN_RADIUS_TERMS {
        return Err(Error::InsufficientCoefficients(format!(
            "{nonzero} nonzero coefficients, need at least {MIN_RADIUS_TERMS}"
        )));
    }
    let n = series.params.nf();
    let b = &series.b;
    let last = b.len() - 1;
    let start = last - last.div_ceil(2);

    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for j in start.max(1)..last {
        if b[j] != 0.0 && b[j + 1] != 0.0 {
            xs.push(1.0 / j as f64);
            ys.push((b[j] / b[j + 1]).abs().powf(1.0 / n));
        }
    }
    if xs.len() >= 3 {
        let (slope, intercept) = linear_fit(&xs, &ys);
        if intercept.is_finite() && intercept > 0.0 {
            let rms = (xs
                .iter()
                .zip(&ys)
                .map(|(x, y)| (y - intercept - slope * x).powi(2))
                .sum::<f64>()
                / xs.len() as f64)
                .sqrt();
            return Ok(RadiusEstimate {
                radius: intercept,
                quality: rms / intercept,
                method: RadiusMethod::DombSykes,
            });
        }
    }

    let roots: Vec<f64> = (start.max(1)..=last)
        .filter(|&j| b[j] != 0.0)
        .map(|j| b[j].abs().powf(-1.0 / (n * j as f64)))
        .collect();
    let min = roots.iter().copied().fold(f64::INFINITY, f64::min);
    let max = roots.iter().copied().fold(0.0, f64::max);
    Ok(RadiusEstimate {
        radius: min,
        quality: (max - min) / min,
        method: RadiusMethod::RootTest,
    })
}

fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let slope = crate::inverse::fit_slope(x, y);
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    (slope, my - slope * mx)
}
