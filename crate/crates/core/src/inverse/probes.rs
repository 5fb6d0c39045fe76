//! Local probes of `S` near the special points of the boundary: the pole of
//! `S^{n/2}` at `P` when `k = n/2 + 1`, and the power law at `A` when `k = 1`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::InverseMap;
use crate::error::{Error, Result};
use crate::params::complex_serde;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoleProbe {
    pub exponent: f64,
    #[serde(with = "complex_serde")]
    pub residue: Complex64,
    pub spread: f64,
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

impl InverseMap {
    /// Default probe radii, `[1e-2, 1e-3, 1e-4] * phi`.
    pub fn default_probe_radii(&self) -> Vec<f64> {
        [1e-2, 1e-3, 1e-4].iter().map(|r| r * self.phi()).collect()
    }

    /// Approaches `P` along the bisector and fits `|S^{n/2}| ~ C |P - w|^(-e)`.
    pub fn pole_probe(&self, radii: &[f64]) -> Result<PoleProbe> {
        let params = *self.params();
        let straight = params.n.is_multiple_of(2) && params.k_int() == Some(params.n / 2 + 1);
        if !straight {
            return Err(Error::NotApplicable(format!(
                "the pole probe needs n even and k = n/2 + 1, got n = {}, k = {}",
                params.n, params.k
            )));
        }
        if radii.len() < 2 || radii.iter().any(|r| r.is_nan() || *r <= 0.0) {
            return Err(Error::InvalidArgument("the pole probe needs at least two positive radii".into()));
        }
        let p = self.region().p.expect("k > 1 has a vertex");
        let dir = params.bisector();
        let half = (params.n / 2) as i32;
        let mut log_r = Vec::with_capacity(radii.len());
        let mut log_mag = Vec::with_capacity(radii.len());
        let mut residues = Vec::with_capacity(radii.len());
        for &r in radii {
            let w = p - dir * r;
            let s = self.s_fundamental(w)?;
            let power = s.powi(half);
            log_r.push(r.ln());
            log_mag.push(power.norm().ln());
            residues.push((p - w) * power);
        }
        let exponent = -fit_slope(&log_r, &log_mag);
        let residue = residues.iter().sum::<Complex64>() / residues.len() as f64;
        let spread = residues
            .iter()
            .map(|c| (c - residue).norm() / residue.norm())
            .fold(0.0, f64::max);
        Ok(PoleProbe {
            exponent,
            residue,
            spread,
        })
    }

    /// Fits `|S(phi - eps) - 1| ~ eps^e` for `eps` in `[1e-2, 1e-3, 1e-4] * phi`.
    pub fn corner_exponent_probe(&self) -> Result<f64> {
        let params = self.params();
        if params.k != 1.0 {
            return Err(Error::NotApplicable(format!(
                "the corner exponent probe needs k = 1, got k = {}",
                params.k
            )));
        }
        let phi = self.phi();
        let mut x = Vec::new();
        let mut y = Vec::new();
        for eps in self.default_probe_radii() {
            let s = self.s_fundamental(Complex64::new(phi - eps, 0.0))?;
            x.push(eps.ln());
            y.push((s - 1.0).norm().ln());
        }
        Ok(fit_slope(&x, &y))
    }
}
