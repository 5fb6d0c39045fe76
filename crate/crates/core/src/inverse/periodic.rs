//! The extension of `S` beyond `Omega` when `n = 2k`, where reflecting across
//! the outer edges produces the translation `S(w + 2 phi) = -S(w)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::InverseMap;
use crate::error::{Error, Result};
use crate::geometry::{Domain, Status};
use crate::params::complex_serde;

/// Distance (in units of `phi`) from the multiplicity-2 points `omega^j (2m+1) phi`
/// inside which a value is flagged as a seam value.
pub const SEAM_RADIUS: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodicValue {
    #[serde(with = "complex_serde")]
    pub value: Complex64,
    /// The point is within the seam radius of a multiplicity-2 point, where
    /// the inverse is ill-conditioned.
    pub seam: bool,
}

impl InverseMap {
    fn require_periodic(&self) -> Result<u32> {
        let params = self.params();
        match params.k_int() {
            Some(k) if 2 * k == params.n => Ok(params.n / 2),
            _ => Err(Error::NotApplicable(format!(
                "the periodic extension needs n = 2k, got n = {}, k = {}",
                params.n, params.k
            ))),
        }
    }

    /// `S(w)` on the union of translates `omega^j (2 m phi + closure(Omega))`.
    pub fn s_periodic(&self, w: Complex64) -> Result<PeriodicValue> {
        let half = self.require_periodic()?;
        if !w.is_finite() {
            return Err(Error::InvalidArgument("non-finite argument".into()));
        }
        let params = *self.params();
        let phi = self.phi();
        let region = self.region();
        let mut nearest_exterior = f64::INFINITY;
        for j in 0..half {
            let rot = params.omega_pow(j as i64);
            let u = w * rot.conj();
            let m = (u.re / (2.0 * phi)).round();
            let v = u - 2.0 * m * phi;
            let membership = region.classify(v, Domain::Omega);
            if membership.status == Status::Exterior {
                let red = crate::geometry::fold(v, &params);
                nearest_exterior = nearest_exterior.min(-region.edge_distance(red.w0));
                continue;
            }
            let seam = (0..params.n).any(|i| (v - params.omega_pow(i as i64) * phi).norm() < SEAM_RADIUS * phi);
            let s = self.s_eval(v)?;
            let sign = if (m as i64).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            return Ok(PeriodicValue {
                value: rot * s * sign,
                seam,
            });
        }
        Err(Error::Exterior {
            distance: nearest_exterior,
        })
    }
}
