//! The generalized sine `S_{n,k}` on its domain of univalence `Omega`.
//!
//! Values on the fundamental region (triangle `O A P`, or the half-strip
//! below the bisector when `k <= 1`) come from continuing
//! `dS/dw = (1 - S^n)^(k/n)` along the ray `tau * w0` and polishing with
//! Newton's method on the residual `F(S) - w0`. Everything else in `Omega`
//! is reached through rotations by `omega` and the reflection across the
//! bisector. Points outside `Omega` are refused.

mod ode;
mod periodic;
mod probes;

use std::cell::Cell;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::{inverse_kernel_sigma, inverse_kernel_unchecked, kernel_unchecked, sector_arg, ForwardMap};
use crate::geometry::{apply_symmetry, Domain, Reduced, Region, Status};
use crate::params::Params;
use crate::quadrature::QuadConfig;

pub use periodic::PeriodicValue;
pub use probes::{fit_slope, PoleProbe};

use ode::{integrate, OdeOptions};

/// Radius around `A` (in the z-plane, around `S = 1`) where Newton works in
/// the uniformizing coordinate `eta = (S - 1)^(1/p)`.
const CORNER_NEWTON_RADIUS: f64 = 0.25;

/// Evaluation tolerances. Distances `delta_p` and `delta_slit` are in units
/// of `phi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalConfig {
    pub quad: QuadConfig,
    pub newton_tol: f64,
    pub max_newton: usize,
    pub ode_rel_tol: f64,
    pub delta_p: f64,
    pub delta_slit: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            // The F residual can only be driven below newton_tol if the
            // quadrature behind it is tighter still.
            quad: QuadConfig {
                abs_tol: 1e-14,
                rel_tol: 1e-13,
                ..QuadConfig::default()
            },
            newton_tol: 1e-12,
            max_newton: 50,
            ode_rel_tol: 1e-10,
            delta_p: 1e-6,
            delta_slit: 1e-9,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        self.quad.validate()?;
        let ok = self.newton_tol > 0.0
            && self.max_newton > 0
            && self.ode_rel_tol > 0.0
            && self.delta_p > 0.0
            && self.delta_slit > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid evaluation config {self:?}")))
        }
    }

    /// Override every tolerance-like field from a single target tolerance.
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.newton_tol = tol;
        self.quad.abs_tol = tol;
        self.quad.rel_tol = (100.0 * tol).min(1e-6);
        self.ode_rel_tol = (100.0 * tol).min(1e-6);
        self
    }
}

/// `S_{n,k}` together with the forward map it inverts.
#[derive(Debug, Clone)]
pub struct InverseMap {
    pub forward: ForwardMap,
    pub cfg: EvalConfig,
}

impl InverseMap {
    pub fn new(params: Params, cfg: EvalConfig) -> Result<Self> {
        cfg.validate()?;
        let forward = ForwardMap::new(params, cfg.quad)?;
        let region = forward.region.clone().with_boundary_band(cfg.delta_slit * forward.phi());
        Ok(Self {
            forward: ForwardMap { region, ..forward },
            cfg,
        })
    }

    pub fn params(&self) -> &Params {
        &self.forward.params
    }

    pub fn region(&self) -> &Region {
        &self.forward.region
    }

    pub fn phi(&self) -> f64 {
        self.forward.phi()
    }

    fn accept_tol(&self, w: Complex64) -> f64 {
        self.cfg.newton_tol * (1.0 + w.norm())
    }

    fn check_near_p(&self, w: Complex64) -> Result<()> {
        if let Some(d) = self.region().distance_to_p(w) {
            if d < self.cfg.delta_p * self.phi() {
                return Err(Error::NearP { distance: d });
            }
        }
        Ok(())
    }

    /// `S` on the closed fundamental region.
    pub fn s_fundamental(&self, w0: Complex64) -> Result<Complex64> {
        let params = *self.params();
        let region = self.region();
        if !w0.is_finite() {
            return Err(Error::InvalidArgument("non-finite argument".into()));
        }
        let theta = w0.im.atan2(w0.re);
        let slack = 1e-12;
        if w0.norm() > 0.0 && (theta < -slack || theta > params.half_angle() + slack) {
            return Err(Error::InvalidArgument(format!("{w0} is not in the fundamental half-sector")));
        }
        let g = region.edge_distance(w0);
        if g < -region.eps_bnd {
            return Err(Error::Exterior { distance: -g });
        }
        self.check_near_p(w0)?;
        if w0 == Complex64::new(0.0, 0.0) {
            return Ok(w0);
        }
        if (w0 - self.phi()).norm() <= 4.0 * f64::EPSILON * self.phi() {
            return Ok(Complex64::new(1.0, 0.0));
        }

        let opts = OdeOptions {
            rtol: self.cfg.ode_rel_tol,
            ..OdeOptions::default()
        };
        let s = integrate(
            |_t, s| w0 * inverse_kernel_unchecked(s, &params),
            |_, _| {},
            Complex64::new(0.0, 0.0),
            0.0,
            1.0,
            &opts,
        )?;
        self.polish(s, w0)
    }

    /// Newton refinement of `s` towards `F(s) = w0`; steps are accepted only
    /// when the residual shrinks.
    fn polish(&self, mut s: Complex64, w0: Complex64) -> Result<Complex64> {
        if (s - 1.0).norm() < CORNER_NEWTON_RADIUS {
            return self.polish_near_corner(s, w0);
        }
        let fwd = &self.forward;
        let params = &fwd.params;
        let tol = self.accept_tol(w0);
        let residual = |s: Complex64| fwd.eval(s).map(|f| f - w0);
        let mut r = residual(s)?;
        for _ in 0..self.cfg.max_newton {
            if r.norm() <= tol {
                break;
            }
            let step = r * inverse_kernel_unchecked(s, params);
            let mut lambda = 1.0;
            let mut improved = false;
            for _ in 0..30 {
                let cand = s - step * lambda;
                if let Ok(rc) = residual(cand) {
                    if rc.norm() < r.norm() {
                        s = cand;
                        r = rc;
                        improved = true;
                        break;
                    }
                }
                lambda *= 0.5;
            }
            if !improved {
                break;
            }
            if (s - 1.0).norm() < CORNER_NEWTON_RADIUS {
                return self.polish_near_corner(s, w0);
            }
        }
        self.finish(s, r, w0)
    }

    fn finish(&self, s: Complex64, r: Complex64, w0: Complex64) -> Result<Complex64> {
        if r.norm() <= self.accept_tol(w0) {
            Ok(s)
        } else {
            Err(Error::ContinuationFailed {
                tau: 1.0,
                reason: "Newton correction did not reach the residual tolerance",
            })
        }
    }

    /// Newton in `eta` with `S = 1 + eta^p`, `p = n/(n-k)`, where
    /// `eta -> F(1 + eta^p)` is analytic with non-vanishing derivative.
    fn polish_near_corner(&self, s: Complex64, w0: Complex64) -> Result<Complex64> {
        let params = *self.params();
        let p = params.corner_power();
        let alpha = params.alpha();
        let max_arg = std::f64::consts::PI / p;
        let clamp_eta = |eta: Complex64| {
            let a = eta.arg().clamp(0.0, max_arg);
            Complex64::from_polar(eta.norm(), a)
        };
        let offset = |eta: Complex64| Complex64::from_polar(eta.norm().powf(p), eta.arg() * p);
        let fwd = &self.forward;
        let residual = |eta: Complex64| fwd.eval_near_one(offset(eta)).map(|f| f - w0);
        let derivative = |eta: Complex64| {
            let delta = offset(eta);
            if delta.norm() >= CORNER_NEWTON_RADIUS {
                let dz = Complex64::from_polar(p * eta.norm().powf(p - 1.0), eta.arg() * (p - 1.0));
                return dz * kernel_unchecked(delta + 1.0, &params);
            }
            let arg = eta.arg();
            let dir = Complex64::from_polar(1.0, arg * p);
            let q = (0..params.n).fold(Complex64::new(0.0, 0.0), |acc, _| acc * (delta + 1.0) + 1.0);
            let mut phase = (-dir * q).arg();
            if phase > std::f64::consts::FRAC_PI_2 {
                phase -= std::f64::consts::TAU;
            }
            let mag = p * q.norm().powf(-alpha);
            Complex64::from_polar(mag, (p - 1.0) * arg - alpha * phase)
        };

        let d = s - 1.0;
        let mut eta = clamp_eta(Complex64::from_polar(d.norm().powf(1.0 / p), d.arg() / p));
        let tol = self.accept_tol(w0);
        let mut r = residual(eta)?;
        for _ in 0..self.cfg.max_newton {
            if r.norm() <= tol {
                break;
            }
            let step = r / derivative(eta);
            let mut lambda = 1.0;
            let mut improved = false;
            for _ in 0..30 {
                let cand = clamp_eta(eta - step * lambda);
                if let Ok(rc) = residual(cand) {
                    if rc.norm() < r.norm() {
                        eta = cand;
                        r = rc;
                        improved = true;
                        break;
                    }
                }
                lambda *= 0.5;
            }
            if !improved {
                break;
            }
        }
        self.finish(offset(eta) + 1.0, r, w0)
    }

    /// `S(w)` on `Omega` via reduction to the fundamental region.
    pub fn s_eval(&self, w: Complex64) -> Result<Complex64> {
        let red = self.reduce(w)?;
        let s0 = self.s_fundamental(red.w0)?;
        Ok(apply_symmetry(s0, red.j as i64, red.refl, self.params()))
    }

    fn reduce(&self, w: Complex64) -> Result<Reduced> {
        if !w.is_finite() {
            return Err(Error::InvalidArgument("non-finite argument".into()));
        }
        let m = self.region().classify(w, Domain::Omega);
        if m.status == Status::Exterior {
            let red = crate::geometry::fold(w, self.params());
            return Err(Error::Exterior {
                distance: -self.region().edge_distance(red.w0),
            });
        }
        self.check_near_p(w)?;
        self.region().reduce_to_fundamental(w)
    }

    /// `S(w)` by continuation along the straight segment `0 -> w` with the
    /// slit-plane branch of `(1 - S^n)^(k/n)`; no symmetry is used.
    pub fn s_direct(&self, w: Complex64) -> Result<Complex64> {
        self.reduce(w)?;
        let params = *self.params();
        let opts = OdeOptions {
            rtol: (self.cfg.ode_rel_tol * 1e-2).max(1e-13),
            atol: 1e-15,
            ..OdeOptions::default()
        };
        integrate(
            |_t, s| w * inverse_kernel_sigma(s, &params),
            |_, _| {},
            Complex64::new(0.0, 0.0),
            0.0,
            1.0,
            &opts,
        )
    }

    /// Continuation of `S` along the polygonal path `0 -> path[0] -> ...`,
    /// choosing the branch of `(1 - S^n)^(k/n)` by continuity instead of by
    /// sector. Valid wherever `S` continues analytically along the path,
    /// including beyond `Omega`; the path must avoid critical points of `S`.
    pub fn s_tracked(&self, path: &[Complex64]) -> Result<Complex64> {
        let params = *self.params();
        let alpha = params.alpha();
        let nf = params.nf();
        let branches: Vec<Complex64> = if params.is_integer_k() {
            (0..params.n).map(|m| Complex64::from_polar(1.0, std::f64::consts::TAU * alpha * m as f64)).collect()
        } else {
            (-(params.n as i64)..=(params.n as i64))
                .map(|m| Complex64::from_polar(1.0, std::f64::consts::TAU * alpha * m as f64))
                .collect()
        };
        let last = Cell::new(Complex64::new(1.0, 0.0));
        let pick = |s: Complex64| {
            let base = ((Complex64::new(1.0, 0.0) - s.powf(nf)) .ln() * alpha).exp();
            let prev = last.get();
            branches
                .iter()
                .map(|b| base * b)
                .min_by(|a, b| (a - prev).norm().total_cmp(&(b - prev).norm()))
                .expect("at least one branch")
        };
        let opts = OdeOptions {
            rtol: 1e-13,
            atol: 1e-15,
            max_step: 1.0 / 64.0,
            ..OdeOptions::default()
        };
        let mut s = Complex64::new(0.0, 0.0);
        let mut from = Complex64::new(0.0, 0.0);
        for &to in path {
            let dw = to - from;
            s = integrate(|_t, s| dw * pick(s), |_t, s| last.set(pick(s)), s, 0.0, 1.0, &opts)?;
            from = to;
        }
        Ok(s)
    }

    /// Boundary value `S~(w)` realized as the limit from inside: `S` at
    /// points moved towards the origin by `offset * phi` and `2 offset * phi`,
    /// combined by one Richardson step so the first-order offset error cancels.
    pub fn s_boundary(&self, w: Complex64, offset: f64) -> Result<Complex64> {
        let r = w.norm();
        let step = offset * self.phi();
        if r <= 2.0 * step {
            return self.s_eval(Complex64::new(0.0, 0.0));
        }
        let near = self.s_eval(w * ((r - step) / r))?;
        let far = self.s_eval(w * ((r - 2.0 * step) / r))?;
        Ok(near * 2.0 - far)
    }

    /// `|F(s0) - w0|` where `(w0, s0)` are `w` and `S(w)` mapped back to the
    /// fundamental region by the same group element.
    pub fn roundtrip_residual(&self, w: Complex64) -> Result<f64> {
        let red = self.reduce(w)?;
        let s = self.s_eval(w)?;
        let params = self.params();
        let unrotated = s * params.omega_pow(-(red.j as i64));
        let s0 = if red.refl {
            crate::geometry::reflect_bisector(unrotated, params)
        } else {
            unrotated
        };
        let s0 = match sector_arg(s0, params) {
            Some(_) => s0,
            None => return Err(Error::OutsideSector { re: s0.re, im: s0.im }),
        };
        Ok((self.forward.eval(s0)? - red.w0).norm())
    }
}

#[cfg(test)]
mod tests;
