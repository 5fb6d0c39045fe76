//! The kernel `K(z) = (1 - z^n)^(-k/n)` on the closed fundamental sector, its
//! primitive `F`, the closed-form images of the sector edges and the
//! constants record.
//!
//! Branch rule: on the closed sector `0 <= arg z <= 2pi/n`, `log(1 - z^n)` is
//! taken with imaginary part in `[-pi, pi]`, continuous up to both edges.
//! On the real edge `x > 1` this yields the phase `e^{ik pi/n}` for `K`, on
//! the edge `t omega`, `t > 1`, the phase `e^{-ik pi/n}`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Region;
use crate::params::{complex_serde, Params};
use crate::quadrature::{
    incomplete_phi, incomplete_tail, integrate_interval, integrate_regularized, integrate_segment,
    IntegralResult, QuadConfig, RegularizedKind,
};

/// Radius around the corners `1`, `omega` inside which the factored form
/// `1 - z^n = -(z - c)/c * sum (z/c)^i` is used.
const CORNER_RADIUS: f64 = 0.25;
/// Beyond this modulus `log(1 - z^n)` is expanded around infinity.
const FAR_RADIUS: f64 = 2.0;
/// Angular slack when deciding whether a point lies in the closed sector.
const SECTOR_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Corner {
    One,
    Omega,
}

/// Argument of `z` clamped into `[0, 2pi/n]`; `None` if `z` is outside the
/// closed sector by more than the angular slack.
pub(crate) fn sector_arg(z: Complex64, params: &Params) -> Option<f64> {
    if z.re == 0.0 && z.im == 0.0 {
        return Some(0.0);
    }
    let top = params.sector_angle();
    let mut a = z.im.atan2(z.re);
    if a < 0.0 {
        if a > -SECTOR_SLACK {
            return Some(0.0);
        }
        a += TAU;
        // Points just below the real axis wrap to almost 2pi.
        if TAU - a < SECTOR_SLACK {
            return Some(0.0);
        }
    }
    if a <= top {
        Some(a)
    } else if a - top < SECTOR_SLACK {
        Some(top)
    } else {
        None
    }
}

fn corner_point(corner: Corner, params: &Params) -> Complex64 {
    match corner {
        Corner::One => Complex64::new(1.0, 0.0),
        Corner::Omega => params.omega(),
    }
}

/// `sum_{i<n} (1 + e)^i`.
fn geometric_sum_c(e: Complex64, n: u32) -> Complex64 {
    let x = e + 1.0;
    (0..n).fold(Complex64::new(0.0, 0.0), |acc, _| acc * x + 1.0)
}

/// Phase of `1 - z^n = -e Q(e)` near a corner, put on the sector branch.
fn corner_phase(corner: Corner, x: Complex64) -> f64 {
    let a = x.arg();
    match corner {
        Corner::One if a > PI / 2.0 => a - TAU,
        Corner::Omega if a < -PI / 2.0 => a + TAU,
        _ => a,
    }
}

/// `log(1 - z^n)` on the sector branch. `z` must lie in the closed sector
/// (rounding-level excursions are clamped) and away from the corners.
pub(crate) fn log_one_minus_pow(z: Complex64, params: &Params) -> Complex64 {
    let n = params.n;
    let d1 = z - 1.0;
    if d1.norm() < CORNER_RADIUS {
        return corner_log(Corner::One, d1, params);
    }
    let omega = params.omega();
    let dw = z - omega;
    if dw.norm() < CORNER_RADIUS {
        return corner_log(Corner::Omega, dw, params);
    }
    let theta = sector_arg(z, params).unwrap_or_else(|| clamp_arg(z, params));
    let r = z.norm();
    let nt = n as f64 * theta;
    if r > FAR_RADIUS {
        let inv = Complex64::from_polar(r.powi(-(n as i32)), -nt);
        return Complex64::new(n as f64 * r.ln(), nt - PI) + (Complex64::new(1.0, 0.0) - inv).ln();
    }
    let rn = r.powi(n as i32);
    let s = (rn * nt.sin()).abs();
    let im = if nt <= PI { -s } else { s };
    let re = 1.0 - rn * nt.cos();
    Complex64::new(re.hypot(im).ln(), im.atan2(re))
}

fn clamp_arg(z: Complex64, params: &Params) -> f64 {
    let a = z.im.atan2(z.re);
    if a < 0.0 && a < -PI + params.sector_angle() / 2.0 {
        params.sector_angle()
    } else {
        a.clamp(0.0, params.sector_angle())
    }
}

fn corner_log(corner: Corner, delta: Complex64, params: &Params) -> Complex64 {
    let c = corner_point(corner, params);
    let e = delta / c;
    let x = -e * geometric_sum_c(e, params.n);
    Complex64::new(x.norm().ln(), corner_phase(corner, x))
}

/// `K(z)` on the closed sector without range checks.
pub(crate) fn kernel_unchecked(z: Complex64, params: &Params) -> Complex64 {
    (log_one_minus_pow(z, params) * -params.alpha()).exp()
}

/// `1 / K(z) = (1 - z^n)^(k/n)` on the closed sector without range checks.
pub(crate) fn inverse_kernel_unchecked(z: Complex64, params: &Params) -> Complex64 {
    (log_one_minus_pow(z, params) * params.alpha()).exp()
}

/// `1/K` continued to the slit plane `Sigma_n`: the sector branch applied to
/// `omega^{-j} z` for the sector `j` holding `z`.
pub(crate) fn inverse_kernel_sigma(z: Complex64, params: &Params) -> Complex64 {
    let j = crate::geometry::sector_index(z, params.n);
    let z0 = if j == 0 { z } else { z * params.omega_pow(-(j as i64)) };
    inverse_kernel_unchecked(z0, params)
}

/// The kernel `K_{n,k}(z)` with the continuous branch on the closed sector.
pub fn kernel(z: Complex64, params: &Params) -> Result<Complex64> {
    if !z.is_finite() || sector_arg(z, params).is_none() {
        return Err(Error::OutsideSector { re: z.re, im: z.im });
    }
    if z == Complex64::new(1.0, 0.0) || z == params.omega() {
        return Err(Error::SingularCorner { re: z.re, im: z.im });
    }
    Ok(kernel_unchecked(z, params))
}

/// The constants attached to `(n, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    #[serde(flatten)]
    pub params: Params,
    /// `F(1) = int_0^1 (1 - x^n)^(-k/n) dx`.
    pub phi: f64,
    /// `int_1^inf (t^n - 1)^(-k/n) dt`, length of the edge `A P`.
    pub tail: Option<f64>,
    /// `int_0^inf (1 + t^n)^(-k/n) dt`, i.e. `|OP|` by integration.
    pub axis: Option<f64>,
    #[serde(rename = "P", with = "complex_serde::option")]
    pub p: Option<Complex64>,
    /// Sum of the quadrature error estimates.
    pub err: f64,
}

impl Constants {
    /// `|phi sin(pi/n) - I sin((k-1)pi/n)|` and `|axis - |P||`.
    pub fn identity_residuals(&self) -> Option<(f64, f64)> {
        let (tail, axis, p) = (self.tail?, self.axis?, self.p?);
        let t = PI / self.params.nf();
        let r1 = (self.phi * t.sin() - tail * ((self.params.k - 1.0) * t).sin()).abs();
        let r2 = (axis - p.norm()).abs();
        Some((r1, r2))
    }
}

/// Relative tolerance for the two closed-polygon identities checked when the
/// constants are assembled.
pub const IDENTITY_TOL: f64 = 1e-8;

pub fn constants(params: &Params, cfg: &QuadConfig) -> Result<Constants> {
    let params = Params::new(params.n, params.k)?;
    let phi_r = integrate_regularized(RegularizedKind::Phi, &params, cfg)?;
    let phi = phi_r.into_result()?;
    let mut err = phi_r.err_estimate;
    let (tail, axis) = if params.has_vertex() {
        let t = integrate_regularized(RegularizedKind::Tail, &params, cfg)?;
        let a = integrate_regularized(RegularizedKind::Axis, &params, cfg)?;
        err += t.err_estimate + a.err_estimate;
        (Some(t.into_result()?), Some(a.into_result()?))
    } else {
        (None, None)
    };
    let region = Region::new(params, phi)?;
    let c = Constants {
        params,
        phi,
        tail,
        axis,
        p: region.p,
        err,
    };
    if let Some((r1, r2)) = c.identity_residuals() {
        let tol = IDENTITY_TOL * phi;
        if r1 > tol || r2 > tol {
            return Err(Error::NotConverged {
                err_estimate: r1.max(r2),
                evaluations: 0,
            });
        }
    }
    Ok(c)
}

/// Which edge of the sector a boundary parameter refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Edge {
    /// `t >= 0` on the positive real axis.
    EdgeReal,
    /// `t omega` for `t >= 0`.
    EdgeOmega,
}

/// Image of a boundary point; the edges are unbounded for `k <= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryPoint {
    Finite(Complex64),
    AtInfinity { direction: Complex64 },
}

/// The forward map `F_{n,k}` on the closed sector, with its constants.
#[derive(Debug, Clone)]
pub struct ForwardMap {
    pub params: Params,
    pub constants: Constants,
    pub region: Region,
    pub cfg: QuadConfig,
}

impl ForwardMap {
    pub fn new(params: Params, cfg: QuadConfig) -> Result<Self> {
        cfg.validate()?;
        let constants = constants(&params, &cfg)?;
        let region = Region::new(constants.params, constants.phi)?;
        Ok(Self {
            params: constants.params,
            constants,
            region,
            cfg,
        })
    }

    pub fn phi(&self) -> f64 {
        self.constants.phi
    }

    pub fn kernel(&self, z: Complex64) -> Result<Complex64> {
        kernel(z, &self.params)
    }

    /// `F(z) = int_0^z K` for `z` in the closed sector.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.eval_with_error(z).and_then(|r| r.into_result())
    }

    pub fn eval_with_error(&self, z: Complex64) -> Result<IntegralResult<Complex64>> {
        if !z.is_finite() || sector_arg(z, &self.params).is_none() {
            return Err(Error::OutsideSector { re: z.re, im: z.im });
        }
        let exact = |value| IntegralResult {
            value,
            err_estimate: 0.0,
            evaluations: 0,
            converged: true,
        };
        let phi = self.phi();
        let omega = self.params.omega();
        if z == Complex64::new(0.0, 0.0) {
            return Ok(exact(z));
        }
        if z == Complex64::new(1.0, 0.0) {
            return Ok(exact(Complex64::new(phi, 0.0)));
        }
        if z == omega {
            return Ok(exact(omega * phi));
        }
        if let (Some(p), true) = (self.constants.p, z.norm() >= FAR_RADIUS) {
            let tail = self.ray_tail(z);
            return Ok(IntegralResult {
                value: p - tail.value,
                ..tail
            });
        }
        Ok(match self.choose_anchor(z) {
            None => integrate_segment(|s| kernel_unchecked(s, &self.params), Complex64::new(0.0, 0.0), z, &self.cfg),
            Some(corner) => {
                let c = corner_point(corner, &self.params);
                let seg = self.corner_segment(corner, z - c);
                IntegralResult {
                    value: c * phi + seg.value,
                    ..seg
                }
            }
        })
    }

    /// `F(1 + d)` from the offset `d`; stays accurate when `1 + d` rounds to 1.
    pub(crate) fn eval_near_one(&self, d: Complex64) -> Result<Complex64> {
        if d.norm() >= CORNER_RADIUS {
            return self.eval(d + 1.0);
        }
        if d == Complex64::new(0.0, 0.0) {
            return Ok(Complex64::new(self.phi(), 0.0));
        }
        let seg = self.corner_segment(Corner::One, d).into_result()?;
        Ok(seg + self.phi())
    }

    /// Start the integration at the origin unless the path would graze a
    /// corner; otherwise start at the corner that leaves the most clearance.
    fn choose_anchor(&self, z: Complex64) -> Option<Corner> {
        let one = Complex64::new(1.0, 0.0);
        let omega = self.params.omega();
        let zero = Complex64::new(0.0, 0.0);
        let from_origin = point_segment_distance(one, zero, z).min(point_segment_distance(omega, zero, z));
        if from_origin >= CORNER_RADIUS {
            return None;
        }
        let from_one = point_segment_distance(omega, one, z);
        let from_omega = point_segment_distance(one, omega, z);
        let best = from_origin.max(from_one).max(from_omega);
        if best == from_origin {
            None
        } else if best == from_one {
            Some(Corner::One)
        } else {
            Some(Corner::Omega)
        }
    }

    /// `int_c^{c+d} K` with `zeta = c + d u^p`, which cancels the
    /// `(zeta - c)^(-k/n)` singularity exactly.
    fn corner_segment(&self, corner: Corner, d: Complex64) -> IntegralResult<Complex64> {
        let params = &self.params;
        let c = corner_point(corner, params);
        let p = params.corner_power();
        let alpha = params.alpha();
        let n = params.n;
        let dn = d.norm();
        let dir = d / (c * dn);
        let integrand = |u: f64| {
            let up = u.powf(p);
            if dn * up < CORNER_RADIUS {
                let e = dir * (dn * up);
                let q = geometric_sum_c(e, n);
                let phase = corner_phase(corner, -dir * q);
                let log_mag = dn.ln() + q.norm().ln();
                d * p * Complex64::from_polar((-alpha * log_mag).exp(), -alpha * phase)
            } else {
                d * (p * u.powf(p - 1.0)) * kernel_unchecked(c + d * up, params)
            }
        };
        integrate_interval(integrand, 0.0, 1.0, &self.cfg)
    }

    /// `int_z^inf K` along the ray through `z`; only for `k > 1` and
    /// `|z| >= 2`. With `zeta = z/u` the kernel is `(-z^n)^(-k/n) u^k` times
    /// `(1 - z^-n u^n)^(-k/n)`; the leading power integrates in closed form
    /// and the rest vanishes like `u^(n+k-2)`.
    fn ray_tail(&self, z: Complex64) -> IntegralResult<Complex64> {
        let params = &self.params;
        let k = params.k;
        let nf = params.nf();
        let alpha = params.alpha();
        let theta = sector_arg(z, params).unwrap_or(0.0);
        let nt = nf * theta;
        let prefactor = z * Complex64::from_polar((-k * z.norm().ln()).exp(), -alpha * (nt - PI));
        let zinv_n = Complex64::from_polar(z.norm().powf(-nf), -nt);
        let integrand = |u: f64| {
            let x = zinv_n * u.powf(nf);
            prefactor * (u.powf(k - 2.0) * exp_m1_c(ln_1m_c(x) * -alpha))
        };
        let mut r = integrate_interval(integrand, 0.0, 1.0, &self.cfg);
        r.value += prefactor / (k - 1.0);
        r
    }

    /// Closed-form image of the boundary point `t` (or `t omega`).
    pub fn boundary_image(&self, t: f64, edge: Edge) -> Result<BoundaryPoint> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::InvalidArgument(format!("boundary parameter must be >= 0, got {t}")));
        }
        let params = &self.params;
        let rot = match edge {
            Edge::EdgeReal => Complex64::new(1.0, 0.0),
            Edge::EdgeOmega => params.omega(),
        };
        if t == 1.0 {
            return Err(Error::SingularCorner { re: rot.re, im: rot.im });
        }
        let phase = match edge {
            Edge::EdgeReal => Complex64::from_polar(1.0, params.k * PI / params.nf()),
            Edge::EdgeOmega => Complex64::from_polar(1.0, -params.k * PI / params.nf()),
        };
        if t < 1.0 {
            let v = incomplete_phi(params, t, &self.cfg).into_result()?;
            return Ok(BoundaryPoint::Finite(rot * v));
        }
        let start = rot * self.phi();
        if t.is_infinite() {
            return Ok(match self.constants.tail {
                Some(tail) => BoundaryPoint::Finite(start + rot * phase * tail),
                None => BoundaryPoint::AtInfinity { direction: rot * phase },
            });
        }
        let v = incomplete_tail(params, t, &self.cfg).into_result()?;
        Ok(BoundaryPoint::Finite(start + rot * phase * v))
    }
}

/// `ln(1 - x)` without cancellation for small `x`.
fn ln_1m_c(x: Complex64) -> Complex64 {
    let re = 0.5 * (x.norm_sqr() - 2.0 * x.re).ln_1p();
    Complex64::new(re, (-x.im).atan2(1.0 - x.re))
}

/// `exp(w) - 1` without cancellation for small `w`.
fn exp_m1_c(w: Complex64) -> Complex64 {
    let half = (0.5 * w.im).sin();
    Complex64::new(w.re.exp_m1() * w.im.cos() - 2.0 * half * half, w.re.exp() * w.im.sin())
}

fn point_segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a) * d.conj()).re / len2;
    (p - (a + d * t.clamp(0.0, 1.0))).norm()
}
