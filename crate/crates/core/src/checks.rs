//! Verification suites run by `gentrig check`. Each suite evaluates a set of
//! assertions for one `(n, k)` and reports the measured residual of each.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::batch::{map, Execution};
use crate::error::{Error, Result};
use crate::forward::kernel;
use crate::geometry::{apply_symmetry, Domain, Status};
use crate::inverse::InverseMap;
use crate::series::{radius_estimate, s_series};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Suite {
    Identities,
    Rotation,
    Roundtrip,
    Radius,
    Periodicity,
    Pole,
    Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    pub seed: u64,
    pub samples: usize,
    pub order: usize,
    pub exec: Execution,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            seed: 42,
            samples: 500,
            order: 1000,
            exec: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckLine {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckLine {
    pub fn at_most(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            tolerance,
            pass: measured <= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub n: u32,
    pub k: f64,
    pub seed: u64,
    pub samples: usize,
    pub lines: Vec<CheckLine>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.lines.iter().all(|l| l.pass)
    }
}

/// Uniform-ish point of the fundamental region at least `edge_margin * phi`
/// from the outer edge and `p_margin * phi` from `P`, with modulus below
/// `r_max * phi`.
pub fn sample_fundamental(inv: &InverseMap, rng: &mut ChaCha8Rng, edge_margin: f64, p_margin: f64, r_max: f64) -> Complex64 {
    let phi = inv.phi();
    let half = inv.params().half_angle();
    let region = inv.region();
    let reach = region.op_len.map_or(r_max * phi, |op| op.max(phi)).min(r_max * phi);
    loop {
        let w = Complex64::new(rng.gen_range(0.0..reach), rng.gen_range(0.0..reach));
        let theta = w.im.atan2(w.re);
        if theta > half || w.norm() > reach {
            continue;
        }
        let inside = region.edge_distance(w) >= edge_margin * phi;
        let far_p = region.distance_to_p(w).is_none_or(|d| d >= p_margin * phi);
        if inside && far_p {
            return w;
        }
    }
}

/// A sampled fundamental point moved to a random copy in `Omega`.
pub fn sample_omega(inv: &InverseMap, rng: &mut ChaCha8Rng, edge_margin: f64, p_margin: f64, r_max: f64) -> Complex64 {
    let w0 = sample_fundamental(inv, rng, edge_margin, p_margin, r_max);
    let j = rng.gen_range(0..inv.params().n as i64);
    apply_symmetry(w0, j, rng.gen_bool(0.5), inv.params())
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |a, b| if b.is_nan() || a.is_nan() { f64::NAN } else { a.max(b) })
}

fn collect<T>(results: Vec<Result<T>>) -> Result<Vec<T>> {
    results.into_iter().collect()
}

pub fn run_suite(inv: &InverseMap, suite: Suite, opts: &SuiteOptions) -> Result<SuiteReport> {
    let lines = match suite {
        Suite::Identities => identities(inv)?,
        Suite::Rotation => rotation(inv, opts)?,
        Suite::Roundtrip => roundtrip(inv, opts)?,
        Suite::Radius => radius(inv, opts)?,
        Suite::Periodicity => periodicity(inv, opts)?,
        Suite::Pole => pole(inv)?,
        Suite::Boundary => boundary(inv)?,
    };
    Ok(SuiteReport {
        suite,
        n: inv.params().n,
        k: inv.params().k,
        seed: opts.seed,
        samples: opts.samples,
        lines,
    })
}

fn identities(inv: &InverseMap) -> Result<Vec<CheckLine>> {
    let c = &inv.forward.constants;
    let (r1, r2) = c
        .identity_residuals()
        .ok_or_else(|| Error::NotApplicable("the identities need k > 1".into()))?;
    let tol = 1e-8 * c.phi;
    Ok(vec![
        CheckLine::at_most("edge length identity |I sin((k-1)pi/n) - phi sin(pi/n)|", r1, tol),
        CheckLine::at_most("axis integral identity |AXIS - |OP||", r2, tol),
    ])
}

fn rotation(inv: &InverseMap, opts: &SuiteOptions) -> Result<Vec<CheckLine>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let pts: Vec<Complex64> = (0..opts.samples).map(|_| sample_omega(inv, &mut rng, 1e-3, 1e-2, 3.0)).collect();
    let omega = inv.params().omega();
    let rows = collect(map(&pts, opts.exec, |&w| -> Result<(f64, f64, f64)> {
        let s = inv.s_direct(w)?;
        let rot = (inv.s_direct(omega * w)? - omega * s).norm();
        let conj = (inv.s_direct(w.conj())? - s.conj()).norm();
        let sym = (inv.s_eval(w)? - s).norm();
        Ok((rot, conj, sym))
    }))?;
    Ok(vec![
        CheckLine::at_most("rotation |S(omega w) - omega S(w)| (direct path)", max_of(rows.iter().map(|r| r.0)), 1e-8),
        CheckLine::at_most("conjugation |S(conj w) - conj S(w)| (direct path)", max_of(rows.iter().map(|r| r.1)), 1e-8),
        CheckLine::at_most("symmetry reduction vs direct path", max_of(rows.iter().map(|r| r.2)), 1e-8),
    ])
}

fn roundtrip(inv: &InverseMap, opts: &SuiteOptions) -> Result<Vec<CheckLine>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let pts: Vec<Complex64> = (0..opts.samples).map(|_| sample_omega(inv, &mut rng, 1e-3, 1e-2, 3.0)).collect();
    let rows = collect(map(&pts, opts.exec, |&w| -> Result<(f64, bool)> {
        let r = inv.roundtrip_residual(w)? / (1.0 + w.norm());
        let s = inv.s_eval(w)?;
        Ok((r, inv.region().classify(s, Domain::Sigma).status == Status::Interior))
    }))?;
    let outside = rows.iter().filter(|r| !r.1).count();

    let params = inv.params();
    let dir = params.bisector();
    let top = inv.region().op_len.unwrap_or(3.0 * inv.phi());
    let ts: Vec<f64> = (1..=20).map(|i| top * i as f64 / 21.0).collect();
    let bisector = collect(map(&ts, opts.exec, |&t| inv.s_eval(dir * t).map(|s| (dir.conj() * s).im.abs())))?;

    let deriv_pts: Vec<Complex64> = (0..20)
        .map(|_| crate::checks::sample_fundamental(inv, &mut rng, 1e-2, 1e-2, 3.0))
        .collect();
    let h = 1e-5 * inv.phi();
    let derivative = collect(map(&deriv_pts, opts.exec, |&w| -> Result<f64> {
        let w = if w.norm() < 2.0 * h { w + 2.0 * h } else { w };
        let d = (inv.s_eval(w + h)? - inv.s_eval(w - h)?) / (2.0 * h);
        let s = inv.s_eval(w)?;
        Ok((d * kernel(s, params)? - 1.0).norm())
    }))?;

    Ok(vec![
        CheckLine::at_most("round trip |F(S(w)) - w| / (1 + |w|)", max_of(rows.iter().map(|r| r.0)), 1e-8),
        CheckLine::at_most("values outside the slit plane", outside as f64, 0.0),
        CheckLine::at_most("bisector preserved |Im(e^{-i pi/n} S)|", max_of(bisector), 1e-8),
        CheckLine::at_most("derivative |S' K(S) - 1|", max_of(derivative), 1e-6),
    ])
}

fn radius(inv: &InverseMap, opts: &SuiteOptions) -> Result<Vec<CheckLine>> {
    let params = inv.params();
    if params.n == 2 && params.k == 1.0 {
        return Err(Error::NotApplicable("S_{2,1} = sin is entire".into()));
    }
    let series = s_series(params, opts.order)?;
    let est = radius_estimate(&series)?;
    let phi = inv.phi();
    let k = params.k;
    let straight = params.nf() / 2.0 + 1.0;
    let line = if k == 1.0 {
        CheckLine::at_most("radius equals phi (relative error)", (est.radius - phi).abs() / phi, 0.03)
    } else if k > 1.0 {
        let op = inv.region().op_len.expect("k > 1 has a vertex");
        if k >= straight - 1e-12 {
            CheckLine::at_most("radius equals |OP| (relative error)", (est.radius - op).abs() / op, 0.03)
        } else {
            CheckLine::at_most("radius bounded by |OP| (R / |OP|)", est.radius / op, 1.03)
        }
    } else {
        return Err(Error::NotApplicable("the radius suite covers k >= 1".into()));
    };
    Ok(vec![line])
}

/// `phi tan(pi/n)`, the height of the poles above the real axis, capped at
/// `phi` for `n = 2` where the strip has no poles.
fn strip_height(inv: &InverseMap) -> f64 {
    inv.phi() * (PI / inv.params().nf()).tan().min(1.0)
}

/// Height of the horizontal lane used for tracked continuation in the strip;
/// it passes between the multiplicity-2 points and the poles.
fn lane(inv: &InverseMap, sign: f64) -> Complex64 {
    Complex64::new(0.0, 0.5 * strip_height(inv) * sign)
}

/// `S(target)` by continuation along `0 -> lane -> target + lane -> target`.
/// On the last leg the vertices close in geometrically on the target, so the
/// branch choice stays sharp near a multiplicity-2 point `(2m+1) phi`.
pub fn s_in_strip(inv: &InverseMap, target: Complex64, sign: f64) -> Result<Complex64> {
    let phi = inv.phi();
    let l = lane(inv, sign);
    let odd = 2.0 * ((target.re - phi) / (2.0 * phi)).round() + 1.0;
    let critical = (target - odd * phi).norm().max(1e-6 * phi);
    let mut path = vec![l, Complex64::new(target.re, l.im)];
    let mut gap = l.im - target.im;
    while gap.abs() > critical {
        gap *= 0.5;
        path.push(Complex64::new(target.re, target.im + gap));
    }
    path.push(target);
    inv.s_tracked(&path)
}

fn periodicity(inv: &InverseMap, opts: &SuiteOptions) -> Result<Vec<CheckLine>> {
    let params = inv.params();
    if params.k_int().map(|k| 2 * k) != Some(params.n) {
        return Err(Error::NotApplicable("the periodicity suite needs n = 2k".into()));
    }
    let phi = inv.phi();
    let strip = 0.8 * strip_height(inv);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut pts = Vec::with_capacity(opts.samples);
    while pts.len() < opts.samples {
        let w = sample_omega(inv, &mut rng, 1e-2, 1e-2, 3.0);
        if w.im.abs() < strip {
            pts.push(w);
        }
    }
    let period = Complex64::new(4.0 * phi, 0.0);
    let rows = collect(map(&pts, opts.exec, |&z| -> Result<(f64, f64)> {
        let base = inv.s_eval(z)?;
        let sign = if z.im < 0.0 { -1.0 } else { 1.0 };
        let tracked = s_in_strip(inv, z + period, sign)?;
        let extended = inv.s_periodic(z + period)?.value;
        Ok(((tracked - base).norm(), (extended - base).norm()))
    }))?;

    let mut ratio: f64 = 0.0;
    for h in [1e-2 * phi, 1e-3 * phi] {
        let right = s_in_strip(inv, Complex64::new(phi + h, 0.0), 1.0)?;
        let left = inv.s_eval(Complex64::new(phi - h, 0.0))?;
        ratio = ratio.max((right - left).norm() / h.powi(3));
    }
    Ok(vec![
        CheckLine::at_most("period |S(z + 4 phi) - S(z)| (tracked continuation)", max_of(rows.iter().map(|r| r.0)), 1e-8),
        CheckLine::at_most("extension |S_ext(z + 4 phi) - S(z)|", max_of(rows.iter().map(|r| r.1)), 1e-8),
        CheckLine::at_most("multiplicity 2 at phi: |S(phi+h) - S(phi-h)| / h^3", ratio, 1.0),
    ])
}

fn pole(inv: &InverseMap) -> Result<Vec<CheckLine>> {
    let probe = inv.pole_probe(&inv.default_probe_radii())?;
    Ok(vec![
        CheckLine::at_most("pole order of S^{n/2} at P: |e - 1|", (probe.exponent - 1.0).abs(), 0.05),
        CheckLine::at_most("residue spread", probe.spread, 0.01),
    ])
}

/// The point at parameter `t` on the outer edge from `A`, and its mirror
/// image in the real axis.
fn edge_point(inv: &InverseMap, t: f64, mirrored: bool) -> Complex64 {
    let region = inv.region();
    let len = inv.forward.constants.tail.unwrap_or(inv.phi());
    let dir = region.edge_direction();
    let dir = if mirrored { dir.conj() } else { dir };
    region.a + dir * (t * len)
}

fn boundary(inv: &InverseMap) -> Result<Vec<CheckLine>> {
    let params = inv.params();
    let phi = inv.phi();
    let mut corner: f64 = 0.0;
    for j in 0..params.n as i64 {
        let rot = params.omega_pow(j);
        corner = corner.max((inv.s_boundary(rot * phi, 1e-7)? - rot).norm());
    }

    // Pair each point of the edge with the point of the mirrored edge that
    // has the same boundary value, by bisection on the real part.
    let offset = 1e-5;
    let mut pairing: f64 = 0.0;
    let mut location: f64 = 0.0;
    for t in [0.25, 0.5, 0.75] {
        let target = inv.s_boundary(edge_point(inv, t, false), offset)?;
        let value = |u: f64| inv.s_boundary(edge_point(inv, u, true), offset);
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if value(mid)?.re < target.re {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let u = 0.5 * (lo + hi);
        pairing = pairing.max((value(u)? - target).norm());
        location = location.max((edge_point(inv, u, true) - edge_point(inv, t, false).conj()).norm() / phi);
    }
    Ok(vec![
        CheckLine::at_most("boundary values |S~(omega^j phi) - omega^j|", corner, 1e-6),
        CheckLine::at_most("two-to-one pairing |S~(w') - S~(w)|", pairing, 1e-6),
        CheckLine::at_most("paired point is the mirror image (units of phi)", location, 1e-6),
    ])
}
