//! Adaptive quadrature along straight segments and the regularized real-line
//! integrals behind the constants `phi`, `I` and `|OP|`.
//!
//! The workhorse is a globally adaptive 7/15-point Gauss-Kronrod rule with
//! QUADPACK-style error rescaling. A tanh-sinh rule is kept as a fallback for
//! integrands with strong endpoint behavior that defeat bisection.
//!
//! The endpoint singularities of the real integrals are removed by explicit
//! power substitutions so that every integrand handed to the rules is bounded:
//!
//! * near `x = 1` in `(1 - x^n)^(-k/n)`: `1 - x = u^p` with `p = n/(n-k)`;
//! * near `t = 1` in `(t^n - 1)^(-k/n)`: `t - 1 = u^p`;
//! * at infinity: `t = 1/u`, then `u = v^q` with `q = 1/(k-1)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::Params;

/// Tolerances and budgets for the adaptive rules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
    pub max_evals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_depth: 30,
            max_evals: 1_000_000,
        }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.abs_tol > 0.0 && self.rel_tol > 0.0 && self.max_depth >= 1 && self.max_evals > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid quadrature config {self:?}")))
        }
    }

    fn tolerance(&self, value_norm: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value_norm)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralResult<T> {
    pub value: T,
    pub err_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl<T: QuadValue> IntegralResult<T> {
    /// The value, or `NotConverged` when the tolerance was not met.
    pub fn into_result(self) -> Result<T> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(Error::NotConverged {
                err_estimate: self.err_estimate,
                evaluations: self.evaluations,
            })
        }
    }

    fn combine(self, other: IntegralResult<T>) -> IntegralResult<T> {
        IntegralResult {
            value: self.value + other.value,
            err_estimate: self.err_estimate + other.err_estimate,
            evaluations: self.evaluations + other.evaluations,
            converged: self.converged && other.converged,
        }
    }

    fn scaled(self, factor: T) -> IntegralResult<T>
    where
        T: Mul<T, Output = T>,
    {
        IntegralResult {
            value: self.value * factor,
            err_estimate: self.err_estimate * factor.norm(),
            ..self
        }
    }
}

/// Scalar types the rules can integrate.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync
{
    fn zero() -> Self;
    fn norm(self) -> f64;
    fn is_finite_value(self) -> bool;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn norm(self) -> f64 {
        self.abs()
    }
    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn norm(self) -> f64 {
        Complex64::norm(self)
    }
    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
}

// Kronrod abscissae on [-1, 1] (positive half, descending) and weights.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5 and the center.
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

struct RuleOutput<T> {
    value: T,
    err: f64,
}

fn gk15<T: QuadValue, F: Fn(f64) -> T>(f: &F, a: f64, b: f64) -> RuleOutput<T> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let abs_half = half.abs();

    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = fc.norm() * WGK[7];
    let mut fv1 = [T::zero(); 7];
    let mut fv2 = [T::zero(); 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k = res_k + (f1 + f2) * WGK[j];
        res_abs += WGK[j] * (f1.norm() + f2.norm());
        if j % 2 == 1 {
            res_g = res_g + (f1 + f2) * WG[j / 2];
        }
    }
    let mean = res_k * 0.5;
    let mut res_asc = WGK[7] * (fc - mean).norm();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).norm() + (fv2[j] - mean).norm());
    }

    let value = res_k * half;
    res_abs *= abs_half;
    res_asc *= abs_half;
    let mut err = ((res_k - res_g) * half).norm();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    if !value.is_finite_value() {
        err = f64::INFINITY;
    }
    RuleOutput { value, err }
}

struct Piece<T> {
    a: f64,
    b: f64,
    depth: u32,
    value: T,
    err: f64,
}

impl<T> PartialEq for Piece<T> {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err) == Ordering::Equal
    }
}
impl<T> Eq for Piece<T> {}
impl<T> PartialOrd for Piece<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Piece<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Globally adaptive Gauss-Kronrod quadrature of `f` over the real interval
/// `[a, b]`.
pub fn gauss_kronrod<T, F>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> IntegralResult<T>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    if a == b {
        return IntegralResult {
            value: T::zero(),
            err_estimate: 0.0,
            evaluations: 0,
            converged: true,
        };
    }
    let first = gk15(&f, a, b);
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Piece<T>> = Vec::new();
    heap.push(Piece {
        a,
        b,
        depth: 0,
        value: first.value,
        err: first.err,
    });

    let totals = |heap: &BinaryHeap<Piece<T>>, frozen: &[Piece<T>]| {
        let mut value = T::zero();
        let mut err = 0.0;
        for p in heap.iter().chain(frozen.iter()) {
            value = value + p.value;
            err += p.err;
        }
        (value, err)
    };

    loop {
        let (value, err) = totals(&heap, &frozen);
        let converged = err <= cfg.tolerance(value.norm());
        let out_of_budget = evaluations + 30 > cfg.max_evals;
        if converged || out_of_budget || heap.is_empty() {
            return IntegralResult {
                value,
                err_estimate: err,
                evaluations,
                converged: converged && err.is_finite(),
            };
        }
        let worst = heap.pop().expect("heap is non-empty");
        if worst.depth >= cfg.max_depth {
            frozen.push(worst);
            continue;
        }
        let mid = 0.5 * (worst.a + worst.b);
        let left = gk15(&f, worst.a, mid);
        let right = gk15(&f, mid, worst.b);
        evaluations += 30;
        heap.push(Piece {
            a: worst.a,
            b: mid,
            depth: worst.depth + 1,
            value: left.value,
            err: left.err,
        });
        heap.push(Piece {
            a: mid,
            b: worst.b,
            depth: worst.depth + 1,
            value: right.value,
            err: right.err,
        });
    }
}

/// Double-exponential (tanh-sinh) quadrature over `[a, b]`; `f` is never
/// evaluated at the endpoints.
pub fn tanh_sinh<T, F>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> IntegralResult<T>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    use std::f64::consts::FRAC_PI_2;

    let half = 0.5 * (b - a);
    let center = 0.5 * (a + b);
    const T_MAX: f64 = 6.5;
    const MAX_LEVEL: u32 = 10;

    // Node at parameter t: x = tanh(pi/2 sinh t); returns (1 - |x|) and the weight.
    let node = |t: f64| {
        let s = FRAC_PI_2 * t.sinh();
        let c = FRAC_PI_2 * t.cosh();
        let e = (-2.0 * s.abs()).exp();
        let complement = 2.0 * e / (1.0 + e);
        let ch = s.cosh();
        (complement, c / (ch * ch))
    };
    let eval_pair = |t: f64, evals: &mut usize| {
        let (comp, weight) = node(t);
        let mut sum = T::zero();
        // x = 1 - comp and x = -(1 - comp), placed from the nearer endpoint.
        let xr = b - half * comp;
        let xl = a + half * comp;
        if xr < b && xr > a {
            sum = sum + f(xr) * weight;
            *evals += 1;
        }
        if t != 0.0 && xl > a && xl < b {
            sum = sum + f(xl) * weight;
            *evals += 1;
        }
        sum
    };

    let mut evals = 0;
    let mut h = 1.0;
    let mut sum = f(center) * FRAC_PI_2;
    evals += 1;
    let mut t = h;
    while t <= T_MAX {
        sum = sum + eval_pair(t, &mut evals);
        t += h;
    }
    let mut estimate = sum * (h * half);
    let mut err = f64::INFINITY;
    for _level in 1..=MAX_LEVEL {
        h *= 0.5;
        let mut t = h;
        while t <= T_MAX {
            sum = sum + eval_pair(t, &mut evals);
            t += 2.0 * h;
        }
        let next = sum * (h * half);
        err = (next - estimate).norm();
        estimate = next;
        if err <= cfg.tolerance(estimate.norm()) * 1e-2 || evals > cfg.max_evals {
            break;
        }
    }
    IntegralResult {
        value: estimate,
        err_estimate: err,
        evaluations: evals,
        converged: err <= cfg.tolerance(estimate.norm()) && estimate.is_finite_value(),
    }
}

/// Adaptive rule with the tanh-sinh fallback; keeps whichever result has the
/// smaller error estimate when the primary rule does not converge.
pub fn integrate_interval<T, F>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> IntegralResult<T>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    let gk = gauss_kronrod(&f, a, b, cfg);
    if gk.converged {
        return gk;
    }
    let de = tanh_sinh(&f, a, b, cfg);
    let evaluations = gk.evaluations + de.evaluations;
    let best = if de.err_estimate < gk.err_estimate { de } else { gk };
    IntegralResult { evaluations, ..best }
}

/// `int_a^b f(zeta) dzeta` along the straight segment from `a` to `b`.
pub fn integrate_segment<F>(f: F, a: Complex64, b: Complex64, cfg: &QuadConfig) -> IntegralResult<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    let d = b - a;
    integrate_interval(|t: f64| f(a + d * t), 0.0, 1.0, cfg).scaled(d)
}

/// The three improper real integrals attached to `(n, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RegularizedKind {
    /// `int_0^1 (1 - x^n)^(-k/n) dx`
    Phi,
    /// `int_1^inf (t^n - 1)^(-k/n) dt`, finite only for `k > 1`
    Tail,
    /// `int_0^inf (1 + t^n)^(-k/n) dt`, finite only for `k > 1`
    Axis,
}

pub fn integrate_regularized(
    kind: RegularizedKind,
    params: &Params,
    cfg: &QuadConfig,
) -> Result<IntegralResult<f64>> {
    cfg.validate()?;
    match kind {
        RegularizedKind::Phi => Ok(incomplete_phi(params, 1.0, cfg)),
        RegularizedKind::Tail => {
            if !params.has_vertex() {
                return Err(Error::Divergent("int_1^inf (t^n-1)^(-k/n) dt requires k > 1"));
            }
            Ok(incomplete_tail(params, 2.0, cfg).combine(tail_beyond(params, 2.0, cfg)?))
        }
        RegularizedKind::Axis => {
            if !params.has_vertex() {
                return Err(Error::Divergent("int_0^inf (1+t^n)^(-k/n) dt requires k > 1"));
            }
            let alpha = params.alpha();
            let n = params.nf();
            let head = integrate_interval(|t: f64| (1.0 + t.powf(n)).powf(-alpha), 0.0, 1.0, cfg);
            let mut far = power_remainder(params, 1.0, 0.0, 1.0, cfg);
            far.value += 1.0 / (params.k - 1.0);
            Ok(head.combine(far))
        }
    }
}

/// `sum_{i<n} x^i`, i.e. `(1 - x^n)/(1 - x)` without cancellation.
pub(crate) fn geometric_sum(x: f64, n: u32) -> f64 {
    (0..n).fold(0.0, |acc, _| acc * x + 1.0)
}

/// `int_0^t (1 - x^n)^(-k/n) dx` for `0 <= t <= 1`.
pub fn incomplete_phi(params: &Params, t: f64, cfg: &QuadConfig) -> IntegralResult<f64> {
    let alpha = params.alpha();
    let n = params.n;
    let split = 0.5;
    let direct = |x: f64| (1.0 - x.powi(n as i32)).powf(-alpha);
    if t <= split {
        return integrate_interval(direct, 0.0, t, cfg);
    }
    let p = params.corner_power();
    let head = integrate_interval(direct, 0.0, split, cfg);
    // 1 - x = u^p turns (1-x)^(-k/n) dx into a bounded integrand.
    let regular = |u: f64| {
        let x = 1.0 - u.powf(p);
        p * geometric_sum(x, n).powf(-alpha)
    };
    let u_hi = (1.0 - split).powf(1.0 / p);
    let u_lo = (1.0 - t).max(0.0).powf(1.0 / p);
    head.combine(integrate_interval(regular, u_lo, u_hi, cfg))
}

/// `int_1^t (x^n - 1)^(-k/n) dx` for `t >= 1`.
pub fn incomplete_tail(params: &Params, t: f64, cfg: &QuadConfig) -> IntegralResult<f64> {
    let alpha = params.alpha();
    let n = params.n;
    let p = params.corner_power();
    let near = |u: f64| {
        let x = 1.0 + u.powf(p);
        p * geometric_sum(x, n).powf(-alpha)
    };
    let split = 2.0;
    let u_end = (t.min(split) - 1.0).max(0.0).powf(1.0 / p);
    let head = integrate_interval(near, 0.0, u_end, cfg);
    if t <= split {
        return head;
    }
    if params.has_vertex() && t.is_finite() {
        // int_2^t x^-k exactly, plus the smooth remainder in u = 1/x.
        let km1 = params.k - 1.0;
        let mut far = power_remainder(params, -1.0, 1.0 / t, 1.0 / split, cfg);
        far.value += split.powf(-km1) * -(-km1 * (t / split).ln()).exp_m1() / km1;
        return head.combine(far);
    }
    let direct = |x: f64| (x.powi(n as i32) - 1.0).powf(-alpha);
    head.combine(integrate_interval(direct, split, t, cfg))
}

/// `int_t^inf (x^n - 1)^(-k/n) dx` for `t >= 2`, `k > 1`.
pub fn tail_beyond(params: &Params, t: f64, cfg: &QuadConfig) -> Result<IntegralResult<f64>> {
    if !params.has_vertex() {
        return Err(Error::Divergent("tail integral requires k > 1"));
    }
    if t < 2.0 {
        return Err(Error::InvalidArgument(format!("tail_beyond needs t >= 2, got {t}")));
    }
    let km1 = params.k - 1.0;
    let mut r = power_remainder(params, -1.0, 0.0, 1.0 / t, cfg);
    r.value += t.powf(-km1) / km1;
    Ok(r)
}

/// `int_lo^hi u^(k-2) ((1 + sign u^n)^(-k/n) - 1) du`: what is left of
/// `(x^n + sign)^(-k/n)` over `x = 1/u` after removing `x^-k`. The
/// integrand vanishes like `u^(n+k-2)`, so it has no boundary layer even
/// when `k` is close to 1, where `x^-k` itself decays too slowly for any
/// substitution to be resolved by quadrature.
fn power_remainder(params: &Params, sign: f64, lo: f64, hi: f64, cfg: &QuadConfig) -> IntegralResult<f64> {
    let alpha = params.alpha();
    let (k, n) = (params.k, params.nf());
    let f = |u: f64| u.powf(k - 2.0) * (-alpha * (sign * u.powf(n)).ln_1p()).exp_m1();
    integrate_interval(f, lo, hi, cfg)
}
