//! Embedded Dormand-Prince 5(4) integrator for a complex scalar ODE on a
//! finite parameter interval.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub(crate) struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-14,
            max_step: 0.125,
            max_steps: 200_000,
        }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrate `y' = f(t, y)` from `t0` to `t1`. `on_accept(t, y)` runs after
/// every accepted step (used for branch tracking).
pub(crate) fn integrate<F, A>(
    mut f: F,
    mut on_accept: A,
    y0: Complex64,
    t0: f64,
    t1: f64,
    opts: &OdeOptions,
) -> Result<Complex64>
where
    F: FnMut(f64, Complex64) -> Complex64,
    A: FnMut(f64, Complex64),
{
    let span = t1 - t0;
    if span == 0.0 {
        return Ok(y0);
    }
    let dir = span.signum();
    let mut t = t0;
    let mut y = y0;
    let mut h = (0.01 * span.abs()).min(opts.max_step) * dir;
    let mut k1 = f(t, y);
    for _ in 0..opts.max_steps {
        if (t1 - t) * dir <= 0.0 {
            return Ok(y);
        }
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }
        let k2 = f(t + C2 * h, y + k1 * (A21 * h));
        let k3 = f(t + C3 * h, y + (k1 * A31 + k2 * A32) * h);
        let k4 = f(t + C4 * h, y + (k1 * A41 + k2 * A42 + k3 * A43) * h);
        let k5 = f(t + C5 * h, y + (k1 * A51 + k2 * A52 + k3 * A53 + k4 * A54) * h);
        let k6 = f(t + h, y + (k1 * A61 + k2 * A62 + k3 * A63 + k4 * A64 + k5 * A65) * h);
        let y_new = y + (k1 * B1 + k3 * B3 + k4 * B4 + k5 * B5 + k6 * B6) * h;
        let k7 = f(t + h, y_new);
        let err_vec = (k1 * E1 + k3 * E3 + k4 * E4 + k5 * E5 + k6 * E6 + k7 * E7) * h;
        let scale = opts.atol + opts.rtol * y.norm().max(y_new.norm());
        let err = err_vec.norm() / scale;
        if !err.is_finite() || !y_new.is_finite() {
            h *= 0.25;
            if h.abs() < 1e-15 * span.abs() {
                return Err(Error::ContinuationFailed { tau: t, reason: "non-finite derivative" });
            }
            continue;
        }
        if err <= 1.0 {
            t += h;
            y = y_new;
            k1 = k7;
            on_accept(t, y);
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= if err <= 1.0 { factor } else { factor.min(1.0) };
        if h.abs() > opts.max_step {
            h = opts.max_step * dir;
        }
        if h.abs() < 1e-15 * span.abs() {
            return Err(Error::ContinuationFailed { tau: t, reason: "step size underflow" });
        }
    }
    Err(Error::ContinuationFailed { tau: t, reason: "step budget exhausted" })
}
