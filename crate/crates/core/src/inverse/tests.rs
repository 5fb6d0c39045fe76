use super::*;
use crate::geometry::Domain;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::beta::{beta, beta_reg};

fn map(n: u32, k: f64) -> InverseMap {
    InverseMap::new(Params::new(n, k).unwrap(), EvalConfig::default()).unwrap()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `int_0^x (1 - t^n)^(-k/n) dt` through the regularized incomplete Beta function.
fn real_primitive(n: u32, k: f64, x: f64) -> f64 {
    let a = 1.0 / n as f64;
    let b = 1.0 - k / n as f64;
    a * beta(a, b) * beta_reg(a, b, x.powi(n as i32))
}

/// Random point of the fundamental region, kept `margin * phi` inside.
pub(crate) fn sample_fundamental(m: &InverseMap, rng: &mut ChaCha8Rng, margin: f64) -> Complex64 {
    let phi = m.phi();
    let half = m.params().half_angle();
    loop {
        let r = rng.gen_range(0.0..3.0 * phi);
        let t = rng.gen_range(0.0..half);
        let w = Complex64::from_polar(r, t);
        let inside = m.region().edge_distance(w) > margin * phi;
        let far_p = m.region().distance_to_p(w).is_none_or(|d| d > 1e-2 * phi);
        if inside && far_p {
            return w;
        }
    }
}

#[test]
fn trivial_points() {
    for (n, k) in [(3, 1.0), (4, 2.0), (4, 3.0), (5, 2.5)] {
        let m = map(n, k);
        assert_eq!(m.s_fundamental(c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        assert!((m.s_fundamental(c(m.phi(), 0.0)).unwrap() - 1.0).norm() < 1e-12);
    }
}

#[test]
fn real_values_match_beta_oracle() {
    for (n, k) in [(4u32, 2.0), (3, 1.0), (3, 2.0), (5, 3.5)] {
        let m = map(n, k);
        for frac in [0.1, 0.5, 0.9, 0.999] {
            let w = frac * m.phi();
            let s = m.s_fundamental(c(w, 0.0)).unwrap();
            assert!(s.im.abs() < 1e-12, "{s}");
            let back = real_primitive(n, k, s.re);
            assert!((back - w).abs() < 1e-10, "n={n} k={k} frac={frac}: {back} vs {w}");
        }
    }
}

#[test]
fn half_lemniscate_value() {
    // Bisection on the monotone real primitive.
    let m = map(4, 2.0);
    let target = 0.5 * m.phi();
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if real_primitive(4, 2.0, mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let s = m.s_fundamental(c(target, 0.0)).unwrap();
    assert!((s.re - lo).abs() < 1e-12, "{s} vs {lo}");
}

#[test]
fn fundamental_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (n, k) in [(3, 1.0), (3, 2.0), (4, 2.0), (4, 3.0), (5, 2.5), (6, 4.0), (7, 6.5), (3, 0.5)] {
        let m = map(n, k);
        for _ in 0..40 {
            let w = sample_fundamental(&m, &mut rng, 1e-3);
            let s = m.s_fundamental(w).unwrap();
            let r = (m.forward.eval(s).unwrap() - w).norm();
            assert!(r <= 1e-8 * (1.0 + w.norm()), "n={n} k={k} w={w}: residual {r}");
        }
    }
}

#[test]
fn bisector_maps_to_bisector() {
    for (n, k) in [(4, 3.0), (5, 2.0), (6, 4.0), (3, 1.0)] {
        let m = map(n, k);
        let top = m.region().op_len.unwrap_or(5.0 * m.phi());
        let dir = m.params().bisector();
        for frac in [0.1, 0.5, 0.9, 0.99] {
            let s = m.s_eval(dir * (frac * top)).unwrap();
            assert!((dir.conj() * s).im.abs() <= 1e-8, "n={n} k={k}: {s}");
        }
    }
}

#[test]
fn derivative_is_reciprocal_kernel() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (n, k) in [(3, 2.0), (4, 3.0), (5, 1.0)] {
        let m = map(n, k);
        let h = 1e-5 * m.phi();
        for _ in 0..20 {
            let w = sample_fundamental(&m, &mut rng, 1e-2);
            let w = if w.norm() < 2.0 * h { w + 3.0 * h } else { w };
            let d = (m.s_eval(w + h).unwrap() - m.s_eval(w - h).unwrap()) / (2.0 * h);
            let s = m.s_eval(w).unwrap();
            let r = (d * kernel_unchecked(s, m.params()) - 1.0).norm();
            assert!(r <= 1e-6, "n={n} k={k} w={w}: {r}");
        }
    }
}

#[test]
fn range_is_slit_plane() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let m = map(5, 3.0);
    for _ in 0..100 {
        let w0 = sample_fundamental(&m, &mut rng, 1e-3);
        let j = rng.gen_range(0..5);
        let w = apply_symmetry(w0, j, rng.gen_bool(0.5), m.params());
        let s = m.s_eval(w).unwrap();
        assert_eq!(m.region().classify(s, Domain::Sigma).status, Status::Interior);
    }
}

#[test]
fn grows_towards_p() {
    let m = map(4, 3.0);
    let p = m.region().p.unwrap();
    let near = m.s_eval(p * 0.9).unwrap().norm();
    let nearer = m.s_eval(p * 0.999).unwrap().norm();
    assert!(near > 1.0 && nearer > 10.0 * near, "{near} {nearer}");
    assert!(matches!(m.s_eval(p * (1.0 - 1e-8)), Err(Error::NearP { .. })));
}

#[test]
fn exterior_points_are_refused() {
    let m = map(4, 2.0);
    assert!(matches!(m.s_eval(c(10.0, 0.0)), Err(Error::Exterior { .. })));
    assert!(matches!(m.s_direct(c(0.0, -10.0)), Err(Error::Exterior { .. })));
    let k1 = map(3, 1.0);
    let edge = k1.region().edge_direction();
    let far_inside = k1.region().a + edge * 3.0 + edge * Complex64::i() * 0.1;
    assert!(k1.s_eval(far_inside).is_ok());
    assert!(matches!(k1.s_eval(far_inside - edge * Complex64::i() * 0.2), Err(Error::Exterior { .. })));
}

#[test]
fn direct_continuation_agrees() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (n, k) in [(4, 2.0), (3, 2.0), (5, 1.0), (6, 4.0)] {
        let m = map(n, k);
        for _ in 0..10 {
            let w0 = sample_fundamental(&m, &mut rng, 1e-2);
            let w = apply_symmetry(w0, rng.gen_range(0..n as i64), rng.gen_bool(0.5), m.params());
            let a = m.s_eval(w).unwrap();
            let b = m.s_direct(w).unwrap();
            assert!((a - b).norm() <= 1e-8 * (1.0 + a.norm()), "n={n} k={k} w={w}: {a} vs {b}");
        }
    }
    let m = map(4, 2.0);
    let w = c(0.5 * m.phi(), 0.0);
    let rotated = m.s_direct(w * m.params().omega()).unwrap();
    assert!((rotated - m.s_direct(w).unwrap() * Complex64::i()).norm() < 1e-10);
}

#[test]
fn tracked_path_agrees_inside_omega() {
    let m = map(3, 2.0);
    let w = c(0.7 * m.phi(), 0.2 * m.phi());
    let a = m.s_eval(w).unwrap();
    let b = m.s_tracked(&[c(0.3 * m.phi(), 0.4 * m.phi()), w]).unwrap();
    assert!((a - b).norm() < 1e-9, "{a} vs {b}");
}

#[test]
fn boundary_values_at_corners() {
    for (n, k) in [(4, 2.0), (3, 2.0), (5, 1.0)] {
        let m = map(n, k);
        for j in 0..n {
            let rot = m.params().omega_pow(j as i64);
            let s = m.s_boundary(rot * m.phi(), 1e-7).unwrap();
            assert!((s - rot).norm() <= 1e-6, "n={n} k={k} j={j}: {s}");
        }
    }
}

#[test]
fn boundary_is_two_to_one() {
    // The outer edge from A and its mirror in the lower copy land on the same
    // slit point.
    for (n, k) in [(4, 3.0), (3, 2.0), (5, 2.0)] {
        let m = map(n, k);
        let p = m.region().p.unwrap();
        let a = m.region().a;
        for t in [0.2, 0.5, 0.8] {
            let w = a + (p - a) * t;
            let s_up = m.s_boundary(w, 1e-5).unwrap();
            let s_down = m.s_boundary(w.conj(), 1e-5).unwrap();
            assert!((s_up - s_down).norm() <= 1e-6, "n={n} k={k} t={t}: {s_up} vs {s_down}");
            assert!(s_up.re > 1.0 && s_up.im.abs() < 1e-2 * s_up.re, "{s_up}");
        }
    }
}

#[test]
fn periodic_extension() {
    let m = map(4, 2.0);
    let phi = m.phi();
    let z = c(0.3 * phi, 0.2 * phi);
    let base = m.s_eval(z).unwrap();
    for shift in [c(4.0 * phi, 0.0), c(0.0, 4.0 * phi), c(-8.0 * phi, 0.0)] {
        let v = m.s_periodic(z + shift).unwrap();
        assert!((v.value - base).norm() < 1e-10);
        assert!(!v.seam);
    }
    let anti = m.s_periodic(z + 2.0 * phi).unwrap().value;
    assert!((anti + base).norm() < 1e-10);
    assert!(m.s_periodic(c(phi * (1.0 + 1e-6), 0.0)).unwrap().seam);
    assert!(matches!(map(4, 3.0).s_periodic(z), Err(Error::NotApplicable(_))));
    assert!(matches!(m.s_periodic(c(1.5 * phi, 1.5 * phi)), Err(Error::Exterior { .. })));

    let m6 = map(6, 3.0);
    let z = c(0.2 * m6.phi(), 0.1 * m6.phi());
    let base = m6.s_eval(z).unwrap();
    for j in 0..6 {
        let v = m6.s_periodic(z + m6.params().omega_pow(j) * (4.0 * m6.phi())).unwrap();
        assert!((v.value - base).norm() < 1e-10, "j={j}");
    }
}

#[test]
fn periodic_agrees_with_tracked_continuation() {
    let m = map(4, 2.0);
    let phi = m.phi();
    let z = c(0.4 * phi, -0.3 * phi);
    let lane = c(0.0, 0.5 * phi);
    let tracked = m.s_tracked(&[lane, lane + 4.0 * phi, z + 4.0 * phi]).unwrap();
    let periodic = m.s_periodic(z + 4.0 * phi).unwrap().value;
    assert!((tracked - periodic).norm() < 1e-8, "{tracked} vs {periodic}");
}

#[test]
fn pole_probe_examples() {
    for n in [4u32, 6] {
        let m = map(n, (n / 2 + 1) as f64);
        let probe = m.pole_probe(&m.default_probe_radii()).unwrap();
        assert!((probe.exponent - 1.0).abs() <= 0.05, "n={n}: {probe:?}");
        assert!(probe.spread <= 0.01, "n={n}: {probe:?}");
    }
    assert!(matches!(map(4, 2.0).pole_probe(&[0.1, 0.01]), Err(Error::NotApplicable(_))));
}

#[test]
fn corner_exponent_examples() {
    for (n, e) in [(3u32, 1.5), (5, 1.25), (2, 2.0)] {
        let got = map(n, 1.0).corner_exponent_probe().unwrap();
        assert!((got - e).abs() <= 0.05, "n={n}: {got}");
    }
    assert!(matches!(map(3, 2.0).corner_exponent_probe(), Err(Error::NotApplicable(_))));
}

#[test]
fn config_validation() {
    let bad = EvalConfig {
        newton_tol: 0.0,
        ..EvalConfig::default()
    };
    assert!(InverseMap::new(Params::new(3, 2.0).unwrap(), bad).is_err());
}

