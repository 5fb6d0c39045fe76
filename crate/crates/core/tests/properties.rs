//! Invariants of S over randomly drawn parameters and points.

use gentrig::checks::{sample_fundamental, sample_omega};
use gentrig::geometry::{apply_symmetry, reflect_bisector, Domain};
use gentrig::{EvalConfig, InverseMap, Params, Status};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn map(n: u32, kf: f64) -> InverseMap {
    InverseMap::new(Params::new(n, kf * n as f64).unwrap(), EvalConfig::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn round_trip_and_range(n in 2u32..9, kf in 0.1f64..0.95, seed in any::<u64>()) {
        let m = map(n, kf);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = sample_omega(&m, &mut rng, 1e-3, 1e-2, 3.0);
        let r = m.roundtrip_residual(w).unwrap();
        let s = m.s_eval(w).unwrap();
        // Rounding s to a double moves F(s) by about eps |s| |F'(s)|, which
        // dominates close to a corner when k/n is near 1.
        let p = m.params();
        let slope = (1.0 - s.powu(n)).norm().powf(-p.alpha());
        let tol = 1e-8 * (1.0 + w.norm()) + 64.0 * f64::EPSILON * s.norm() * slope;
        prop_assert!(r <= tol, "w={} r={} tol={}", w, r, tol);
        let status = m.region().classify(s, Domain::Sigma).status;
        if (1.0 - s.powu(n)).norm() > 1e-6 {
            prop_assert_eq!(status, Status::Interior);
        } else {
            prop_assert_ne!(status, Status::Exterior);
        }
    }

    #[test]
    fn symmetry_group_commutes(n in 2u32..9, kf in 0.1f64..0.95, seed in any::<u64>(), j in 0i64..9, refl in any::<bool>()) {
        let m = map(n, kf);
        let p = *m.params();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w0 = sample_fundamental(&m, &mut rng, 1e-3, 1e-2, 3.0);
        let s0 = m.s_eval(w0).unwrap();
        let w = apply_symmetry(w0, j, refl, &p);
        let s = m.s_eval(w).unwrap();
        let expect = apply_symmetry(s0, j, refl, &p);
        prop_assert!((s - expect).norm() <= 1e-9 * (1.0 + s.norm()));
        let mirrored = m.s_eval(reflect_bisector(w0, &p)).unwrap();
        prop_assert!((mirrored - reflect_bisector(s0, &p)).norm() <= 1e-9 * (1.0 + s0.norm()));
    }

    #[test]
    fn direct_path_matches_reduction(n in 2u32..7, kf in 0.15f64..0.9, seed in any::<u64>()) {
        let m = map(n, kf);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = sample_omega(&m, &mut rng, 1e-3, 5e-2, 2.0);
        let a = m.s_eval(w).unwrap();
        let b = m.s_direct(w).unwrap();
        prop_assert!((a - b).norm() <= 1e-8 * (1.0 + a.norm()), "w={} {} vs {}", w, a, b);
    }

    #[test]
    fn conjugation(n in 2u32..9, kf in 0.1f64..0.95, seed in any::<u64>()) {
        let m = map(n, kf);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = sample_omega(&m, &mut rng, 1e-3, 1e-2, 3.0);
        let a = m.s_eval(w.conj()).unwrap();
        let b = m.s_eval(w).unwrap().conj();
        prop_assert!((a - b).norm() <= 1e-9 * (1.0 + a.norm()));
    }
}
