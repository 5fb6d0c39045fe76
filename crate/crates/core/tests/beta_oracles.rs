//! Constants against closed forms in terms of the Beta function.

use gentrig::{constants, Params, QuadConfig};
use statrs::function::beta::beta;

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs()
}

#[test]
fn phi_is_a_beta_value() {
    for n in 2..=9u32 {
        for k in [0.3, 0.5, 1.0, 1.5, 2.0, 2.7, n as f64 - 0.5] {
            if k >= n as f64 {
                continue;
            }
            let nf = n as f64;
            let c = constants(&Params::new(n, k).unwrap(), &QuadConfig::default()).unwrap();
            let oracle = beta(1.0 / nf, 1.0 - k / nf) / nf;
            assert!(close(c.phi, oracle, 1e-11), "n={n} k={k}: {} vs {oracle}", c.phi);
        }
    }
}

#[test]
fn edge_and_axis_integrals_are_beta_values() {
    for n in 3..=8u32 {
        for k in (2..n).map(f64::from).chain([1.0003, 1.01, 1.5, n as f64 - 0.25]) {
            let nf = n as f64;
            let c = constants(&Params::new(n, k).unwrap(), &QuadConfig::default()).unwrap();
            let tail = beta((k - 1.0) / nf, 1.0 - k / nf) / nf;
            let axis = beta(1.0 / nf, (k - 1.0) / nf) / nf;
            assert!(close(c.tail.unwrap(), tail, 1e-10), "n={n} k={k}: {:?} vs {tail}", c.tail);
            assert!(close(c.axis.unwrap(), axis, 1e-10), "n={n} k={k}: {:?} vs {axis}", c.axis);
        }
    }
}

#[test]
fn lemniscate_and_dixon_constants() {
    // 2 phi_{4,2} is the lemniscate constant; phi_{3,2} is the Dixon period third.
    let lem = constants(&Params::new(4, 2.0).unwrap(), &QuadConfig::default()).unwrap().phi;
    assert!((2.0 * lem - 2.622_057_554_292_119_8).abs() < 1e-14);
    let dixon = constants(&Params::new(3, 2.0).unwrap(), &QuadConfig::default()).unwrap().phi;
    assert!((dixon - 1.766_638_750_285_45).abs() < 1e-13);
    let circle = constants(&Params::new(2, 1.0).unwrap(), &QuadConfig::default()).unwrap().phi;
    assert!((circle - std::f64::consts::FRAC_PI_2).abs() < 1e-14);
}
