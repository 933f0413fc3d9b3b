use std::f64::consts::PI;

use invsq::specfun::{bessel_j, bessel_j_eval, bessel_j_quadrature, j};
use proptest::prelude::*;

fn table(name: &str) -> Vec<(f64, f64, f64)> {
    let path = format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|line| {
            let f: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
            (f[0], f[1], f[2])
        })
        .collect()
}

fn check_table(name: &str) {
    let mut worst = (0.0, 0.0, 0.0);
    for (nu, x, expect) in table(name) {
        let v = bessel_j_eval(nu, x, 1e-10).unwrap_or_else(|e| panic!("J_{nu}({x}): {e}"));
        if expect.abs() < 1e-300 {
            assert!(v.value.abs() <= 1e-300);
            continue;
        }
        let rel = ((v.value - expect) / expect).abs();
        if rel > worst.2 {
            worst = (nu, x, rel);
        }
    }
    assert!(worst.2 <= 1e-10, "{name}: worst relative error {:.2e} at nu={} x={}", worst.2, worst.0, worst.1);
}

#[test]
fn matches_high_precision_lattice() {
    check_table("bessel_lattice.csv");
}

#[test]
fn matches_high_precision_scattered_points() {
    check_table("bessel_scattered.csv");
}

#[test]
fn half_integer_closed_forms() {
    for i in 0..=400 {
        let r = 0.1 * (1000f64).powf(i as f64 / 400.0);
        let closed = (2.0 / (PI * r)).sqrt() * r.sin();
        let v = bessel_j(0.5, r, 1e-10).unwrap();
        assert!((v - closed).abs() <= 1e-10 * closed.abs().max(1.0), "r={r}");
        let closed15 = (2.0 / (PI * r)).sqrt() * (r.sin() / r - r.cos());
        let v15 = j(1.5, r);
        assert!((v15 - closed15).abs() <= 1e-10 * closed15.abs().max(1.0), "r={r}");
    }
}

proptest! {
    #[test]
    fn three_term_recurrence(nu in 1.0f64..60.0, x in 0.05f64..500.0) {
        let lhs = j(nu - 1.0, x) + j(nu + 1.0, x);
        let rhs = 2.0 * nu / x * j(nu, x);
        let scale = j(nu - 1.0, x).abs().max(j(nu + 1.0, x).abs()).max(rhs.abs()).max(1e-280);
        prop_assert!((lhs - rhs).abs() <= 1e-11 * scale);
    }

    #[test]
    fn agrees_with_poisson_integral(nu in 0.0f64..40.0, x in 0.01f64..20.0) {
        // The integral loses digits to cancellation once x exceeds ν, so the
        // comparison is absolute on the scale of the amplitude.
        let a = j(nu, x);
        let b = bessel_j_quadrature(nu, x).unwrap();
        let amplitude = if x > nu { 1.0 / x.sqrt() } else { a.abs() };
        prop_assert!((a - b).abs() <= 1e-10 * amplitude.max(a.abs()), "{} vs {}", a, b);
    }

    #[test]
    fn bounded_by_one(nu in 0.0f64..100.0, x in 0.0f64..1e4) {
        prop_assert!(j(nu, x).abs() <= 1.0);
    }
}
