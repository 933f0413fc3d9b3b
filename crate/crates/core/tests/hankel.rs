use invsq::hankel::*;
use invsq::specfun::BesselOrder;
use num_complex::Complex64;
use proptest::prelude::*;

fn gl(r_max: f64, q: usize) -> RadialGrid {
    make_grid(r_max, q, GridScheme::CompositeGaussLegendre).unwrap()
}

fn order(nu: f64) -> BesselOrder {
    BesselOrder::new(nu).unwrap()
}

/// A smooth bump centred at `c` with width `s`, negligible near 0 and R_max.
fn bump(grid: &RadialGrid, c: f64, s: f64, phase: f64) -> ModeField {
    ModeField::from_fn(0, 1, Space::Physical, grid, |r| {
        Complex64::from_polar((-(r - c).powi(2) / (2.0 * s * s)).exp(), phase * r)
    })
}

#[test]
fn zero_maps_to_zero() {
    let setup = PotentialSetup::new(3, 1.0).unwrap();
    let g = gl(8.0, 256);
    let f = ModeField::zeros(0, 1, Space::Physical, &g);
    let h = hankel_transform(&setup, order(1.2), &f, &g).unwrap();
    assert!(h.values.iter().all(|v| *v == Complex64::default()));
    assert_eq!(h.space, Space::Spectral);
}

#[test]
fn gaussian_is_self_reciprocal() {
    let g = gl(12.0, 768);
    for (n, a) in [(3usize, 0.0), (3, 1.0), (2, 1.0), (4, 2.5)] {
        let setup = PotentialSetup::new(n, a).unwrap();
        let nu = setup.nu(0);
        let p = nu - setup.alpha();
        let f = ModeField::from_real(0, 1, Space::Physical, &g, |r| r.powf(p) * (-r * r / 2.0).exp());
        let h = hankel_transform(&setup, order(nu), &f, &g).unwrap();
        for (rho, v) in g.nodes().iter().zip(&h.values) {
            if (0.1..=4.0).contains(rho) {
                let exact = rho.powf(p) * (-rho * rho / 2.0).exp();
                assert!(((v.re - exact) / exact).abs() < 1e-7, "n={n} a={a} rho={rho}");
            }
        }
    }
}

#[test]
fn involution_and_isometry() {
    let g = gl(20.0, 1024);
    let setup = PotentialSetup::new(3, 1.0).unwrap();
    let m = g.measure(3);
    for nu in [0.0, 0.5, 1.0, 2.7, 10.0] {
        let f = bump(&g, 2.5, 0.4, 0.7);
        let h = hankel_transform(&setup, order(nu), &f, &g).unwrap();
        let back = hankel_transform(&setup, order(nu), &h, &g).unwrap();
        assert_eq!(back.space, Space::Physical);
        let inv = relative_l2(&back.values, &f.values, &m);
        let iso = (h.norm(&g, 3) / f.norm(&g, 3) - 1.0).abs();
        assert!(inv < 1e-6, "nu={nu}: involution residual {inv:e}");
        assert!(iso < 1e-6, "nu={nu}: isometry residual {iso:e}");
    }
}

#[test]
fn grid_mismatch_is_rejected() {
    let setup = PotentialSetup::new(3, 0.0).unwrap();
    let a = gl(8.0, 256);
    let b = gl(9.0, 256);
    let f = ModeField::zeros(0, 1, Space::Physical, &a);
    assert!(matches!(hankel_transform(&setup, order(0.5), &f, &b), Err(invsq::Error::GridMismatch(_))));
}

#[test]
fn eigen_relation() {
    let g = make_grid(16.0, 1024, GridScheme::Uniform).unwrap();
    for (n, a) in [(3usize, 0.0), (3, 1.0), (2, 1.0)] {
        let setup = PotentialSetup::new(n, a).unwrap();
        let nu = order(setup.nu(0));
        let p = nu.value() - setup.alpha();
        let f = ModeField::from_real(0, 1, Space::Physical, &g, |r| r.powf(p) * (-r * r / 2.0).exp());
        let af = apply_a_nu(&setup, nu, &f, &g).unwrap();
        let lhs = hankel_transform(&setup, nu, &af, &g).unwrap();
        let hf = hankel_transform(&setup, nu, &f, &g).unwrap();
        for ((rho, l), h) in g.nodes().iter().zip(&lhs.values).zip(&hf.values) {
            if (0.2..=3.0).contains(rho) {
                let rhs = rho * rho * h.re;
                assert!(((l.re - rhs) / rhs).abs() < 5e-4, "n={n} a={a} rho={rho}: {} vs {rhs}", l.re);
            }
        }
    }
}

#[test]
fn sinc_is_an_eigenfunction() {
    let g = make_grid(16.0, 1024, GridScheme::Uniform).unwrap();
    let setup = PotentialSetup::new(3, 0.0).unwrap();
    let f = ModeField::from_real(0, 1, Space::Physical, &g, |r| r.sin() / r);
    let af = apply_a_nu(&setup, order(0.5), &f, &g).unwrap();
    for i in 1..g.len() - 1 {
        assert!((af.values[i] - f.values[i]).norm() < 1e-4, "r={}", g.nodes()[i]);
    }
    let zero = apply_a_nu(&setup, order(0.5), &ModeField::zeros(0, 1, Space::Physical, &g), &g).unwrap();
    assert!(zero.values.iter().all(|v| v.norm() == 0.0));
}

#[test]
fn a_nu_needs_a_fine_grid() {
    let g = gl(8.0, 128);
    let setup = PotentialSetup::new(3, 0.0).unwrap();
    let f = ModeField::zeros(0, 1, Space::Physical, &g);
    assert!(matches!(apply_a_nu(&setup, order(0.5), &f, &g), Err(invsq::Error::GridTooCoarse(_))));
}

#[test]
fn order_of_mode_is_increasing_and_approaches_mu() {
    for (n, a) in [(2usize, 0.3), (3, -0.2), (3, 1.0), (5, 4.0)] {
        let s = PotentialSetup::new(n, a).unwrap();
        for k in 0..200 {
            assert!(order_of_mode(&s, k + 1).unwrap() > order_of_mode(&s, k).unwrap());
            if k >= 20 {
                let ratio = s.nu(k) / s.mu(k);
                let tol = a.abs() / (k * k) as f64;
                assert!((1.0 - tol..=1.0 + tol).contains(&ratio));
            }
        }
    }
}

#[test]
fn separate_spectral_grid() {
    let setup = PotentialSetup::new(3, 1.0).unwrap();
    let pair = GridPair::new(gl(20.0, 1024), gl(12.0, 768));
    let f = bump(&pair.physical, 3.0, 0.5, 0.0);
    let h = pair.transform(&setup, order(setup.nu(0)), &f).unwrap();
    assert_eq!(h.grid_id, pair.spectral.id());
    let back = pair.transform(&setup, order(setup.nu(0)), &h).unwrap();
    let m = pair.physical.measure(3);
    assert!(relative_l2(&back.values, &f.values, &m) < 1e-6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn self_adjoint(c1 in 1.5f64..5.0, c2 in 1.5f64..5.0, s1 in 0.3f64..1.0, s2 in 0.3f64..1.0,
                    p1 in -2.0f64..2.0, p2 in -2.0f64..2.0, nu in 0.0f64..6.0) {
        let g = gl(16.0, 512);
        let setup = PotentialSetup::new(3, 0.0).unwrap();
        let f = bump(&g, c1, s1, p1);
        let h = bump(&g, c2, s2, p2);
        let mut hf = hankel_transform(&setup, order(nu), &f, &g).unwrap();
        let mut hh = hankel_transform(&setup, order(nu), &h, &g).unwrap();
        hf.space = Space::Physical;
        hh.space = Space::Physical;
        let lhs = hf.inner(&h, &g, 3);
        let rhs = f.inner(&hh, &g, 3);
        prop_assert!((lhs - rhs).norm() <= 1e-8 * lhs.norm().max(rhs.norm()).max(1e-3));
    }
}
