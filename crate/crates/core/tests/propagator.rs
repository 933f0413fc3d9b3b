use invsq::hankel::*;
use invsq::harmonics::{analyze, HarmonicBasis};
use invsq::propagator::*;
use invsq::Error;
use num_complex::Complex64;

fn gl(r_max: f64, q: usize) -> GridPair {
    GridPair::self_dual(make_grid(r_max, q, GridScheme::CompositeGaussLegendre).unwrap())
}

fn free_gaussian(t: f64, r: f64) -> Complex64 {
    let z = Complex64::new(1.0, -4.0 * t);
    z.powf(-1.5) * (-r * r / z).exp()
}

/// `r^{ν(0)-1/2} e^{-r²}`: a Gaussian carrying the origin behaviour of the
/// perturbed operator, so its transform decays like a Gaussian too. Plain
/// `e^{-r²}` has a power-law transform when `a ≠ 0`.
fn gaussian_data(a: f64, grids: GridPair) -> InitialData {
    let setup = PotentialSetup::new(3, a).unwrap();
    let p = setup.nu(0) - setup.alpha();
    InitialData::radial(setup, grids, |r| Complex64::new(r.powf(p) * (-r * r).exp(), 0.0)).unwrap()
}

#[test]
fn zero_data_gives_zero_state() {
    let grids = gl(8.0, 256);
    let data = InitialData::radial(PotentialSetup::new(3, 1.0).unwrap(), grids, |_| Complex64::default()).unwrap();
    let state = prepare(&data).unwrap();
    assert!(state.modes[0].values.iter().all(|v| *v == Complex64::default()));
    let snap = evolve(&state, 0.3).unwrap();
    assert!(snap.modes[0].values.iter().all(|v| *v == Complex64::default()));
}

#[test]
fn prepare_matches_gaussian_pair_and_norm() {
    let data = gaussian_data(0.0, gl(12.0, 768));
    let state = prepare(&data).unwrap();
    let c = sphere_area(3).sqrt();
    // H_{1/2} e^{-r²} = 2^{-3/2} e^{-ρ²/4} in three dimensions.
    for (b, rho) in state.modes[0].values.iter().zip(state.grids.spectral.nodes()) {
        let exact = c * 2f64.powf(-1.5) * (-rho * rho / 4.0).exp();
        assert!((b - exact).norm() < 1e-9, "rho = {rho}");
    }
    assert!((state.norm() / data.norm() - 1.0).abs() < 1e-6);
}

#[test]
fn time_zero_is_identity() {
    for a in [0.0, 1.0, -0.2] {
        let data = gaussian_data(a, gl(12.0, 768));
        let snap = evolve(&prepare(&data).unwrap(), 0.0).unwrap();
        let err = relative_l2(&snap.modes[0].values, &data.modes[0].values, &data.grids.physical.measure(3));
        assert!(err < 1e-6, "a = {a}: {err}");
    }
}

#[test]
fn free_gaussian_closed_form() {
    let data = gaussian_data(0.0, gl(12.0, 768));
    let state = prepare(&data).unwrap();
    for t in [0.05, 0.1, 0.2] {
        let u = evolve(&state, t).unwrap().radial_profile(3).unwrap();
        for (v, &r) in u.iter().zip(data.grids.physical.nodes()) {
            if r <= 4.0 {
                let exact = free_gaussian(t, r);
                assert!((v - exact).norm() < 1e-5, "t = {t}, r = {r}: {v} vs {exact}");
                assert!((v.norm() - exact.norm()).abs() < 1e-5);
            }
        }
    }
}

#[test]
fn unitarity_along_a_time_ladder() {
    for a in [1.0, -0.2, 3.0] {
        let data = gaussian_data(a, gl(24.0, 1536));
        let state = prepare(&data).unwrap();
        let n0 = data.norm();
        for m in 2..10 {
            let t = 2f64.powi(-m);
            let snap = evolve(&state, t).unwrap();
            let drift = (snap.norm(&state.grids, 3) / n0 - 1.0).abs();
            assert!(drift < 1e-6, "a = {a}, t = {t}: {drift}");
        }
    }
}

#[test]
fn batch_equals_loop_exactly() {
    let data = gaussian_data(1.0, gl(12.0, 768));
    let state = prepare(&data).unwrap();
    let times: Vec<f64> = (0..16).map(|i| i as f64 / 40.0).collect();
    let batch = evolve_batch(&state, &times).unwrap();
    for (snap, &t) in batch.iter().zip(&times) {
        assert_eq!(*snap, evolve(&state, t).unwrap());
    }
    let zero = evolve_batch(&state, &[0.0]).unwrap();
    let err = relative_l2(&zero[0].modes[0].values, &data.modes[0].values, &data.grids.physical.measure(3));
    assert!(err < 1e-6);
    assert!(evolve_batch(&state, &[0.2, 0.1]).is_err());
    assert!(evolve(&state, 2.0).is_err());
}

#[test]
fn group_property() {
    let data = gaussian_data(1.0, gl(16.0, 1024));
    let state = prepare(&data).unwrap();
    let round_trip = relative_l2(
        &evolve(&state, 0.0).unwrap().modes[0].values,
        &data.modes[0].values,
        &data.grids.physical.measure(3),
    )
    .max(1e-12);
    let (t1, t2) = (0.07, 0.11);
    let mid = evolve(&state, t1).unwrap();
    let two_step = evolve(&prepare(&mid.as_data(&state)).unwrap(), t2).unwrap();
    let direct = evolve(&state, t1 + t2).unwrap();
    let err = relative_l2(&two_step.modes[0].values, &direct.modes[0].values, &data.grids.physical.measure(3));
    assert!(err <= 2.0 * round_trip.max(1e-8), "{err} vs round trip {round_trip}");
}

#[test]
fn single_mode_stays_single() {
    let setup = PotentialSetup::new(3, 1.0).unwrap();
    let grids = gl(12.0, 512);
    let f = ModeField::from_real(2, 3, Space::Physical, &grids.physical, |r| r * r * (-r * r).exp());
    let data = InitialData::new(setup, grids.clone(), vec![f], 4).unwrap();
    let snap = evolve(&prepare(&data).unwrap(), 0.1).unwrap();
    let basis = HarmonicBasis::new(3, 4).unwrap();
    let modes = analyze(&basis, &snap.field(&basis).unwrap(), &grids.physical).unwrap();
    let total: f64 = modes.iter().map(|m| m.norm_sqr(&grids.physical, 3)).sum();
    let cross: f64 = modes.iter().filter(|m| (m.k, m.ell) != (2, 3)).map(|m| m.norm_sqr(&grids.physical, 3)).sum();
    assert!(cross < 1e-12 * total, "{cross} of {total}");
}

#[test]
fn singular_data_is_rejected() {
    let setup = PotentialSetup::new(3, 1.0).unwrap();
    let grids = gl(8.0, 256);
    let bad = ModeField::from_real(0, 1, Space::Physical, &grids.physical, |r| 1.0 / r);
    assert!(matches!(InitialData::new(setup, grids.clone(), vec![bad], 0), Err(Error::Domain(_))));
    let mild = ModeField::from_real(0, 1, Space::Physical, &grids.physical, |r| r.powf(-0.5) * (-r * r).exp());
    assert!(InitialData::new(setup, grids.clone(), vec![mild.clone()], 0).is_ok());
    let high = ModeField { k: 3, ..mild };
    assert!(matches!(InitialData::new(setup, grids, vec![high], 2), Err(Error::DegreeOverflow(_))));
}

fn uniform(r_max: f64, q: usize) -> GridPair {
    GridPair::self_dual(make_grid(r_max, q, GridScheme::Uniform).unwrap())
}

#[test]
fn fd_oracle_basics() {
    let data = gaussian_data(0.0, uniform(16.0, 2048));
    assert_eq!(oracle_evolve_fd(&data, 0.0, 1e-3).unwrap().modes, data.modes);
    assert!(matches!(oracle_evolve_fd(&data, 0.1, 0.0), Err(Error::StepSize(_))));
    assert!(matches!(oracle_evolve_fd(&data, 0.1, 0.5), Err(Error::StepSize(_))));
    let gl_data = gaussian_data(0.0, gl(16.0, 1024));
    assert!(oracle_evolve_fd(&gl_data, 0.1, 1e-3).is_err());
}

#[test]
fn fd_oracle_matches_free_gaussian() {
    let data = gaussian_data(0.0, uniform(16.0, 2048));
    let u = oracle_evolve_fd(&data, 0.1, 1e-3).unwrap().radial_profile(3).unwrap();
    for (v, &r) in u.iter().zip(data.grids.physical.nodes()) {
        if r <= 4.0 {
            assert!((v - free_gaussian(0.1, r)).norm() < 1e-3, "r = {r}");
        }
    }
}

#[test]
fn fd_oracle_cross_validates_the_spectral_solver() {
    for a in [1.0, -0.2] {
        let setup = PotentialSetup::new(3, a).unwrap();
        let grids = uniform(16.0, 2048);
        let data = InitialData::radial(setup, grids, |r| Complex64::new((-4.0 * (r - 2.0).powi(2)).exp(), 0.0)).unwrap();
        let spectral = evolve(&prepare(&data).unwrap(), 0.1).unwrap();
        let fd = oracle_evolve_fd(&data, 0.1, 2.5e-4).unwrap();
        let err = relative_l2(&fd.modes[0].values, &spectral.modes[0].values, &data.grids.physical.measure(3));
        assert!(err < 5e-3, "a = {a}: {err}");
    }
}
