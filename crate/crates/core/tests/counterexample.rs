use std::f64::consts::FRAC_PI_4;

use invsq::counterexample::*;
use invsq::hankel::*;
use invsq::harmonics::sobolev_norm_hankel;
use invsq::maximal::linearized_profile;
use invsq::report::fit_slope;
use invsq::Error;

fn setup() -> PotentialSetup {
    PotentialSetup::new(3, 1.0).unwrap()
}

fn config(scale: f64) -> CounterexampleConfig {
    CounterexampleConfig::new(setup(), scale).unwrap()
}

#[test]
fn scale_must_be_large() {
    assert!(matches!(CounterexampleConfig::new(setup(), 32.0), Err(Error::Domain(_))));
}

#[test]
fn data_lives_on_the_band() {
    let c = config(64.0);
    assert_eq!(c.support(), (64.0, 80.0));
    let grids = c.grids().unwrap();
    let state = build_data(&c, &grids).unwrap();
    let b = &state.modes[0];
    assert_eq!((b.k, b.space), (0, Space::Spectral));
    for (v, r) in b.values.iter().zip(grids.spectral.nodes()) {
        if *r < 64.0 || *r > 80.0 {
            assert_eq!(v.norm(), 0.0, "rho = {r}");
        }
    }
    assert!(b.values.iter().any(|v| v.norm() > 0.9 * invsq::propagator::sphere_area(3).sqrt()));
}

#[test]
fn coarse_spectral_grid_is_rejected() {
    let c = config(64.0);
    let spectral = RadialGrid::from_panels(&[0.0, 50.0, 100.0, 128.0, 140.0], 16).unwrap();
    let grids = GridPair::new(c.grids().unwrap().physical.as_ref().clone(), spectral);
    assert!(matches!(build_data(&c, &grids), Err(Error::GridCoverage(_))));
}

#[test]
fn physical_norm_matches_band_norm() {
    let c = config(64.0);
    let physical = make_grid(60.0, 16 * 960, GridScheme::CompositeGaussLegendre).unwrap();
    let grids = GridPair::new(physical, c.spectral_grid().unwrap());
    let state = build_data(&c, &grids).unwrap();
    let u0 = evolve_radial(&state, 0.0);
    let area = invsq::propagator::sphere_area(3);
    let physical: f64 = u0.iter().zip(grids.physical.measure(3)).map(|(v, m)| m * v * v).sum();
    let band: f64 = grids.spectral.integrate(|r| (c.bump(r) * r).powi(2));
    assert!((physical / area / band - 1.0).abs() < 1e-6, "{} vs {band}", physical / area);
}

fn evolve_radial(state: &invsq::propagator::SpectralState, t: f64) -> Vec<f64> {
    let snap = invsq::propagator::evolve(state, t).unwrap();
    snap.modes[0].values.iter().map(|v| v.norm()).collect()
}

#[test]
fn sobolev_norm_grows_like_the_band() {
    let scales: Vec<f64> = (6..=12).map(|k| 2f64.powi(k)).collect();
    for s in [0.15, 0.25, 0.5] {
        let rows: Vec<(f64, f64)> = scales
            .iter()
            .map(|&n| {
                let c = config(n);
                let grids = c.grids().unwrap();
                let state = build_data(&c, &grids).unwrap();
                (n, sobolev_norm_hankel(&setup(), &state.modes, s, 0.0, &grids).unwrap().powi(2))
            })
            .collect();
        let (slope, _) = fit_slope(&rows).unwrap();
        assert!((slope - (2.0 * s + 2.5)).abs() <= 0.05, "s = {s}: slope {slope}");
    }
}

#[test]
fn steering_time_examples() {
    let c = config(100.0);
    assert!((steering_time(&c, 0.125) - 1.0 / 1760.0).abs() < 1e-18);
    for r in [0.01, 0.05, 0.125] {
        let t = steering_time(&c, r);
        assert!((2.0 * t * c.center() - r).abs() <= 1e-15 * r);
    }
}

#[test]
fn cosine_premise_holds_on_the_annulus() {
    for scale in [64.0, 1024.0, 65536.0] {
        let c = config(scale);
        let rs: Vec<f64> = (0..=40).map(|i| (0.01 + 0.115 * i as f64 / 40.0).min(0.125)).filter(|r| r * scale >= 10.0).collect();
        if rs.is_empty() {
            continue;
        }
        let split = phase_split(&c, &rs).unwrap();
        assert!(split.max_centered_phase <= FRAC_PI_4, "N = {scale}");
        assert!(split.max_centered_phase <= 2.0 * 0.125);
    }
}

#[test]
fn split_preconditions() {
    let c = config(64.0);
    assert!(matches!(phase_split(&c, &[0.1]), Err(Error::AsymptoticRegime(_))));
    assert!(matches!(phase_split(&c, &[0.5]), Err(Error::Domain(_))));
}

#[test]
fn split_reconstructs_the_propagator() {
    let c = config(1024.0);
    let grids = c.grids().unwrap();
    let state = build_data(&c, &grids).unwrap();
    let nodes: Vec<f64> = grids.physical.nodes().to_vec();
    let times: Vec<f64> = nodes.iter().map(|&r| steering_time(&c, r)).collect();
    let profile = linearized_profile(&state, &times).unwrap();
    let inside: Vec<usize> = (0..nodes.len()).filter(|&i| nodes[i] >= 0.01).step_by(7).collect();
    let rs: Vec<f64> = inside.iter().map(|&i| nodes[i]).collect();
    let split = phase_split(&c, &rs).unwrap();
    for (k, &i) in inside.iter().enumerate() {
        let sum = (split.i1[k] + split.i2[k] + split.i3[k]).norm();
        assert!((sum / profile.values[i] - 1.0).abs() < 1e-8, "r = {}", rs[k]);
    }
}

#[test]
fn remainder_and_non_stationary_bounds_hold() {
    for scale in [1024.0, 4096.0, 16384.0] {
        let c = config(scale);
        let rs: Vec<f64> = (0..=46).map(|i| 0.01 + 0.0025 * i as f64).collect();
        let split = phase_split(&c, &rs).unwrap();
        for k in 0..rs.len() {
            assert!(split.i3[k].norm() <= split.i3_envelope[k], "N = {scale}, r = {}", rs[k]);
            assert!(split.i2[k].norm() <= split.i2_bound[k], "N = {scale}, r = {}", rs[k]);
        }
    }
}

#[test]
fn stationary_piece_scales_like_n_to_the_three_halves() {
    let rs: Vec<f64> = (0..=46).map(|i| 0.01 + 0.0025 * i as f64).collect();
    let mut i1 = Vec::new();
    let mut i3 = Vec::new();
    for k in 10..=14 {
        let n = 2f64.powi(k);
        let split = phase_split(&config(n), &rs).unwrap();
        i1.push((n, split.i1.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min)));
        i3.push((n, split.i3.iter().map(|v| v.norm()).fold(0.0, f64::max)));
    }
    let (s1, _) = fit_slope(&i1).unwrap();
    assert!((s1 - 1.5).abs() <= 0.05, "min |I1| slope {s1}");
    let (s3, _) = fit_slope(&i3).unwrap();
    assert!(s3 <= 0.55, "max |I3| slope {s3}");
}

#[test]
fn dominance_of_the_stationary_piece_grows() {
    let rs: Vec<f64> = (0..=46).map(|i| 0.01 + 0.0025 * i as f64).collect();
    let d: Vec<f64> =
        [1024.0, 4096.0, 16384.0, 65536.0].iter().map(|&n| phase_split(&config(n), &rs).unwrap().dominance()).collect();
    eprintln!("dominance {d:?}");
    assert!(d.windows(2).all(|p| p[1] > p[0]), "{d:?}");
}
