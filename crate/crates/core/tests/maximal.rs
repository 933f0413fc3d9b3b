use std::f64::consts::PI;

use invsq::hankel::*;
use invsq::maximal::*;
use invsq::propagator::*;
use invsq::specfun::BesselOrder;
use invsq::Error;
use num_complex::Complex64;
use proptest::prelude::*;

fn gl(r_max: f64, q: usize) -> GridPair {
    GridPair::self_dual(make_grid(r_max, q, GridScheme::CompositeGaussLegendre).unwrap())
}

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 }).sum();
    (f(a) + f(b) + inner) * h / 3.0
}

/// A state whose spectral coefficient is nonzero at one node only.
fn single_node_state(a: f64, grids: GridPair, node: usize) -> SpectralState {
    let setup = PotentialSetup::new(3, a).unwrap();
    let mut b = ModeField::zeros(0, 1, Space::Spectral, &grids.spectral);
    b.values[node] = Complex64::new(0.7, -0.2);
    SpectralState { setup, grids, modes: vec![b], t_max: DEFAULT_T_MAX }
}

fn gaussian_state(a: f64, grids: GridPair) -> SpectralState {
    let setup = PotentialSetup::new(3, a).unwrap();
    let p = setup.nu(0) - setup.alpha();
    let data = InitialData::radial(setup, grids, |r| Complex64::new(r.powf(p) * (-r * r).exp(), 0.0)).unwrap();
    prepare(&data).unwrap()
}

#[test]
fn weight_requires_beta_above_one() {
    assert!(matches!(WeightSpec::new(1.0), Err(Error::Domain(_))));
    assert!(WeightSpec::new(1.01).is_ok());
}

#[test]
fn ladder_is_geometric_with_zero() {
    let t = geometric_ladder(1.0, 3);
    assert_eq!(t, vec![0.0, 0.125, 0.25, 0.5, 1.0]);
}

#[test]
fn weighted_l2_of_constant_profile() {
    let grid = make_grid(10.0, 640, GridScheme::CompositeGaussLegendre).unwrap();
    let profile = MaximalProfile {
        values: vec![1.0; grid.len()],
        directions: 1,
        angular_weights: None,
        time_set: TimeSample::Ladder(vec![0.0]),
        grid_id: grid.id(),
    };
    let v = weighted_l2(&profile, WeightSpec::new(2.0).unwrap(), &grid, 3).unwrap();
    // ∫₀¹⁰ r²(1+r)⁻² dr = 10 - 2 ln 11 + 1 - 1/11.
    let exact = 4.0 * PI * (10.0 - 2.0 * 11f64.ln() + 1.0 - 1.0 / 11.0);
    assert!((v - exact).abs() < 1e-8, "{v} vs {exact}");
}

#[test]
fn misaligned_profile_is_rejected() {
    let grid = make_grid(10.0, 64, GridScheme::CompositeGaussLegendre).unwrap();
    let other = make_grid(11.0, 64, GridScheme::CompositeGaussLegendre).unwrap();
    let profile = MaximalProfile {
        values: vec![1.0; 64],
        directions: 1,
        angular_weights: None,
        time_set: TimeSample::Ladder(vec![0.0]),
        grid_id: other.id(),
    };
    let w = WeightSpec::new(2.0).unwrap();
    assert!(matches!(weighted_l2(&profile, w, &grid, 3), Err(Error::GridMismatch(_))));
}

#[test]
fn zero_state_has_zero_profile() {
    let grids = gl(8.0, 256);
    let mut state = gaussian_state(1.0, grids);
    state.modes[0].values.iter_mut().for_each(|v| *v = Complex64::default());
    let p = maximal_function(&state, &geometric_ladder(0.5, 4)).unwrap();
    assert!(p.values.iter().all(|v| *v == 0.0));
    let w = WeightSpec::new(2.0).unwrap();
    assert_eq!(weighted_l2(&p, w, &state.grids.physical, 3).unwrap(), 0.0);
}

#[test]
fn single_frequency_profile_is_time_independent() {
    for a in [0.0, 1.0] {
        let state = single_node_state(a, gl(8.0, 256), 100);
        let now = evolve(&state, 0.0).unwrap().radial_profile(3).unwrap();
        let p = maximal_function(&state, &[0.0, 0.01, 0.3, 0.77]).unwrap();
        for (v, u) in p.values.iter().zip(&now) {
            assert!((v - u.norm()).abs() <= 1e-12 * (1.0 + u.norm()));
        }
    }
}

#[test]
fn profile_bounds_every_probed_time() {
    let state = gaussian_state(1.0, gl(16.0, 1024));
    let times = geometric_ladder(0.25, 5);
    let p = maximal_function(&state, &times).unwrap();
    for t in &times {
        let u = evolve(&state, *t).unwrap().radial_profile(3).unwrap();
        assert!(p.values.iter().zip(&u).all(|(v, x)| *v >= x.norm()));
    }
}

#[test]
fn angular_profile_of_radial_state_matches_radial_profile() {
    let state = gaussian_state(0.5, gl(12.0, 384));
    let basis = invsq::harmonics::HarmonicBasis::new(3, 2).unwrap();
    let times = [0.0, 0.1, 0.2];
    let radial = maximal_function(&state, &times).unwrap();
    let full = maximal_function_on(&state, &times, &basis).unwrap();
    let d = full.directions;
    for (i, v) in radial.values.iter().enumerate() {
        for q in 0..d {
            assert!((full.values[i * d + q] - v).abs() < 1e-10 * (1.0 + v));
        }
    }
    let w = WeightSpec::new(1.5).unwrap();
    let a = weighted_l2(&radial, w, &state.grids.physical, 3).unwrap();
    let b = weighted_l2(&full, w, &state.grids.physical, 3).unwrap();
    assert!((a / b - 1.0).abs() < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn enlarging_the_time_set_never_lowers_the_profile(
        base in proptest::collection::vec(0.0f64..0.5, 1..4),
        extra in proptest::collection::vec(0.0f64..0.5, 1..4),
    ) {
        let state = gaussian_state(1.0, gl(10.0, 320));
        let small = maximal_function(&state, &base).unwrap();
        let mut all = base.clone();
        all.extend(extra);
        let large = maximal_function(&state, &all).unwrap();
        prop_assert!(small.values.iter().zip(&large.values).all(|(s, l)| s <= l));
    }
}

#[test]
fn fractional_norm_of_order_zero_is_window_times_weighted_norm() {
    let state = single_node_state(1.0, gl(8.0, 256), 40);
    let w = WeightSpec::new(2.0).unwrap();
    let profile = maximal_function(&state, &[0.0]).unwrap();
    let spatial = weighted_l2(&profile, w, &state.grids.physical, 3).unwrap();
    let v = fractional_time_norm(&state, 0.0, w, (0.1, 0.6), 64).unwrap();
    assert!((v / (0.5 * spatial) - 1.0).abs() < 1e-10, "{v} vs {}", 0.5 * spatial);
}

#[test]
fn fractional_norm_of_single_frequency_scales_exactly() {
    // Pick the window so that ρ₀² is a harmonic of the period.
    let grids = gl(8.0, 256);
    let node = 150;
    let rho = grids.spectral.nodes()[node];
    let period = 2.0 * PI / (rho * rho);
    let state = single_node_state(0.0, grids, node);
    let w = WeightSpec::new(1.5).unwrap();
    let base = fractional_time_norm(&state, 0.0, w, (0.0, period), 32).unwrap();
    for alpha in [0.25, 0.5, 1.0] {
        let v = fractional_time_norm(&state, alpha, w, (0.0, period), 32).unwrap();
        assert!((v / base / rho.powf(4.0 * alpha) - 1.0).abs() < 1e-9, "alpha = {alpha}");
    }
}

#[test]
fn fractional_norm_rejects_bad_grids() {
    let state = single_node_state(0.0, gl(8.0, 256), 10);
    let w = WeightSpec::new(1.5).unwrap();
    assert!(fractional_time_norm(&state, 0.5, w, (0.0, 1.0), 48).is_err());
    assert!(fractional_time_norm(&state, -0.5, w, (0.0, 1.0), 64).is_err());
    assert!(fractional_time_norm(&state, 0.5, w, (1.0, 1.0), 64).is_err());
}

#[test]
fn dyadic_pair_requires_powers_of_two() {
    assert!(DyadicPair::new(0.25, 8.0).is_ok());
    assert!(DyadicPair::new(0.3, 8.0).is_err());
    assert!(DyadicPair::new(1.0, 6.0).is_err());
}

#[test]
fn g_quantity_of_zero_data_is_zero() {
    let setup = PotentialSetup::new(3, 1.0).unwrap();
    let grid = RadialGrid::dyadic(-4, 4, 2, 16).unwrap();
    let b0 = ModeField::zeros(0, 1, Space::Spectral, &grid);
    let pair = DyadicPair::new(1.0, 4.0).unwrap();
    assert_eq!(g_quantity(&setup, 0, &b0, &grid, pair, WeightSpec::new(2.0).unwrap()).unwrap(), 0.0);
}

#[test]
fn g_quantity_matches_double_integral_in_three_dimensions() {
    // With a = 0 and n = 3, (rρ)^{-1/2} J_{1/2}(rρ) = √(2/π) sin(rρ)/(rρ).
    let setup = PotentialSetup::new(3, 0.0).unwrap();
    let grid = RadialGrid::dyadic(-4, 4, 2, 16).unwrap();
    let b0 = ModeField::from_real(0, 1, Space::Spectral, &grid, |s| (-s * s / 4.0).exp());
    let (r_scale, m_scale, beta) = (1.0, 2.0, 2.0);
    let pair = DyadicPair::new(r_scale, m_scale).unwrap();
    let v = g_quantity(&setup, 0, &b0, &grid, pair, WeightSpec::new(beta).unwrap()).unwrap();
    let kernel = |r: f64, p: f64| 2.0 / PI * ((r * p).sin() / (r * p)).powi(2);
    let exact = simpson(
        |r| {
            let inner = simpson(|p| kernel(r, p) * (-(m_scale * p).powi(2) / 2.0).exp(), 0.5, 1.0, 400);
            inner * (1.0 + r / m_scale).powf(-beta)
        },
        r_scale,
        2.0 * r_scale,
        400,
    );
    assert!((v / exact - 1.0).abs() < 1e-8, "{v} vs {exact}");
}

#[test]
fn g_quantity_band_must_be_on_grid() {
    let setup = PotentialSetup::new(3, 1.0).unwrap();
    let grid = RadialGrid::dyadic(-2, 3, 2, 16).unwrap();
    let b0 = ModeField::zeros(0, 1, Space::Spectral, &grid);
    let w = WeightSpec::new(2.0).unwrap();
    let pair = DyadicPair::new(1.0, 16.0).unwrap();
    assert!(matches!(g_quantity(&setup, 0, &b0, &grid, pair, w), Err(Error::GridRange(_))));
}

#[test]
fn envelope_branches() {
    let setup = PotentialSetup::new(3, 1.0).unwrap();
    let w = WeightSpec::new(2.0).unwrap();
    let small = g_branch_envelope(&setup, 0, DyadicPair::new(0.25, 4.0).unwrap(), w, 1.0).unwrap();
    assert_eq!(small.0, GBranch::Small);
    let large = g_branch_envelope(&setup, 0, DyadicPair::new(8.0, 4.0).unwrap(), w, 1.0).unwrap();
    assert_eq!(large.0, GBranch::Large);
    // min{1, (4/8)²} 8^{-1} 4^{-3}
    assert!((large.1 - 0.25 / 8.0 / 64.0).abs() < 1e-15);
    assert!(g_branch_envelope(&setup, 0, DyadicPair::new(1.0, 4.0).unwrap(), w, 1.0).is_none());
}

#[test]
fn t_nu_of_zero_is_zero() {
    let nu = BesselOrder::new(3.0).unwrap();
    let (_, v) = t_nu_apply(nu, (2.0, 5.0), |r| 0.1 * r, |_| Complex64::default()).unwrap();
    assert!(v.iter().all(|x| *x == Complex64::default()));
}

#[test]
fn t_nu_half_integer_closed_form() {
    let nu = BesselOrder::new(0.5).unwrap();
    let (r, v) = t_nu_apply(nu, (1.0, 2.0), |_| 0.0, |_| Complex64::new(1.0, 0.0)).unwrap();
    for (x, u) in r.iter().zip(&v).step_by(17) {
        let exact = (2.0 / PI).sqrt() * simpson(|p| (x * p).sin() * p.powf(-0.25), 1.0, 2.0, 2000);
        assert!((u - exact).norm() < 1e-10, "r = {x}");
    }
}

#[test]
fn t_nu_norm_bounds_every_density() {
    let op = TnuOperator::new(BesselOrder::new(2.0).unwrap(), (3.0, 7.0), 0.2).unwrap();
    let t: Vec<f64> = op.r().iter().map(|x| 0.2 * (7.0 * x).sin().abs()).collect();
    let norm = op.norm(&t).unwrap();
    for seed in 0..5 {
        let g: Vec<Complex64> =
            op.rho().iter().map(|p| Complex64::from_polar(1.0 + (p * (seed + 1) as f64).cos(), p * seed as f64)).collect();
        let u = op.apply(&t, &g).unwrap();
        let out: f64 = op.r_weights().iter().zip(&u).map(|(w, x)| w * x.norm_sqr()).sum();
        let inp: f64 = op.rho_weights().iter().zip(&g).map(|(w, x)| w * x.norm_sqr()).sum();
        assert!(out.sqrt() <= norm * inp.sqrt() * (1.0 + 1e-8));
    }
}

#[test]
fn ascent_does_not_lower_the_norm() {
    let op = TnuOperator::new(BesselOrder::new(4.0).unwrap(), (5.0, 9.0), 0.3).unwrap();
    let t0 = vec![0.0; op.r().len()];
    let start = op.norm(&t0).unwrap();
    let (best, t) = op.ascend(&t0, 64, 4).unwrap();
    assert!(best >= start * (1.0 - 1e-9));
    assert!((op.norm(&t).unwrap() / best - 1.0).abs() < 1e-6);
}

#[test]
fn t_nu_rejects_unresolved_times() {
    let op = TnuOperator::new(BesselOrder::new(1.0).unwrap(), (1.0, 2.0), 0.1).unwrap();
    let t = vec![0.2; op.r().len()];
    assert!(matches!(op.norm(&t), Err(Error::Resolution(_))));
    assert!(matches!(TnuOperator::new(BesselOrder::new(1.0).unwrap(), (1.0, 1e4), 1e3), Err(Error::Resolution(_))));
}

#[test]
fn radial_maximal_norm_of_zero_data_is_zero() {
    let setup = PotentialSetup::new(3, 1.0).unwrap();
    let data = InitialData::radial(setup, gl(8.0, 256), |_| Complex64::default()).unwrap();
    assert_eq!(radial_maximal_norm(&data, |r| r).unwrap(), 0.0);
}

#[test]
fn single_frequency_linearized_norm_ignores_time_selection() {
    for a in [0.0, 2.0] {
        let state = single_node_state(a, gl(8.0, 256), 120);
        let still = linearized_ball_norm(&state, |_| 0.0).unwrap();
        let moving = linearized_ball_norm(&state, |r| 0.9 * (13.0 * r).sin().abs()).unwrap();
        assert!(still > 0.0);
        assert!((moving / still - 1.0).abs() < 1e-12);
    }
}

#[test]
fn linearized_norm_at_fixed_time_matches_evolution() {
    // With t(r) ≡ t the linearized norm is the L² norm of u(t) on the unit ball.
    let state = gaussian_state(1.0, gl(12.0, 768));
    let t = 0.05;
    let lin = linearized_ball_norm(&state, |_| t).unwrap();
    let snap = evolve(&state, t).unwrap();
    let grid = &state.grids.physical;
    let direct: f64 = snap.modes[0]
        .values
        .iter()
        .zip(grid.measure(3))
        .zip(grid.nodes())
        .filter(|(_, r)| **r <= 1.0)
        .map(|((v, m), _)| m * v.norm_sqr())
        .sum();
    // Panels of width 1/4, so r = 1 is a panel edge.
    assert!((lin / direct.sqrt() - 1.0).abs() < 1e-6, "{lin} vs {}", direct.sqrt());
}
