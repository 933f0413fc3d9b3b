use std::f64::consts::PI;

use super::{maximal_function, weighted_l2, WeightSpec};
use crate::error::{ensure, Result};
use crate::hankel::{GridPair, ModeField, PotentialSetup, RadialGrid, Space};
use crate::harmonics::{band_limited_profile, sobolev_norm_hankel};
use crate::propagator::{sphere_area, SpectralState};
use crate::report::ExperimentReport;

/// Radial data with `H_ν u₀ = |S^{n-1}|^{1/2} band_limited_profile(·, λ)` on
/// grids that resolve the ball of radius `radius` over the times a wave of
/// frequency `λ` needs to cross it.
pub fn scaled_band_state(setup: &PotentialSetup, lambda: f64, radius: f64) -> Result<SpectralState> {
    ensure!(lambda > 0.0 && radius > 0.0, Domain, "scale {lambda} and radius {radius} must be positive");
    let (lo, hi) = (0.55 * lambda, 0.95 * lambda);
    let t_max = 2.0 * radius / lambda;
    let physical_panels = (radius * hi / (2.0 * PI)).ceil().max(8.0) as usize;
    let physical: Vec<f64> = (0..=physical_panels).map(|i| radius * i as f64 / physical_panels as f64).collect();
    let spectral_panels = ((hi - lo) * (2.0 * t_max * hi + radius) / PI).ceil().max(8.0) as usize;
    let mut spectral = vec![0.0];
    spectral.extend((0..=spectral_panels).map(|i| lo + (hi - lo) * i as f64 / spectral_panels as f64));
    spectral.push(crate::harmonics::band_of(hi));
    let grids = GridPair::new(RadialGrid::from_panels(&physical, 16)?, RadialGrid::from_panels(&spectral, 16)?);
    let c = sphere_area(setup.n()).sqrt();
    let b = ModeField::from_real(0, 1, Space::Spectral, &grids.spectral, |p| c * band_limited_profile(p, lambda));
    Ok(SpectralState { setup: *setup, grids, modes: vec![b], t_max })
}

/// The ratio `‖u*‖²_{L²(B_R, (1+|x|)^{-β})} / ‖u₀‖²_{H^s}` for the data of
/// [`scaled_band_state`] at every frequency factor, with `u*` the supremum
/// over a uniform time grid on `[0, 2R/λ]` with `samples_per_scale` points
/// per `1/λ²`, the time over which `|u(t, r)|` changes at frequency `λ`.
/// Columns `scale`, `weighted_norm`, `sobolev_norm` (both squared norms)
/// and `ratio`; fit `ratio` against `scale`.
pub fn weighted_ratio_scan(
    setup: &PotentialSetup,
    w: WeightSpec,
    s: f64,
    factors: &[f64],
    radius: f64,
    samples_per_scale: f64,
) -> Result<ExperimentReport> {
    ensure!(!factors.is_empty(), InvalidConfig, "no frequency factors");
    ensure!(samples_per_scale > 0.0, InvalidConfig, "samples per scale must be positive, got {samples_per_scale}");
    let mut report = ExperimentReport::new(["scale", "weighted_norm", "sobolev_norm", "ratio"]);
    report.metadata.insert("beta".into(), format!("{:?}", w.beta()));
    report.metadata.insert("s".into(), format!("{s:?}"));
    report.metadata.insert("radius".into(), format!("{radius:?}"));
    for &lambda in factors {
        let state = scaled_band_state(setup, lambda, radius)?;
        let steps = (samples_per_scale * state.t_max * lambda * lambda).ceil() as usize;
        let times: Vec<f64> = (0..=steps).map(|i| state.t_max * i as f64 / steps as f64).collect();
        let profile = maximal_function(&state, &times)?;
        let lhs = weighted_l2(&profile, w, &state.grids.physical, setup.n())?;
        let hs = sobolev_norm_hankel(setup, &state.modes, s, 0.0, &state.grids)?.powi(2);
        report.push(vec![lambda, lhs, hs, lhs / hs])?;
        crate::hankel::clear_kernel_cache();
    }
    if report.rows.len() >= 4 {
        report.fit("ratio", "scale", "ratio")?;
    }
    Ok(report)
}
