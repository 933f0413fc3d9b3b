use std::f64::consts::PI;

use super::{evolve, sphere_area, SpectralState};
use crate::error::{ensure, Result};
use crate::hankel::{GridPair, ModeField, PotentialSetup, RadialGrid, Space};
use crate::report::ExperimentReport;

/// Radial data with spectral profile `(1 + ρ²)^{-γ}` on `(0, ρ_max]`,
/// observed on the annulus `r_lo ≤ r ≤ r_hi` and resolved for
/// `|t| ≤ t_max`. The untruncated data lies in `H^s` exactly when
/// `s < 2γ - n/2`; for `s < n/2` it need not be bounded near the origin,
/// which is why the annulus excludes it.
pub fn power_law_state(
    setup: &PotentialSetup,
    gamma: f64,
    rho_max: f64,
    annulus: (f64, f64),
    t_max: f64,
) -> Result<SpectralState> {
    let (lo, hi) = annulus;
    ensure!(gamma > 0.0 && rho_max > 0.0 && t_max > 0.0, Domain, "invalid power-law data parameters");
    ensure!(0.0 <= lo && lo < hi, Domain, "invalid annulus [{lo}, {hi}]");
    let physical_panels = ((hi - lo) * rho_max / (2.0 * PI)).ceil().max(8.0) as usize;
    let spectral_panels = (rho_max * (2.0 * t_max * rho_max + hi) / PI).ceil().max(8.0) as usize;
    let edges = |a: f64, b: f64, panels: usize| -> Vec<f64> {
        (0..=panels).map(|i| a + (b - a) * i as f64 / panels as f64).collect()
    };
    let grids = GridPair::new(
        RadialGrid::from_panels(&edges(lo, hi, physical_panels), 16)?,
        RadialGrid::from_panels(&edges(0.0, rho_max, spectral_panels), 16)?,
    );
    let c = sphere_area(setup.n()).sqrt();
    let b = ModeField::from_real(0, 1, Space::Spectral, &grids.spectral, |p| c * (1.0 + p * p).powf(-gamma));
    Ok(SpectralState { setup: *setup, grids, modes: vec![b], t_max })
}

/// `max_i |u(t, r_i) - u₀(r_i)|` over the physical nodes of `state` along
/// `t = 2^{-m}` for each `m` in `levels`. Columns `m`, `t`, `sup_diff`;
/// fit `sup_diff` against `t`.
pub fn convergence_scan(state: &SpectralState, levels: &[u32]) -> Result<ExperimentReport> {
    ensure!(
        state.modes.len() == 1 && state.modes[0].k == 0,
        Domain,
        "the convergence scan takes radial data"
    );
    let c = sphere_area(state.setup.n()).sqrt();
    let u0 = evolve(state, 0.0)?;
    let mut report = ExperimentReport::new(["m", "t", "sup_diff"]);
    for &m in levels {
        let t = 2f64.powi(-(m as i32));
        let u = evolve(state, t)?;
        let sup = u.modes[0]
            .values
            .iter()
            .zip(&u0.modes[0].values)
            .map(|(a, b)| (a - b).norm() / c)
            .fold(0.0, f64::max);
        report.push(vec![m as f64, t, sup])?;
    }
    if report.rows.len() >= 4 {
        report.fit("sup_diff", "t", "sup_diff")?;
    }
    Ok(report)
}
