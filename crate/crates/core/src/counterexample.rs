//! Radial data concentrated on `J_N = [N, N + 2√N]` whose maximal function
//! on the annulus `1/100 ≤ |x| ≤ 1/8` is of size `N^{n/2}` while its `H^s`
//! norm squared grows like `N^{2s+n-1/2}`, so the maximal estimate on the
//! unit ball needs `s ≥ 1/4`.
//!
//! With `t(r) = r / (2(N + √N))` the phase `tρ² - rρ` is stationary at the
//! centre `N + √N` of `J_N`. The solution at that time splits into the
//! stationary piece `I₁`, the non-stationary piece `I₂` carrying the other
//! exponential of the cosine, and the remainder `I₃` of the large-argument
//! Bessel expansion.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{ensure, Result};
use crate::hankel::{GridPair, ModeField, PotentialSetup, RadialGrid, Space};
use crate::harmonics::{smooth_step, sobolev_norm_hankel};
use crate::maximal::{linearized_profile, maximal_function};
use crate::propagator::{sphere_area, SpectralState, DEFAULT_T_MAX};
use crate::quadrature::{composite, ComplexSum, Neumaier};
use crate::report::ExperimentReport;
use crate::specfun::j;

pub const MIN_SCALE: f64 = 64.0;
/// Inner and outer radius of the annulus `E`.
pub const REGION: (f64, f64) = (0.01, 0.125);
/// `rN` below which the large-argument split is refused.
pub const ASYMPTOTIC_THRESHOLD: f64 = 10.0;
const MIN_BAND_NODES: usize = 32;
const BAND_PANELS: usize = 32;
/// Octaves of the time ladder on each side of the steering times.
const LADDER_OCTAVES: f64 = 2.0;
const LADDER_PER_OCTAVE: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CounterexampleConfig {
    pub scale: f64,
    pub setup: PotentialSetup,
    /// Width of each edge ramp of the bump as a fraction of `|J_N|`.
    pub rolloff: f64,
    pub region: (f64, f64),
}

impl CounterexampleConfig {
    pub fn new(setup: PotentialSetup, scale: f64) -> Result<Self> {
        ensure!(scale >= MIN_SCALE && scale.is_finite(), Domain, "N must be at least {MIN_SCALE}, got {scale}");
        Ok(Self { scale, setup, rolloff: 0.1, region: REGION })
    }

    pub fn support(&self) -> (f64, f64) {
        (self.scale, self.scale + 2.0 * self.scale.sqrt())
    }

    /// `N + √N`, where the steered phase is stationary.
    pub fn center(&self) -> f64 {
        self.scale + self.scale.sqrt()
    }

    /// `χ_N`: one on the middle of `J_N`, smooth ramps of relative width
    /// [`Self::rolloff`] at both ends, zero outside.
    pub fn bump(&self, rho: f64) -> f64 {
        let (lo, hi) = self.support();
        let w = self.rolloff * (hi - lo);
        smooth_step((rho - lo) / w) * smooth_step((hi - rho) / w)
    }

    pub fn bump_derivative(&self, rho: f64) -> f64 {
        let (lo, hi) = self.support();
        let w = self.rolloff * (hi - lo);
        let (x, y) = ((rho - lo) / w, (hi - rho) / w);
        (smooth_step_derivative(x) * smooth_step(y) - smooth_step(x) * smooth_step_derivative(y)) / w
    }

    /// Volume of the annulus `E`.
    pub fn region_volume(&self) -> f64 {
        let n = self.setup.n() as i32;
        sphere_area(self.setup.n()) / n as f64 * (self.region.1.powi(n) - self.region.0.powi(n))
    }

    /// Panels on `J_N` resolving the bump ramps and the phase `tρ²`
    /// for times up to the top of the scan ladder.
    fn band_edges(&self) -> Vec<f64> {
        let (lo, hi) = self.support();
        let t_top = steering_time(self, self.region.1) * 2f64.powf(LADDER_OCTAVES);
        let rate = 2.0 * t_top * hi + self.region.1;
        let panels = ((hi - lo) * rate / PI).ceil().max(BAND_PANELS as f64) as usize;
        (0..=panels).map(|i| lo + (hi - lo) * i as f64 / panels as f64).collect()
    }

    /// Grids for the scan: the physical grid covers `[0, 1/8]` with the
    /// annulus resolved at the frequency `N`, the spectral grid has one
    /// panel below `N`, fine panels on `J_N` and one panel up to the top of
    /// the dyadic band containing `J_N`.
    pub fn grids(&self) -> Result<GridPair> {
        let (r_lo, r_hi) = self.region;
        let top = self.support().1;
        let panels = ((r_hi - r_lo) * top / (2.0 * PI)).ceil().max(8.0) as usize;
        let mut physical = vec![0.0];
        physical.extend((0..=panels).map(|i| r_lo + (r_hi - r_lo) * i as f64 / panels as f64));
        Ok(GridPair::new(RadialGrid::from_panels(&physical, 16)?, self.spectral_grid()?))
    }

    pub fn spectral_grid(&self) -> Result<RadialGrid> {
        let mut edges = vec![0.0];
        edges.extend(self.band_edges());
        let band_top = crate::harmonics::band_of(self.support().1);
        if band_top > *edges.last().unwrap() {
            edges.push(band_top);
        }
        RadialGrid::from_panels(&edges, 16)
    }
}

fn smooth_step_derivative(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    let s = smooth_step(x);
    s * (1.0 - s) * (1.0 / (x * x) + 1.0 / ((1.0 - x) * (1.0 - x)))
}

/// The radial state with `H_{ν(0)} u₀ = χ_N`.
pub fn build_data(config: &CounterexampleConfig, grids: &GridPair) -> Result<SpectralState> {
    let (lo, hi) = config.support();
    let spec = &grids.spectral;
    let inside = spec.nodes().iter().filter(|r| **r >= lo && **r <= hi).count();
    ensure!(
        inside >= MIN_BAND_NODES,
        GridCoverage,
        "the spectral grid has {inside} nodes on J_N = [{lo}, {hi}], at least {MIN_BAND_NODES} are needed"
    );
    ensure!(spec.r_max() >= hi, GridCoverage, "the spectral grid ends at {} inside J_N", spec.r_max());
    let c = sphere_area(config.setup.n()).sqrt();
    let b = ModeField::from_real(0, 1, Space::Spectral, spec, |r| c * config.bump(r));
    Ok(SpectralState { setup: config.setup, grids: grids.clone(), modes: vec![b], t_max: DEFAULT_T_MAX })
}

/// `t(r) = r / (2(N + √N))`.
pub fn steering_time(config: &CounterexampleConfig, r: f64) -> f64 {
    r / (2.0 * config.center())
}

/// `r (ρ - ρ_c)² / (2ρ_c)`, the phase left after factoring out the
/// stationary value at `ρ_c = N + √N`.
pub fn centered_phase(config: &CounterexampleConfig, r: f64, rho: f64) -> f64 {
    let c = config.center();
    r * (rho - c).powi(2) / (2.0 * c)
}

/// Constant `C` with `|J_ν(x) - √(2/(πx)) cos(x - νπ/2 - π/4)| ≤ C x^{-3/2}`
/// for `x ≥ 10`: the first two omitted terms of the Hankel expansion.
pub fn remainder_constant(nu: f64) -> f64 {
    let m = 4.0 * nu * nu;
    (2.0 / PI).sqrt() * ((m - 1.0).abs() / 8.0 + ((m - 1.0) * (m - 9.0)).abs() / (128.0 * ASYMPTOTIC_THRESHOLD))
}

/// `I₁`, `I₂` and `I₃` at each radius of `r`, evaluated at the steering time.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSplit {
    pub r: Vec<f64>,
    pub i1: Vec<Complex64>,
    pub i2: Vec<Complex64>,
    pub i3: Vec<Complex64>,
    /// `C ∫ (rρ)^{-(n-2)/2-3/2} χ_N ρ^{n-1} dρ` with [`remainder_constant`].
    pub i3_envelope: Vec<f64>,
    /// `C_ν ∫ (|g'|/φ' + |g| φ''/φ'²) dρ` for `I₂ = C_ν ∫ g e^{iφ}` with
    /// `φ = rρ + tρ²`, the bound left after one integration by parts.
    pub i2_bound: Vec<f64>,
    /// Largest centred phase over all quadrature nodes and radii.
    pub max_centered_phase: f64,
}

impl PhaseSplit {
    /// `min |I₁| / max (|I₂| + |I₃|)` over the radii.
    pub fn dominance(&self) -> f64 {
        let lo = self.i1.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
        let hi = self.i2.iter().zip(&self.i3).map(|(a, b)| a.norm() + b.norm()).fold(0.0, f64::max);
        lo / hi
    }
}

/// Split `u(r, t(r))` into its stationary, non-stationary and remainder
/// parts. `I₁` uses the centred form, `I₂` direct quadrature, and `I₃` is
/// the exact `u` minus the two, all on the same nodes of `J_N`.
pub fn phase_split(config: &CounterexampleConfig, rs: &[f64]) -> Result<PhaseSplit> {
    let (r_lo, r_hi) = config.region;
    for &r in rs {
        ensure!(r >= r_lo && r <= r_hi, Domain, "r = {r} is outside the annulus [{r_lo}, {r_hi}]");
        ensure!(
            r * config.scale >= ASYMPTOTIC_THRESHOLD,
            AsymptoticRegime,
            "rN = {} is below {ASYMPTOTIC_THRESHOLD}",
            r * config.scale
        );
    }
    let n = config.setup.n() as f64;
    let nu = config.setup.nu(0);
    let alpha = config.setup.alpha();
    let theta = nu * FRAC_PI_2 + FRAC_PI_4;
    let c_nu = 0.5 * (2.0 / PI).sqrt();
    let c_rem = remainder_constant(nu);
    let (rho, w) = composite(&config.band_edges(), 16);
    let chi: Vec<f64> = rho.iter().zip(&w).map(|(p, wi)| wi * config.bump(*p) * p.powf(n - 1.0)).collect();
    let center = config.center();
    let half = (n - 1.0) / 2.0;

    let parts: Vec<_> = rs
        .par_iter()
        .map(|&r| {
            let t = steering_time(config, r);
            let (mut i1, mut i2, mut u) = (ComplexSum::default(), ComplexSum::default(), ComplexSum::default());
            let (mut env, mut ibp) = (Neumaier::default(), Neumaier::default());
            let mut phase = 0.0f64;
            for ((p, m), wi) in rho.iter().zip(&chi).zip(&w) {
                let s = r * p;
                let amp = s.powf(-half) * m;
                let cp = centered_phase(config, r, *p);
                phase = phase.max(cp.abs());
                i1.add(Complex64::from_polar(amp, cp));
                i2.add(Complex64::from_polar(amp, s + t * p * p));
                u.add(Complex64::from_polar(s.powf(-alpha) * j(nu, s) * m, t * p * p));
                env.add(s.powf(-alpha - 1.5) * m);
                // One integration by parts against e^{i(rρ + tρ²)}; χ_N vanishes at both ends of J_N.
                let slope = r + 2.0 * t * p;
                let g = r.powf(-half) * p.powf(half) * config.bump(*p);
                let dg = r.powf(-half) * (half * p.powf(half - 1.0) * config.bump(*p) + p.powf(half) * config.bump_derivative(*p));
                ibp.add(wi * (dg.abs() / slope + g.abs() * 2.0 * t / (slope * slope)));
            }
            let stationary = -t * center * center;
            Split {
                i1: c_nu * Complex64::from_polar(1.0, theta + stationary) * i1.sum(),
                i2: c_nu * Complex64::from_polar(1.0, -theta) * i2.sum(),
                u: u.sum(),
                envelope: c_rem * env.sum(),
                i2_bound: c_nu * ibp.sum(),
                phase,
            }
        })
        .collect();
    Ok(PhaseSplit {
        r: rs.to_vec(),
        i1: parts.iter().map(|p| p.i1).collect(),
        i2: parts.iter().map(|p| p.i2).collect(),
        i3: parts.iter().map(|p| p.u - p.i1 - p.i2).collect(),
        i3_envelope: parts.iter().map(|p| p.envelope).collect(),
        i2_bound: parts.iter().map(|p| p.i2_bound).collect(),
        max_centered_phase: parts.iter().map(|p| p.phase).fold(0.0, f64::max),
    })
}

struct Split {
    i1: Complex64,
    i2: Complex64,
    u: Complex64,
    envelope: f64,
    i2_bound: f64,
    phase: f64,
}

/// `u*` on the nodes of the annulus, probed at each node's steering time
/// and on a geometric ladder from a quarter of the smallest to four times
/// the largest steering time, plus `t = 0`. Returns the radii and values.
pub fn region_maximal_function(config: &CounterexampleConfig, state: &SpectralState) -> Result<(Vec<f64>, Vec<f64>)> {
    let grid = &state.grids.physical;
    let steer: Vec<f64> = grid.nodes().iter().map(|&r| steering_time(config, r)).collect();
    let lo = steering_time(config, config.region.0) * 2f64.powf(-LADDER_OCTAVES);
    let hi = steering_time(config, config.region.1) * 2f64.powf(LADDER_OCTAVES);
    let steps = ((hi / lo).log2() * LADDER_PER_OCTAVE as f64).ceil() as usize;
    let mut ladder: Vec<f64> = (0..=steps).map(|i| lo * (hi / lo).powf(i as f64 / steps as f64)).collect();
    ladder.insert(0, 0.0);
    let sampled = maximal_function(state, &ladder)?;
    let steered = linearized_profile(state, &steer)?;
    let (r_lo, r_hi) = config.region;
    Ok(grid
        .nodes()
        .iter()
        .zip(sampled.values.iter().zip(&steered.values))
        .filter(|(r, _)| **r >= r_lo && **r <= r_hi)
        .map(|(r, (a, b))| (*r, a.max(*b)))
        .unzip())
}

/// For each `N`, `min_E u*`, `‖u₀‖²_{H^s}` and the ratio
/// `(min_E u*)² |E| / ‖u₀‖²_{H^s}` for each `s`, with power laws in `N`
/// fitted to every column.
pub fn sharpness_scan(setup: PotentialSetup, scales: &[f64], s_list: &[f64]) -> Result<ExperimentReport> {
    ensure!(scales.len() >= 5, Domain, "the scan needs at least 5 scales, got {}", scales.len());
    ensure!(
        scales.windows(2).all(|p| (p[1] / p[0] - 2.0).abs() < 1e-12),
        Domain,
        "scales must double from one to the next"
    );
    let start = std::time::Instant::now();
    let mut columns = vec!["N".to_string(), "min_E_ustar".to_string()];
    for s in s_list {
        columns.push(format!("hs_norm_sq[{s}]"));
        columns.push(format!("ratio[{s}]"));
    }
    let mut report = ExperimentReport::new(columns);
    report.metadata.insert("n".into(), setup.n().to_string());
    report.metadata.insert("a".into(), setup.a().to_string());
    report.metadata.insert("region".into(), format!("{:?}", REGION));
    report.metadata.insert("ladder".into(), format!("{LADDER_PER_OCTAVE} per octave, {LADDER_OCTAVES} octaves beyond the steering times"));

    for &scale in scales {
        let config = CounterexampleConfig::new(setup, scale)?;
        let grids = config.grids()?;
        let state = build_data(&config, &grids)?;
        let (_, ustar) = region_maximal_function(&config, &state)?;
        let low = ustar.iter().cloned().fold(f64::INFINITY, f64::min);
        let mut row = vec![scale, low];
        for &s in s_list {
            let hs = sobolev_norm_hankel(&setup, &state.modes, s, 0.0, &grids)?.powi(2);
            row.push(hs);
            row.push(low * low * config.region_volume() / hs);
        }
        log::info!("N = {scale}: min_E u* = {low:.6e}");
        report.push(row)?;
    }
    report.fit("ustar", "N", "min_E_ustar")?;
    for s in s_list {
        report.fit(&format!("hs_norm_sq[{s}]"), "N", &format!("hs_norm_sq[{s}]"))?;
        report.fit(&format!("ratio[{s}]"), "N", &format!("ratio[{s}]"))?;
    }
    report.wall_time = Some(start.elapsed());
    Ok(report)
}
