//! Time evolution through the Hankel representation
//! `u(t) = Σ H_{ν(k)}[e^{itρ²} H_{ν(k)} a⁰_{k,ℓ}] Y_{k,ℓ}`, and an implicit
//! finite-difference stepper for the radial equation used as an oracle.

mod convergence;
mod fd;

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use statrs::function::gamma::gamma;

use crate::error::{ensure, Result};
use crate::hankel::{ensure_space, GridPair, ModeField, PotentialSetup, Space};
use crate::harmonics::{synthesize, HarmonicBasis};
use crate::specfun::BesselOrder;

pub use convergence::{convergence_scan, power_law_state};
pub use fd::{a_nu_tridiagonal, oracle_evolve_fd, Tridiagonal};

/// Default bound on `|t|` accepted by [`evolve`].
pub const DEFAULT_T_MAX: f64 = 1.0;

/// `|S^{n-1}| = 2π^{n/2}/Γ(n/2)`.
pub fn sphere_area(n: usize) -> f64 {
    2.0 * PI.powf(n as f64 / 2.0) / gamma(n as f64 / 2.0)
}

/// Initial data `u₀ = Σ a⁰_{k,ℓ}(r) Y_{k,ℓ}` as physical mode fields.
#[derive(Debug, Clone)]
pub struct InitialData {
    pub setup: PotentialSetup,
    pub grids: GridPair,
    pub modes: Vec<ModeField>,
}

/// Least-squares exponent `σ` in `|f(r)| ≈ C r^{-σ}` over the first nodes.
fn origin_growth(r: &[f64], f: &[Complex64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = r
        .iter()
        .zip(f)
        .take(8)
        .filter(|(_, v)| v.norm() > 0.0)
        .map(|(x, v)| (x.ln(), v.norm().ln()))
        .collect();
    if pts.len() < 4 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(-sxy / sxx)
}

impl InitialData {
    /// Checks that every mode is physical, finite, on the physical grid, of
    /// degree at most `k_max`, and not growing like `r^{-σ}` with
    /// `σ ≥ (n-1)/2` at the origin.
    pub fn new(setup: PotentialSetup, grids: GridPair, modes: Vec<ModeField>, k_max: usize) -> Result<Self> {
        let half = (setup.n() as f64 - 1.0) / 2.0;
        for m in &modes {
            ensure_space(m, Space::Physical)?;
            m.check_grid(&grids.physical)?;
            ensure!(m.k <= k_max, DegreeOverflow, "mode ({}, {}) exceeds K_max = {k_max}", m.k, m.ell);
            ensure!(m.values.iter().all(|v| v.is_finite()), Domain, "mode ({}, {}) has non-finite values", m.k, m.ell);
            if let Some(sigma) = origin_growth(grids.physical.nodes(), &m.values) {
                ensure!(
                    sigma < half,
                    Domain,
                    "mode ({}, {}) grows like r^-{sigma:.2} at the origin, not allowed for sigma >= {half}",
                    m.k,
                    m.ell
                );
            }
        }
        Ok(Self { setup, grids, modes })
    }

    /// Radial data `u₀(x) = f(|x|)`, stored as the `k = 0` coefficient
    /// `f · |S^{n-1}|^{1/2}`.
    pub fn radial<F: Fn(f64) -> Complex64>(setup: PotentialSetup, grids: GridPair, f: F) -> Result<Self> {
        let c = sphere_area(setup.n()).sqrt();
        let m = ModeField::from_fn(0, 1, Space::Physical, &grids.physical, |r| f(r) * c);
        Self::new(setup, grids, vec![m], 0)
    }

    pub fn norm(&self) -> f64 {
        self.modes.iter().map(|m| m.norm_sqr(&self.grids.physical, self.setup.n())).sum::<f64>().sqrt()
    }
}

/// Spectral coefficients `b⁰_{k,ℓ} = H_{ν(k)} a⁰_{k,ℓ}`.
#[derive(Debug, Clone)]
pub struct SpectralState {
    pub setup: PotentialSetup,
    pub grids: GridPair,
    pub modes: Vec<ModeField>,
    pub t_max: f64,
}

impl SpectralState {
    pub fn norm(&self) -> f64 {
        self.modes.iter().map(|m| m.norm_sqr(&self.grids.spectral, self.setup.n())).sum::<f64>().sqrt()
    }

    pub fn with_t_max(mut self, t_max: f64) -> Self {
        self.t_max = t_max;
        self
    }
}

/// The solution at one time, as physical mode fields.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub modes: Vec<ModeField>,
}

impl Snapshot {
    pub fn norm(&self, grids: &GridPair, n: usize) -> f64 {
        self.modes.iter().map(|m| m.norm_sqr(&grids.physical, n)).sum::<f64>().sqrt()
    }

    /// `u(t, r)` for radial data: the `k = 0` coefficient over `|S^{n-1}|^{1/2}`.
    pub fn radial_profile(&self, n: usize) -> Result<Vec<Complex64>> {
        ensure!(
            self.modes.len() == 1 && self.modes[0].k == 0,
            Domain,
            "snapshot has {} modes; a radial profile needs exactly the k = 0 mode",
            self.modes.len()
        );
        let c = sphere_area(n).sqrt();
        Ok(self.modes[0].values.iter().map(|v| v / c).collect())
    }

    /// `u(t, r_i ω_q)` on the radial grid times the angular grid of `basis`.
    pub fn field(&self, basis: &HarmonicBasis) -> Result<Vec<Vec<Complex64>>> {
        synthesize(basis, &self.modes)
    }

    /// The data at this time, ready to be evolved further.
    pub fn as_data(&self, state: &SpectralState) -> InitialData {
        InitialData { setup: state.setup, grids: state.grids.clone(), modes: self.modes.clone() }
    }
}

pub fn prepare(data: &InitialData) -> Result<SpectralState> {
    let modes = data
        .modes
        .par_iter()
        .map(|m| data.grids.transform(&data.setup, BesselOrder::new(data.setup.nu(m.k))?, m))
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectralState { setup: data.setup, grids: data.grids.clone(), modes, t_max: DEFAULT_T_MAX })
}

fn evolve_mode(state: &SpectralState, b: &ModeField, t: f64) -> Result<ModeField> {
    let rho = state.grids.spectral.nodes();
    let values = b
        .values
        .iter()
        .zip(rho)
        .map(|(v, r)| v * Complex64::from_polar(1.0, t * r * r))
        .collect();
    let moved = ModeField { values, ..b.clone() };
    state.grids.transform(&state.setup, BesselOrder::new(state.setup.nu(b.k))?, &moved)
}

/// `u(t)` from the spectral state.
pub fn evolve(state: &SpectralState, t: f64) -> Result<Snapshot> {
    ensure!(t.is_finite() && t.abs() <= state.t_max, Domain, "|t| = {} exceeds T_max = {}", t.abs(), state.t_max);
    let modes = state.modes.par_iter().map(|b| evolve_mode(state, b, t)).collect::<Result<Vec<_>>>()?;
    Ok(Snapshot { t, modes })
}

/// [`evolve`] at each of the sorted `times`.
pub fn evolve_batch(state: &SpectralState, times: &[f64]) -> Result<Vec<Snapshot>> {
    ensure!(times.iter().all(|t| t.is_finite()), Domain, "times must be finite");
    ensure!(times.windows(2).all(|p| p[0] <= p[1]), Domain, "times must be sorted");
    times.par_iter().map(|&t| evolve(state, t)).collect()
}
