//! Maximal functions `u*(x) = sup_t |u(x, t)|` over finite time sets, their
//! weighted norms, and the quantities used to bound them.

mod gquantity;
mod scan;
mod time;
mod tnu;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{ensure, Result};
use crate::hankel::{kernel, RadialGrid};
use crate::harmonics::HarmonicBasis;
use crate::propagator::{evolve_batch, sphere_area, SpectralState};
use crate::quadrature::{ComplexSum, Neumaier};

pub use gquantity::{banded_bump, fit_g_constants, g_branch_envelope, g_quantity, g_ratio_scan, DyadicPair, GBranch, GConstants, GIntegrator};
pub use scan::{scaled_band_state, weighted_ratio_scan};
pub use time::fractional_time_norm;
pub use tnu::{linearized_ball_norm, order_maxima, radial_maximal_norm, t_nu_apply, TnuOperator, TnuSweep};

/// The weight `(1 + |x|)^{-β}` with `β > 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightSpec {
    beta: f64,
}

impl WeightSpec {
    pub fn new(beta: f64) -> Result<Self> {
        ensure!(beta > 1.0 && beta.is_finite(), Domain, "the weight exponent must exceed 1, got {beta}");
        Ok(Self { beta })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn at(&self, r: f64) -> f64 {
        (1.0 + r).powf(-self.beta)
    }
}

/// How the supremum in time was sampled.
#[derive(Debug, Clone, PartialEq)]
pub enum TimeSample {
    Ladder(Vec<f64>),
    /// One time per radial node.
    Linearized(Vec<f64>),
}

/// `sup_t |u(r_i ω_q, t)|` at every radial node and, for non-radial data,
/// every direction of an angular grid (`values[i * directions + q]`).
#[derive(Debug, Clone, PartialEq)]
pub struct MaximalProfile {
    pub values: Vec<f64>,
    pub directions: usize,
    /// Angular quadrature weights; `None` for radial data, whose profile is
    /// the same in every direction.
    pub angular_weights: Option<Vec<f64>>,
    pub time_set: TimeSample,
    pub grid_id: u64,
}

impl MaximalProfile {
    pub fn linearized(&self) -> bool {
        matches!(self.time_set, TimeSample::Linearized(_))
    }
}

/// The geometric ladder `t_max · 2^{-m}`, `m = 0..=levels`, plus `t = 0`,
/// in increasing order.
pub fn geometric_ladder(t_max: f64, levels: u32) -> Vec<f64> {
    let mut t: Vec<f64> = (0..=levels).rev().map(|m| t_max * 2f64.powi(-(m as i32))).collect();
    t.insert(0, 0.0);
    t
}

fn check_times(times: &[f64]) -> Result<Vec<f64>> {
    ensure!(!times.is_empty(), Domain, "the time set is empty");
    let mut t = times.to_vec();
    t.sort_by(f64::total_cmp);
    Ok(t)
}

/// Radial `u*` for a state with only the `k = 0` mode.
pub fn maximal_function(state: &SpectralState, times: &[f64]) -> Result<MaximalProfile> {
    ensure!(
        state.modes.len() == 1 && state.modes[0].k == 0,
        Domain,
        "the radial maximal function needs a state made of the k = 0 mode only"
    );
    let t = check_times(times)?;
    let c = sphere_area(state.setup.n()).sqrt();
    let q = state.grids.physical.len();
    let snaps = evolve_batch(state, &t)?;
    let mut values = vec![0.0f64; q];
    for s in &snaps {
        for (v, u) in values.iter_mut().zip(&s.modes[0].values) {
            *v = v.max((u / c).norm());
        }
    }
    Ok(MaximalProfile {
        values,
        directions: 1,
        angular_weights: None,
        time_set: TimeSample::Ladder(t),
        grid_id: state.grids.physical.id(),
    })
}

/// `|u(r_i, t_i)|` for one time per radial node, the Carleson
/// linearization of the radial supremum.
pub fn linearized_profile(state: &SpectralState, t_of_r: &[f64]) -> Result<MaximalProfile> {
    ensure!(
        state.modes.len() == 1 && state.modes[0].k == 0,
        Domain,
        "the linearized profile needs a state made of the k = 0 mode only"
    );
    let grids = &state.grids;
    ensure!(
        t_of_r.len() == grids.physical.len(),
        GridMismatch,
        "{} times for {} radial nodes",
        t_of_r.len(),
        grids.physical.len()
    );
    ensure!(
        t_of_r.iter().all(|t| t.is_finite() && t.abs() <= state.t_max),
        Domain,
        "times must be finite with |t| <= {}",
        state.t_max
    );
    let n = state.setup.n();
    let kern = kernel(n, state.setup.nu(0), &grids.spectral, &grids.physical);
    let b: Vec<Complex64> = state.modes[0].values.iter().zip(kern.in_measure()).map(|(v, m)| v * m).collect();
    let rho = grids.spectral.nodes();
    let c = sphere_area(n).sqrt();
    let values = t_of_r
        .par_iter()
        .enumerate()
        .map(|(i, t)| {
            let mut acc = ComplexSum::default();
            for ((k, v), p) in kern.core_row(i).iter().zip(&b).zip(rho) {
                acc.add(v * Complex64::from_polar(*k, t * p * p));
            }
            (acc.sum() / c).norm()
        })
        .collect();
    Ok(MaximalProfile {
        values,
        directions: 1,
        angular_weights: None,
        time_set: TimeSample::Linearized(t_of_r.to_vec()),
        grid_id: grids.physical.id(),
    })
}

/// `u*` sampled on the radial grid times the angular grid of `basis`.
pub fn maximal_function_on(state: &SpectralState, times: &[f64], basis: &HarmonicBasis) -> Result<MaximalProfile> {
    let t = check_times(times)?;
    let p = basis.grid.len();
    let q = state.grids.physical.len();
    let fields = t
        .par_iter()
        .map(|&ti| crate::propagator::evolve(state, ti)?.field(basis))
        .collect::<Result<Vec<_>>>()?;
    let mut values = vec![0.0f64; q * p];
    for f in &fields {
        for (i, slice) in f.iter().enumerate() {
            for (j, u) in slice.iter().enumerate() {
                let v = &mut values[i * p + j];
                *v = v.max(u.norm());
            }
        }
    }
    Ok(MaximalProfile {
        values,
        directions: p,
        angular_weights: Some(basis.grid.weights.clone()),
        time_set: TimeSample::Ladder(t),
        grid_id: state.grids.physical.id(),
    })
}

/// `∫ |u*(x)|² (1+|x|)^{-β} dx` over the grid.
pub fn weighted_l2(profile: &MaximalProfile, w: WeightSpec, grid: &RadialGrid, n: usize) -> Result<f64> {
    ensure!(
        profile.grid_id == grid.id() && profile.values.len() == grid.len() * profile.directions,
        GridMismatch,
        "profile is not aligned with the grid"
    );
    let m = grid.measure(n);
    let area = sphere_area(n);
    let mut acc = Neumaier::default();
    for (i, (mi, r)) in m.iter().zip(grid.nodes()).enumerate() {
        let radial = mi * w.at(*r);
        match &profile.angular_weights {
            None => acc.add(area * radial * profile.values[i].powi(2)),
            Some(aw) => {
                for (j, wj) in aw.iter().enumerate() {
                    acc.add(radial * wj * profile.values[i * profile.directions + j].powi(2));
                }
            }
        }
    }
    Ok(acc.sum())
}
