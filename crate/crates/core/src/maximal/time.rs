use num_complex::Complex64;
use rustfft::FftPlanner;

use super::WeightSpec;
use crate::error::{ensure, Result};
use crate::propagator::{evolve_batch, SpectralState};
use crate::quadrature::Neumaier;

/// `∫∫ |∂_t^α u(x,t)|² (1+|x|)^{-β} dt dx` over a time window, with the
/// fractional derivative taken as the Fourier multiplier `|τ|^α` on `n_t`
/// uniform samples of the window (treated as one period).
///
/// Angular integration uses orthonormality, so the result is a sum over
/// modes. A warning is logged when the largest frequency `ρ²` carrying
/// spectral mass exceeds the Nyquist rate of the time grid.
pub fn fractional_time_norm(state: &SpectralState, alpha: f64, w: WeightSpec, window: (f64, f64), n_t: usize) -> Result<f64> {
    ensure!(alpha >= 0.0 && alpha.is_finite(), Domain, "alpha must be nonnegative, got {alpha}");
    ensure!(n_t >= 2 && n_t.is_power_of_two(), Domain, "n_t must be a power of two, got {n_t}");
    let (t1, t2) = window;
    ensure!(t2 > t1, Domain, "empty time window ({t1}, {t2})");
    let dt = (t2 - t1) / n_t as f64;
    let nyquist = std::f64::consts::PI / dt;
    let spec = &state.grids.spectral;
    let total = state.modes.iter().flat_map(|m| m.values.iter()).map(|v| v.norm()).fold(0.0, f64::max);
    let resolved = state
        .modes
        .iter()
        .flat_map(|m| m.values.iter().zip(spec.nodes()))
        .filter(|(v, _)| v.norm() > 1e-8 * total)
        .map(|(_, r)| r * r)
        .fold(0.0, f64::max);
    if resolved > nyquist {
        log::warn!("spectral content up to rho^2 = {resolved:.3e} exceeds the time-grid Nyquist rate {nyquist:.3e}; aliasing");
    }

    let times: Vec<f64> = (0..n_t).map(|i| t1 + i as f64 * dt).collect();
    let snaps = evolve_batch(state, &times)?;
    let grid = &state.grids.physical;
    let measure = grid.measure(state.setup.n());
    let fft = FftPlanner::new().plan_fft_forward(n_t);
    let ifft = FftPlanner::new().plan_fft_inverse(n_t);
    let multiplier: Vec<f64> = (0..n_t)
        .map(|k| {
            let signed = if k <= n_t / 2 { k as f64 } else { k as f64 - n_t as f64 };
            (std::f64::consts::TAU * signed / (n_t as f64 * dt)).abs().powf(alpha)
        })
        .collect();
    let mut acc = Neumaier::default();
    let mut series = vec![Complex64::default(); n_t];
    for mode in 0..state.modes.len() {
        for (i, (mi, r)) in measure.iter().zip(grid.nodes()).enumerate() {
            for (s, snap) in series.iter_mut().zip(&snaps) {
                *s = snap.modes[mode].values[i];
            }
            fft.process(&mut series);
            for (s, m) in series.iter_mut().zip(&multiplier) {
                *s *= *m / n_t as f64;
            }
            ifft.process(&mut series);
            let e: f64 = series.iter().map(|z| z.norm_sqr()).sum();
            acc.add(e * dt * mi * w.at(*r));
        }
    }
    Ok(acc.sum())
}
