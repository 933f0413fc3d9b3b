//! The dyadic energy `∫_R^{2R} |J_k(r)|² dr`.

use std::f64::consts::TAU;

use rayon::prelude::*;

use super::bessel::j;
use crate::error::{ensure, Result};
use crate::quadrature::{composite_uniform, Neumaier};

/// Minimum number of quadrature points per oscillation period `2π`.
pub const MIN_POINTS_PER_PERIOD: f64 = 8.0;

const PANEL_ORDER: usize = 16;

/// `∫_R^{2R} |J_k(r)|² dr` by composite 16-point Gauss–Legendre with
/// `quad_points` nodes in total (rounded up to whole panels).
///
/// ```
/// let v = invsq::specfun::dyadic_l2(0.0, 8.0, 1024).unwrap();
/// assert!((v - 0.192564619021886).abs() < 1e-12);
/// ```
pub fn dyadic_l2(k: f64, r: f64, quad_points: usize) -> Result<f64> {
    ensure!(k >= 0.0 && k.is_finite(), Domain, "order must be >= 0, got {k}");
    ensure!(r >= 8.0 && r.is_finite(), Domain, "R must be >= 8, got {r}");
    ensure!(quad_points >= 64, Domain, "need at least 64 quadrature points, got {quad_points}");
    let periods = r / TAU;
    ensure!(
        quad_points as f64 >= MIN_POINTS_PER_PERIOD * periods,
        Resolution,
        "{quad_points} points cannot resolve {periods:.0} periods on [{r}, {}]",
        2.0 * r
    );
    let panels = quad_points.div_ceil(PANEL_ORDER);
    // Panels are summed in parallel chunks, then combined in a fixed order.
    let chunk = 4096;
    let partial: Vec<f64> = (0..panels.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let p0 = c * chunk;
            let p1 = ((c + 1) * chunk).min(panels);
            let a = r + r * p0 as f64 / panels as f64;
            let b = r + r * p1 as f64 / panels as f64;
            let (x, w) = composite_uniform(a, b, p1 - p0, PANEL_ORDER);
            let mut acc = Neumaier::default();
            for (xi, wi) in x.iter().zip(&w) {
                let v = j(k, *xi);
                acc.add(wi * v * v);
            }
            acc.sum()
        })
        .collect();
    let mut total = Neumaier::default();
    partial.into_iter().for_each(|p| total.add(p));
    Ok(total.sum())
}

/// Quadrature size giving `points_per_period` nodes per `2π` on `[R, 2R]`,
/// never below the 64-point minimum.
pub fn dyadic_quad_points(r: f64, points_per_period: f64) -> usize {
    ((points_per_period * r / TAU).ceil() as usize).max(64)
}
