use num_complex::Complex64;

use super::sphere::{HarmonicBasis, HarmonicIndex};
use crate::error::{ensure, Error, Result};
use crate::hankel::{ModeField, RadialGrid, Space};
use crate::quadrature::Neumaier;

/// Relative tail energy above which `analyze` reports a degree overflow.
pub const DEGREE_TAIL_TOLERANCE: f64 = 1e-8;

/// Coefficients of one angular slice plus the energy the basis missed.
pub fn analyze_slice(basis: &HarmonicBasis, samples: &[Complex64]) -> Result<(Vec<Complex64>, f64)> {
    ensure!(
        samples.len() == basis.grid.len(),
        GridMismatch,
        "{} samples on an angular grid of {} points",
        samples.len(),
        basis.grid.len()
    );
    let coeffs = basis.project(samples);
    let total = basis.grid.norm_sqr(samples);
    let mut kept = Neumaier::default();
    coeffs.iter().for_each(|c| kept.add(c.norm_sqr()));
    Ok((coeffs, (total - kept.sum()).max(0.0)))
}

/// Expand samples `g(r_i ω_q)` (one angular slice per radial node) into
/// radial coefficient fields `a_{k,ℓ}(r)`, one per basis function.
pub fn analyze(basis: &HarmonicBasis, samples: &[Vec<Complex64>], grid: &RadialGrid) -> Result<Vec<ModeField>> {
    ensure!(
        samples.len() == grid.len(),
        GridMismatch,
        "{} radial slices for a grid of {} nodes",
        samples.len(),
        grid.len()
    );
    let measure = grid.measure(basis.n());
    let mut fields: Vec<ModeField> = basis
        .indices
        .iter()
        .map(|idx| ModeField::zeros(idx.k, idx.ell, Space::Physical, grid))
        .collect();
    let mut tail = Neumaier::default();
    let mut total = Neumaier::default();
    for (i, slice) in samples.iter().enumerate() {
        let (coeffs, missed) = analyze_slice(basis, slice)?;
        tail.add(missed * measure[i]);
        total.add(basis.grid.norm_sqr(slice) * measure[i]);
        for (f, c) in fields.iter_mut().zip(coeffs) {
            f.values[i] = c;
        }
    }
    let (tail, total) = (tail.sum(), total.sum());
    if total > 0.0 && tail > DEGREE_TAIL_TOLERANCE * total {
        return Err(Error::DegreeOverflow(format!(
            "{:.2e} of the energy lies above degree {}",
            tail / total,
            basis.k_max
        )));
    }
    Ok(fields)
}

/// Samples of `Σ a_{k,ℓ}(r) Y_{k,ℓ}(ω)` at every radial node and grid
/// direction. Missing modes count as zero; modes above the basis degree are
/// rejected.
pub fn synthesize(basis: &HarmonicBasis, modes: &[ModeField]) -> Result<Vec<Vec<Complex64>>> {
    let Some(first) = modes.first() else {
        return Ok(Vec::new());
    };
    let q = first.values.len();
    let mut rows = Vec::with_capacity(modes.len());
    for m in modes {
        ensure!(m.values.len() == q && m.grid_id == first.grid_id, GridMismatch, "modes live on different grids");
        let row = basis
            .position(HarmonicIndex { k: m.k, ell: m.ell })
            .ok_or_else(|| Error::DegreeOverflow(format!("mode ({}, {}) is not in the basis up to degree {}", m.k, m.ell, basis.k_max)))?;
        rows.push(row);
    }
    Ok((0..q)
        .map(|i| {
            let mut coeffs = vec![Complex64::default(); basis.indices.len()];
            for (m, &row) in modes.iter().zip(&rows) {
                coeffs[row] += m.values[i];
            }
            basis.expand(&coeffs)
        })
        .collect())
}

/// `(1 + k(k+n-2))^{s/2}`, the symbol of `(1-Δ_θ)^{s/2}` on degree `k`.
pub fn angular_multiplier(n: usize, k: usize, s: f64) -> f64 {
    (1.0 + HarmonicIndex { k, ell: 1 }.eigenvalue(n)).powf(0.5 * s)
}

/// Apply `(1-Δ_θ)^{s/2}` to a family of mode fields.
pub fn angular_fractional_power(n: usize, s: f64, modes: &[ModeField]) -> Result<Vec<ModeField>> {
    ensure!(s >= 0.0 && s.is_finite(), Domain, "angular power needs s >= 0, got {s}");
    Ok(modes
        .iter()
        .map(|m| {
            let c = angular_multiplier(n, m.k, s);
            ModeField { values: m.values.iter().map(|v| v * c).collect(), ..m.clone() }
        })
        .collect())
}
