//! Dyadic frequency localisation on a fixed harmonic mode.
//!
//! The bump is `β(t) = √φ(log₂ t)` with
//! `φ(u) = S(2u + 3/2) - S(2u - 1/2)` and the smooth step
//! `S(x) = e^{-1/x} / (e^{-1/x} + e^{-1/(1-x)})` on `(0, 1)`.
//! `φ` vanishes for `|u| ≥ 3/4`, equals one for `|u| ≤ 1/4`, and its integer
//! translates telescope to one, so `Σ_j β(2^{-j} t)² = 1` for every `t > 0`.
//! The support `(2^{-3/4}, 2^{3/4})` sits inside `[1/2, 2]`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{ensure, Result};
use crate::hankel::{ensure_space, kernel, GridPair, ModeField, PotentialSetup, RadialGrid, Space};
use crate::quadrature::{composite_uniform, Neumaier};
use crate::specfun::{weber_schafheitlin, BesselOrder};

/// Band exponent: frequencies of size about `2^j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicIndex(pub i32);

impl DyadicIndex {
    pub fn scale(self) -> f64 {
        2f64.powi(self.0)
    }

    /// Open support `(2^{j-3/4}, 2^{j+3/4})` of `β_j`.
    pub fn support(self) -> (f64, f64) {
        let s = self.scale();
        (s * 2f64.powf(-0.75), s * 2f64.powf(0.75))
    }
}

pub(crate) fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / x).exp();
        let b = (-1.0 / (1.0 - x)).exp();
        a / (a + b)
    }
}

/// The dyadic bump `β(t)`, supported in `(2^{-3/4}, 2^{3/4})`.
pub fn beta(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let u = t.log2();
    (smooth_step(2.0 * u + 1.5) - smooth_step(2.0 * u - 0.5)).max(0.0).sqrt()
}

/// `β_j(ρ) = β(2^{-j} ρ)`.
pub fn beta_j(j: DyadicIndex, rho: f64) -> f64 {
    beta(rho / j.scale())
}

/// The band cutoff of the Sobolev sum: the indicator of `[1/2, 1)`. Its
/// squared dilates `χ(ρ/M)²` over dyadic `M` sum to exactly one.
pub fn chi(t: f64) -> f64 {
    if (0.5..1.0).contains(&t) {
        1.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProjectorKind {
    /// `P_j`, built on the free order `μ(k)`.
    FourierSide,
    /// `P̃_j`, built on the perturbed order `ν(k)`.
    HankelSide,
}

impl ProjectorKind {
    pub fn order(self, setup: &PotentialSetup, k: usize) -> f64 {
        match self {
            ProjectorKind::FourierSide => setup.mu(k),
            ProjectorKind::HankelSide => setup.nu(k),
        }
    }
}

fn check_band(j: DyadicIndex, spectral: &RadialGrid) -> Result<()> {
    let lo = 0.5 * j.scale();
    let hi = 2.0 * j.scale();
    ensure!(
        hi <= spectral.r_max() && lo >= spectral.nodes()[0],
        BandOutsideGrid,
        "band [{lo}, {hi}] for j = {} is not inside the spectral grid (0, {}]",
        j.0,
        spectral.r_max()
    );
    Ok(())
}

/// `H_σ[β_j · H_σ f]` with `σ = μ(k)` or `ν(k)` according to `kind`.
pub fn projector(setup: &PotentialSetup, kind: ProjectorKind, j: DyadicIndex, f: &ModeField, grids: &GridPair) -> Result<ModeField> {
    ensure_space(f, Space::Physical)?;
    check_band(j, &grids.spectral)?;
    let order = BesselOrder::new(kind.order(setup, f.k))?;
    let mut g = grids.transform(setup, order, f)?;
    for (v, rho) in g.values.iter_mut().zip(grids.spectral.nodes()) {
        *v *= beta_j(j, *rho);
    }
    grids.transform(setup, order, &g)
}

/// Gauss–Legendre nodes and `√(w ρ^{n-1}) β_j(ρ)` on the support of `β_j`.
fn band_nodes(j: DyadicIndex, n: usize) -> (Vec<f64>, Vec<f64>) {
    let (lo, hi) = j.support();
    let (x, w) = composite_uniform(lo, hi, 6, 16);
    let scaled = x
        .iter()
        .zip(&w)
        .map(|(r, w)| (w * r.powi(n as i32 - 1)).sqrt() * beta_j(j, *r))
        .collect();
    (x, scaled)
}

fn largest_singular_value(m: DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().iter().cloned().fold(0.0, f64::max)
}

/// `‖β_{j_out} H_{σ_out} H_{σ_in} β_{j_in}‖` on `L²(ρ^{n-1} dρ)`.
///
/// When the two orders agree the composition is the identity and the norm
/// is `sup β_{j_out} β_{j_in}`. Bands two or more octaves apart have disjoint
/// supports, and there the composed kernel is taken in closed form from the
/// Weber–Schafheitlin integral, which is free of the truncation error that a
/// finite radial grid leaves in the far off-diagonal blocks. Neighbouring
/// bands use the unitary part of the discrete transforms on `grids`.
pub fn composed_band_norm(
    n: usize,
    sigma_out: f64,
    j_out: DyadicIndex,
    sigma_in: f64,
    j_in: DyadicIndex,
    grids: &GridPair,
) -> Result<f64> {
    if sigma_out == sigma_in {
        let (lo_o, hi_o) = j_out.support();
        let (lo_i, hi_i) = j_in.support();
        if hi_o <= lo_i || hi_i <= lo_o {
            return Ok(0.0);
        }
        return Ok(grids
            .spectral
            .nodes()
            .iter()
            .map(|&r| beta_j(j_out, r) * beta_j(j_in, r))
            .fold(0.0, f64::max));
    }
    if (j_out.0 - j_in.0).abs() >= 2 {
        closed_form_norm(n, sigma_out, j_out, sigma_in, j_in)
    } else {
        check_band(j_out, &grids.spectral)?;
        check_band(j_in, &grids.spectral)?;
        grid_norm(n, sigma_out, j_out, sigma_in, j_in, grids)
    }
}

fn closed_form_norm(n: usize, sigma_out: f64, j_out: DyadicIndex, sigma_in: f64, j_in: DyadicIndex) -> Result<f64> {
    let alpha = (n as f64 - 2.0) / 2.0;
    let (xo, so) = band_nodes(j_out, n);
    let (xi, si) = band_nodes(j_in, n);
    let rows: Vec<Vec<f64>> = xo
        .par_iter()
        .zip(&so)
        .map(|(&r, &sr)| {
            xi.iter()
                .zip(&si)
                .map(|(&p, &sp)| Ok(sr * sp * (r * p).powf(-alpha) * weber_schafheitlin(sigma_out, r, sigma_in, p)?))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    Ok(largest_singular_value(DMatrix::from_fn(xo.len(), xi.len(), |a, b| rows[a][b])))
}

type PolarKey = (usize, u64, u64, u64);

/// Unitary part of the discrete transform `√m_out C √m_in` between the two
/// grids, in coordinates `v_i = √m_i f_i`.
///
/// The raw quadrature matrix is only approximately unitary: spectral vectors
/// that oscillate on the node scale stand for physical content beyond
/// `R_max`, and there its singular values drop below one. Replacing it by its
/// polar factor keeps the resolved action and makes every composition a
/// contraction, as in the continuum.
fn polar_factor(n: usize, sigma: f64, grids: &GridPair) -> Result<Arc<DMatrix<f64>>> {
    static CACHE: OnceLock<Mutex<HashMap<PolarKey, Arc<DMatrix<f64>>>>> = OnceLock::new();
    let (phys, spec) = (&grids.physical, &grids.spectral);
    ensure!(
        phys.len() == spec.len(),
        GridMismatch,
        "band norms need physical and spectral grids of equal size, got {} and {}",
        phys.len(),
        spec.len()
    );
    let key = (n, sigma.to_bits(), phys.id(), spec.id());
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(u) = cache.lock().unwrap().get(&key) {
        return Ok(Arc::clone(u));
    }
    let kern = kernel(n, sigma, phys, spec);
    let sp: Vec<f64> = spec.measure(n).iter().map(|m| m.sqrt()).collect();
    let sq: Vec<f64> = phys.measure(n).iter().map(|m| m.sqrt()).collect();
    let q = spec.len();
    let s = DMatrix::from_fn(q, q, |i, c| sp[i] * kern.core(i, c) * sq[c]);
    let u = if phys.id() == spec.id() {
        let s = 0.5 * (&s + s.transpose());
        let eig = s.symmetric_eigen();
        let signs = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| if l < 0.0 { -1.0 } else { 1.0 }));
        &eig.eigenvectors * signs * eig.eigenvectors.transpose()
    } else {
        let svd = s.svd(true, true);
        svd.u.expect("left vectors requested") * svd.v_t.expect("right vectors requested")
    };
    let u = Arc::new(u);
    let mut c = cache.lock().unwrap();
    if c.len() > 16 {
        c.clear();
    }
    c.insert(key, Arc::clone(&u));
    Ok(u)
}

fn grid_norm(n: usize, sigma_out: f64, j_out: DyadicIndex, sigma_in: f64, j_in: DyadicIndex, grids: &GridPair) -> Result<f64> {
    let u_out = polar_factor(n, sigma_out, grids)?;
    let u_in = polar_factor(n, sigma_in, grids)?;
    let rows_of = |j: DyadicIndex| -> Vec<(usize, f64)> {
        grids
            .spectral
            .nodes()
            .iter()
            .enumerate()
            .map(|(i, &r)| (i, beta_j(j, r)))
            .filter(|p| p.1 != 0.0)
            .collect()
    };
    let out_rows = rows_of(j_out);
    let in_rows = rows_of(j_in);
    let q = grids.physical.len();
    // u_in maps physical to spectral; its transpose maps back.
    let x = DMatrix::from_fn(out_rows.len(), q, |a, c| out_rows[a].1 * u_out[(out_rows[a].0, c)]);
    let y = DMatrix::from_fn(q, in_rows.len(), |c, b| u_in[(in_rows[b].0, c)] * in_rows[b].1);
    Ok(largest_singular_value(x * y))
}

/// `‖M_{jj'}‖ = ‖P_j P̃_{j'}‖` on the degree-`k` subspace.
pub fn almost_orthogonality_norm(setup: &PotentialSetup, k: usize, j: DyadicIndex, jp: DyadicIndex, grids: &GridPair) -> Result<f64> {
    composed_band_norm(setup.n(), setup.mu(k), j, setup.nu(k), jp, grids)
}

/// `‖N_{j'j}‖ = ‖P̃_{j'} P_j‖`, the adjoint composition.
pub fn adjoint_orthogonality_norm(setup: &PotentialSetup, k: usize, j: DyadicIndex, jp: DyadicIndex, grids: &GridPair) -> Result<f64> {
    composed_band_norm(setup.n(), setup.nu(k), jp, setup.mu(k), j, grids)
}

/// Dyadic `M` with `χ(ρ/M) = 1`, that is `M = 2^{⌊log₂ρ⌋+1}`.
pub fn band_of(rho: f64) -> f64 {
    2f64.powi(rho.log2().floor() as i32 + 1)
}

/// Fraction of spectral energy that no complete dyadic band covers.
fn unresolved_fraction(grid: &RadialGrid, n: usize, values: &[Complex64]) -> (f64, f64) {
    let m = grid.measure(n);
    let mut lost = Neumaier::default();
    let mut total = Neumaier::default();
    for ((v, w), r) in values.iter().zip(&m).zip(grid.nodes()) {
        let e = v.norm_sqr() * w;
        total.add(e);
        if band_of(*r) > grid.r_max() {
            lost.add(e);
        }
    }
    (lost.sum(), total.sum())
}

/// Relative energy outside complete dyadic bands that triggers an error.
pub const SPECTRAL_RANGE_TOLERANCE: f64 = 1e-6;

fn dyadic_sobolev(setup: &PotentialSetup, modes: &[ModeField], s: f64, sp: f64, grids: &GridPair, free: bool) -> Result<f64> {
    ensure!(s >= 0.0 && s < setup.critical_exponent(), Domain, "s = {s} outside [0, {})", setup.critical_exponent());
    ensure!(sp >= 0.0, Domain, "s' must be nonnegative, got {sp}");
    let n = setup.n();
    let spec = &grids.spectral;
    let m = spec.measure(n);
    let mut acc = Neumaier::default();
    let mut lost = 0.0;
    let mut total = 0.0;
    for f in modes {
        let order = if free { setup.mu(f.k) } else { setup.nu(f.k) };
        let b = match f.space {
            Space::Physical => grids.transform(setup, BesselOrder::new(order)?, f)?,
            Space::Spectral => {
                f.check_grid(spec)?;
                f.clone()
            }
        };
        let (l, t) = unresolved_fraction(spec, n, &b.values);
        lost += l;
        total += t;
        let ang = (1.0 + f.k as f64).powf(2.0 * sp);
        for ((v, w), r) in b.values.iter().zip(&m).zip(spec.nodes()) {
            let weight = if free { r.powf(2.0 * s) } else { band_of(*r).powf(2.0 * s) };
            acc.add(ang * weight * v.norm_sqr() * w);
        }
    }
    ensure!(
        total == 0.0 || lost <= SPECTRAL_RANGE_TOLERANCE * total,
        SpectralRange,
        "{:.2e} of the spectral energy lies above the last complete band below {}",
        lost / total,
        spec.r_max()
    );
    Ok(acc.sum().sqrt())
}

/// `(Σ_{k,ℓ} Σ_M M^{2s} (1+k)^{2s'} ‖b_{k,ℓ} χ(ρ/M) ρ^{(n-1)/2}‖²)^{1/2}` with
/// `b_{k,ℓ} = H_{ν(k)} a_{k,ℓ}` and `M` dyadic. Physical modes are
/// transformed first; spectral modes are taken as the `b_{k,ℓ}` directly.
pub fn sobolev_norm_hankel(setup: &PotentialSetup, modes: &[ModeField], s: f64, sp: f64, grids: &GridPair) -> Result<f64> {
    dyadic_sobolev(setup, modes, s, sp, grids, false)
}

/// The Fourier-side reference
/// `(Σ_{k,ℓ} (1+k)^{2s'} ∫ ρ^{2s} |H_{μ(k)} a_{k,ℓ}|² ρ^{n-1} dρ)^{1/2}`.
pub fn sobolev_norm_fourier(setup: &PotentialSetup, modes: &[ModeField], s: f64, sp: f64, grids: &GridPair) -> Result<f64> {
    ensure!(modes.iter().all(|m| m.space == Space::Physical), Domain, "the Fourier-side norm takes physical modes");
    dyadic_sobolev(setup, modes, s, sp, grids, true)
}
