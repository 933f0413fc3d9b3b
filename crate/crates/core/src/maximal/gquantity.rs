use statrs::function::gamma::ln_gamma;

use super::WeightSpec;
use crate::error::{ensure, Result};
use crate::hankel::{ensure_space, ModeField, PotentialSetup, RadialGrid, Space};
use crate::harmonics::chi;
use crate::quadrature::{composite_uniform, Neumaier};
use crate::specfun::j;

/// A radius scale `R` and a frequency scale `M`, both powers of two.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DyadicPair {
    pub r: f64,
    pub m: f64,
}

impl DyadicPair {
    pub fn new(r: f64, m: f64) -> Result<Self> {
        let dyadic = |x: f64| x > 0.0 && x.log2().fract() == 0.0;
        ensure!(dyadic(r) && dyadic(m), Domain, "R = {r} and M = {m} must be powers of two");
        Ok(Self { r, m })
    }
}

/// The `r`-integrals of `G` for one `(k, R)` and a fixed set of `ρ` nodes
/// in the band `[1/2, 1)`, reusable across `M`, `β` and data.
#[derive(Debug, Clone)]
pub struct GIntegrator {
    pub nu: f64,
    pub r_scale: f64,
    rho: Vec<f64>,
    r: Vec<f64>,
    wr: Vec<f64>,
    /// `((r ρ)^{-(n-2)/2} J_ν(r ρ))²`, row per `r` node.
    table: Vec<f64>,
}

impl GIntegrator {
    pub fn new(setup: &PotentialSetup, k: usize, r_scale: f64, rho: &[f64]) -> Self {
        let nu = setup.nu(k);
        let alpha = setup.alpha();
        let panels = (r_scale / 2.0).ceil().max(1.0) as usize;
        let (r, wr) = composite_uniform(r_scale, 2.0 * r_scale, panels, 16);
        let mut table = Vec::with_capacity(r.len() * rho.len());
        for &x in &r {
            for &p in rho {
                let s = x * p;
                table.push((s.powf(-alpha) * j(nu, s)).powi(2));
            }
        }
        Self { nu, r_scale, rho: rho.to_vec(), r, wr, table }
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    /// `Σ_q w_q (1 + r_q/M)^{-β} Σ_i table[q][i] c_i` for per-node masses `c_i`.
    pub fn value(&self, m_scale: f64, w: WeightSpec, masses: &[f64]) -> f64 {
        let p = self.rho.len();
        let mut acc = Neumaier::default();
        for (q, (x, wq)) in self.r.iter().zip(&self.wr).enumerate() {
            let row = &self.table[q * p..(q + 1) * p];
            let inner: f64 = row.iter().zip(masses).map(|(a, b)| a * b).sum();
            acc.add(wq * (1.0 + x / m_scale).powf(-w.beta()) * inner);
        }
        acc.sum()
    }
}

/// Nodes `σ` of the spectral grid in the band `[M/2, M)` with the masses
/// `w_σ |b(σ)|² / M` of the rescaled data `b(Mρ)χ(ρ)`, and the band norm
/// `‖b χ(ρ/M) ρ^{(n-1)/2}‖²`.
pub(crate) fn band_masses(b0: &ModeField, grid: &RadialGrid, m_scale: f64, n: usize) -> (Vec<f64>, Vec<f64>, f64) {
    let mut rho = Vec::new();
    let mut mass = Vec::new();
    let mut norm = Neumaier::default();
    for ((v, s), w) in b0.values.iter().zip(grid.nodes()).zip(grid.weights()) {
        if chi(s / m_scale) != 0.0 {
            rho.push(s / m_scale);
            mass.push(w * v.norm_sqr() / m_scale);
            norm.add(w * s.powi(n as i32 - 1) * v.norm_sqr());
        }
    }
    (rho, mass, norm.sum())
}

/// `G(R, M) = ∫_R^{2R} ∫_0^∞ |(rρ)^{-(n-2)/2} J_ν(rρ) b⁰(Mρ) χ(ρ)|² dρ dr / (1 + r/M)^β`
/// for the spectral coefficient `b⁰` of degree `k`.
pub fn g_quantity(setup: &PotentialSetup, k: usize, b0: &ModeField, grid: &RadialGrid, pair: DyadicPair, w: WeightSpec) -> Result<f64> {
    ensure_space(b0, Space::Spectral)?;
    b0.check_grid(grid)?;
    ensure!(
        pair.m <= grid.r_max() && 0.5 * pair.m >= grid.nodes()[0],
        GridRange,
        "band [{}, {}) is outside the spectral grid (0, {}]",
        0.5 * pair.m,
        pair.m,
        grid.r_max()
    );
    let (rho, mass, _) = band_masses(b0, grid, pair.m, setup.n());
    Ok(GIntegrator::new(setup, k, pair.r, &rho).value(pair.m, w, &mass))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GBranch {
    /// `R ≤ 1/2`, where `rρ ≤ 1` and the small-argument bound applies.
    Small,
    /// `R ≥ 2`, where `rρ ≥ 1` and the dyadic `L²` bound applies.
    Large,
}

/// The right side of the two-branch bound for `G` without its constant:
/// `R^{2ν-n+3} M^{-n} min{1, (M/R)^β} ‖b χ ρ^{(n-1)/2}‖² / (2^ν Γ(ν+½) Γ(½))²`
/// for small `R`, and `min{1, (M/R)^β} R^{-(n-2)} M^{-n} ‖b χ ρ^{(n-1)/2}‖²`
/// for large `R`. Radii strictly between `1/2` and `2` belong to neither
/// branch.
pub fn g_branch_envelope(setup: &PotentialSetup, k: usize, pair: DyadicPair, w: WeightSpec, band_norm: f64) -> Option<(GBranch, f64)> {
    let n = setup.n() as f64;
    let nu = setup.nu(k);
    let (r, m) = (pair.r, pair.m);
    let decay = (m / r).powf(w.beta()).min(1.0);
    if r <= 0.5 {
        let log_gamma = nu * 2f64.ln() + ln_gamma(nu + 0.5) + ln_gamma(0.5);
        let env = r.powf(2.0 * nu - n + 3.0) * m.powf(-n) * decay * (-2.0 * log_gamma).exp();
        Some((GBranch::Small, env * band_norm))
    } else if r >= 2.0 {
        Some((GBranch::Large, decay * r.powf(-(n - 2.0)) * m.powf(-n) * band_norm))
    } else {
        None
    }
}

/// Per-branch constants of the two-branch bound for `G`, fitted as the
/// largest ratio `G / envelope` over a lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct GConstants {
    pub branch: GBranch,
    /// `(k, C_k)` with `C_k` the largest ratio at degree `k`.
    pub per_k: Vec<(usize, f64)>,
    /// `max_k C_k`.
    pub constant: f64,
    /// `max_k C_k / min_k C_k`.
    pub spread: f64,
}

/// Spectral data whose restriction to every dyadic band `[M/2, M)` is a
/// Gaussian bump `exp(-((σ/M - centre)/width)²)`, so that every band sees
/// the same rescaled profile.
pub fn banded_bump(grid: &RadialGrid, k: usize, centre: f64, width: f64) -> ModeField {
    ModeField::from_real(k, 1, Space::Spectral, grid, |s| {
        let x = s / crate::harmonics::band_of(s);
        (-((x - centre) / width).powi(2)).exp()
    })
}

/// `G(R, M)` against its branch envelope for every degree, radius and band
/// scale and every data profile. Columns `k`, `R`, `M`, `profile`,
/// `branch` (0 small, 1 large), `g`, `ratio`. Radii strictly between `1/2`
/// and `2` are skipped.
pub fn g_ratio_scan(
    setup: &PotentialSetup,
    ks: &[usize],
    radii: &[f64],
    scales: &[f64],
    w: WeightSpec,
    grid: &RadialGrid,
    profiles: &[ModeField],
) -> Result<crate::report::ExperimentReport> {
    ensure!(!profiles.is_empty(), InvalidConfig, "no data profiles");
    let mut report = crate::report::ExperimentReport::new(["k", "R", "M", "profile", "branch", "g", "ratio"]);
    report.metadata.insert("beta".into(), format!("{:?}", w.beta()));
    let pairs: Vec<DyadicPair> =
        radii.iter().flat_map(|&r| scales.iter().map(move |&m| DyadicPair::new(r, m))).collect::<Result<_>>()?;
    for b0 in profiles {
        ensure_space(b0, Space::Spectral)?;
        b0.check_grid(grid)?;
        for &m in scales {
            ensure!(
                m <= grid.r_max() && 0.5 * m >= grid.nodes()[0],
                GridRange,
                "band [{}, {m}) is outside the spectral grid",
                0.5 * m
            );
        }
    }
    for &k in ks {
        for &r in radii {
            let mut integrator: Option<GIntegrator> = None;
            for pair in pairs.iter().filter(|p| p.r == r) {
                for (p, b0) in profiles.iter().enumerate() {
                    let (rho, mass, band_norm) = band_masses(b0, grid, pair.m, setup.n());
                    let Some((branch, env)) = g_branch_envelope(setup, k, *pair, w, band_norm) else { continue };
                    let reuse = integrator.as_ref().is_some_and(|g| g.rho() == rho.as_slice());
                    if !reuse {
                        integrator = Some(GIntegrator::new(setup, k, r, &rho));
                    }
                    let g = integrator.as_ref().map(|g| g.value(pair.m, w, &mass)).unwrap_or(0.0);
                    let code = if branch == GBranch::Small { 0.0 } else { 1.0 };
                    report.push(vec![k as f64, r, pair.m, p as f64, code, g, g / env])?;
                }
            }
        }
    }
    Ok(report)
}

/// Fitted constants per branch from the rows of [`g_ratio_scan`].
pub fn fit_g_constants(report: &crate::report::ExperimentReport) -> Vec<GConstants> {
    let mut out = Vec::new();
    for (code, branch) in [(0.0, GBranch::Small), (1.0, GBranch::Large)] {
        let mut per_k: Vec<(usize, f64)> = Vec::new();
        for row in report.rows.iter().filter(|r| r[4] == code) {
            let k = row[0] as usize;
            match per_k.iter_mut().find(|e| e.0 == k) {
                Some(e) => e.1 = e.1.max(row[6]),
                None => per_k.push((k, row[6])),
            }
        }
        if per_k.is_empty() {
            continue;
        }
        let constant = per_k.iter().map(|e| e.1).fold(0.0, f64::max);
        let low = per_k.iter().map(|e| e.1).fold(f64::INFINITY, f64::min);
        out.push(GConstants { branch, per_k, constant, spread: constant / low });
    }
    out
}
