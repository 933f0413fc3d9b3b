//! Comparison of the dyadic Hankel-side Sobolev norm with the Fourier-side
//! one over data band-limited for the perturbed operator.

use super::bands::{smooth_step, sobolev_norm_fourier, sobolev_norm_hankel};
use crate::error::{ensure, Result};
use crate::hankel::{GridPair, ModeField, PotentialSetup, Space};
use crate::report::ExperimentReport;
use crate::specfun::BesselOrder;

/// Smooth spectral profile supported in `[0.55 M, 0.95 M]`.
pub fn band_limited_profile(rho: f64, m: f64) -> f64 {
    let x = rho / m;
    smooth_step((x - 0.55) / 0.1) * smooth_step((0.95 - x) / 0.1)
}

/// For every degree in `ks`, frequency scale `M` in `scales` and order in
/// `s_list`, the data `f = H_ν b` with `b = band_limited_profile(·, M)` and
/// the ratio of [`sobolev_norm_hankel`] to [`sobolev_norm_fourier`] with
/// `s' = 0`. Columns `k`, `s`, `M`, `ratio`; one fit `ratio[k,s]` against
/// `M` per degree and order.
pub fn norm_equivalence_scan(
    setup: &PotentialSetup,
    ks: &[usize],
    s_list: &[f64],
    scales: &[f64],
    grids: &GridPair,
) -> Result<ExperimentReport> {
    ensure!(!ks.is_empty() && !s_list.is_empty() && !scales.is_empty(), InvalidConfig, "empty equivalence scan");
    let mut report = ExperimentReport::new(["k", "s", "M", "ratio"]);
    report.metadata.insert("n".into(), setup.n().to_string());
    report.metadata.insert("a".into(), format!("{:?}", setup.a()));
    for &k in ks {
        let nu = BesselOrder::new(setup.nu(k))?;
        for &m in scales {
            let b = ModeField::from_real(k, 0, Space::Spectral, &grids.spectral, |p| band_limited_profile(p, m));
            let f = grids.transform(setup, nu, &b)?;
            for &s in s_list {
                let h = sobolev_norm_hankel(setup, std::slice::from_ref(&f), s, 0.0, grids)?;
                let g = sobolev_norm_fourier(setup, std::slice::from_ref(&f), s, 0.0, grids)?;
                report.push(vec![k as f64, s, m, h / g])?;
            }
        }
        for &s in s_list {
            let name = format!("ratio[{k},{s}]");
            let rows: Vec<(f64, f64)> =
                report.rows.iter().filter(|r| r[0] == k as f64 && r[1] == s).map(|r| (r[2], r[3])).collect();
            if rows.len() >= 4 {
                let fit = crate::report::fit_slope(&rows)?;
                report.fitted_slopes.insert(name, fit);
            }
        }
    }
    Ok(report)
}
