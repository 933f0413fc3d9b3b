use num_complex::Complex64;

use super::field::{ModeField, Space};
use super::grid::RadialGrid;
use super::setup::PotentialSetup;
use super::transform::ensure_space;
use crate::error::{ensure, Result};
use crate::specfun::BesselOrder;

/// Finite-difference weights for the `m`-th derivative at `x0` from values
/// at `xs` (Fornberg's recursion).
pub fn fd_weights(x0: f64, xs: &[f64], m: usize) -> Vec<f64> {
    let n = xs.len();
    let mut c = vec![vec![0.0; m + 1]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for jj in 0..i {
            let c3 = xs[i] - xs[jj];
            c2 *= c3;
            if jj == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[jj][k] = (c4 * c[jj][k] - k as f64 * c[jj][k - 1]) / c3;
            }
            c[jj][0] = c4 * c[jj][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

/// `A_ν f = -f'' - (n-1)/r f' + [ν² - ((n-2)/2)²]/r² f` by second-order
/// finite differences.
///
/// Works on `w = r^{(n-1)/2} f`, for which the operator becomes
/// `r^{-(n-1)/2}[-w'' + (ν² - 1/4)/r² w]`; `w''` uses the three-point
/// stencil on the possibly nonuniform grid and four-point one-sided stencils
/// at the two ends.
pub fn apply_a_nu(setup: &PotentialSetup, nu: BesselOrder, f: &ModeField, grid: &RadialGrid) -> Result<ModeField> {
    f.check_grid(grid)?;
    ensure_space(f, Space::Physical)?;
    let q = grid.len();
    ensure!(q >= 256, GridTooCoarse, "second differences need at least 256 nodes, got {q}");
    let r = grid.nodes();
    let half = (setup.n() as f64 - 1.0) / 2.0;
    let w: Vec<Complex64> = f.values.iter().zip(r).map(|(v, &x)| v * x.powf(half)).collect();
    let pot = nu.value().powi(2) - 0.25;
    let second = |i: usize| -> Complex64 {
        let idx: Vec<usize> = if i == 0 {
            (0..4).collect()
        } else if i == q - 1 {
            (q - 4..q).collect()
        } else {
            vec![i - 1, i, i + 1]
        };
        let xs: Vec<f64> = idx.iter().map(|&k| r[k]).collect();
        fd_weights(r[i], &xs, 2).iter().zip(&idx).map(|(c, &k)| w[k] * *c).sum()
    };
    let values = (0..q)
        .map(|i| (-second(i) + w[i] * (pot / (r[i] * r[i]))) * r[i].powf(-half))
        .collect();
    Ok(ModeField { values, ..f.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fornberg_reproduces_central_difference() {
        let w = fd_weights(0.0, &[-1.0, 0.0, 1.0], 2);
        assert!((w[0] - 1.0).abs() < 1e-14 && (w[1] + 2.0).abs() < 1e-14 && (w[2] - 1.0).abs() < 1e-14);
        let w = fd_weights(0.0, &[0.0, 0.5, 1.5, 3.0], 2);
        let xs: [f64; 4] = [0.0, 0.5, 1.5, 3.0];
        let d2: f64 = w.iter().zip(&xs).map(|(c, x)| c * x * x).sum();
        assert!((d2 - 2.0).abs() < 1e-12);
    }
}
