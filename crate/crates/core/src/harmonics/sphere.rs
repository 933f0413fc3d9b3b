//! Real orthonormal harmonics on the circle and the 2-sphere, with
//! quadrature grids exact up to a chosen degree.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{ensure, Result};
use crate::quadrature::{gauss_legendre, Neumaier};

/// `d(k)`, the dimension of degree-`k` spherical harmonics on `S^{n-1}`:
/// `(2k+n-2)/k · C(k+n-3, k-1)` for `k ≥ 1` and `d(0) = 1`.
/// Saturates at `u128::MAX` on overflow.
pub fn dim_harmonic(n: usize, k: usize) -> u128 {
    assert!(n >= 2, "dimension must be >= 2");
    if k == 0 {
        return 1;
    }
    // C(k+n-3, k-1) = C(k+n-3, n-2), built so every partial quotient is exact.
    let top = (k + n - 3) as u128;
    let r = (n - 2) as u128;
    let mut binom: u128 = 1;
    for i in 0..r {
        binom = match binom.checked_mul(top - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    match binom.checked_mul((2 * k + n - 2) as u128) {
        Some(v) => v / k as u128,
        None => u128::MAX,
    }
}

/// Label of one basis function: degree `k` and index `ell` in `1..=d(k)`.
///
/// Within a degree, `ell = 1` is the zonal (`m = 0`) function and the pair
/// `(2m, 2m+1)` holds the `cos mφ` and `sin mφ` partners.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HarmonicIndex {
    pub k: usize,
    pub ell: usize,
}

impl HarmonicIndex {
    pub fn eigenvalue(&self, n: usize) -> f64 {
        (self.k * (self.k + n - 2)) as f64
    }

    /// All indices with degree at most `k_max`, in degree order.
    pub fn up_to(n: usize, k_max: usize) -> Vec<HarmonicIndex> {
        (0..=k_max)
            .flat_map(|k| (1..=dim_harmonic(n, k) as usize).map(move |ell| HarmonicIndex { k, ell }))
            .collect()
    }
}

/// Quadrature on `S^{n-1}` (`n ∈ {2, 3}`), exact for polynomials of degree
/// at most `exactness`.
#[derive(Debug, Clone)]
pub struct AngularGrid {
    pub n: usize,
    /// `θ` on the circle, `(θ, φ)` (colatitude, longitude) on the sphere.
    pub angles: Vec<(f64, f64)>,
    pub weights: Vec<f64>,
    pub exactness: usize,
}

impl AngularGrid {
    pub fn new(n: usize, exactness: usize) -> Result<Self> {
        ensure!(n == 2 || n == 3, Domain, "angular synthesis is implemented for n = 2 and n = 3, got {n}");
        let n_phi = exactness + 1;
        let phis: Vec<f64> = (0..n_phi).map(|i| TAU * i as f64 / n_phi as f64).collect();
        if n == 2 {
            return Ok(Self {
                n,
                angles: phis.iter().map(|&p| (p, 0.0)).collect(),
                weights: vec![TAU / n_phi as f64; n_phi],
                exactness,
            });
        }
        let n_theta = exactness / 2 + 1;
        let rule = gauss_legendre(n_theta.max(2));
        let mut angles = Vec::new();
        let mut weights = Vec::new();
        for (x, w) in rule.0.iter().zip(&rule.1) {
            for &p in &phis {
                angles.push((x.acos(), p));
                weights.push(w * TAU / n_phi as f64);
            }
        }
        Ok(Self { n, angles, weights, exactness })
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    /// Unit vector of point `i`.
    pub fn point(&self, i: usize) -> [f64; 3] {
        let (t, p) = self.angles[i];
        if self.n == 2 {
            [t.cos(), t.sin(), 0.0]
        } else {
            [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()]
        }
    }

    /// `‖g‖²_{L²(S^{n-1})}` by quadrature.
    pub fn norm_sqr(&self, values: &[Complex64]) -> f64 {
        let mut acc = Neumaier::default();
        for (v, w) in values.iter().zip(&self.weights) {
            acc.add(v.norm_sqr() * w);
        }
        acc.sum()
    }
}

/// Orthonormal associated Legendre functions `P̃_k^m(x)`, normalised so that
/// `∫_{-1}^{1} P̃_k^m(x)² dx = 1`, for `0 ≤ m ≤ k ≤ k_max`.
/// Returned as `table[k][m]`.
fn legendre_table(x: f64, k_max: usize) -> Vec<Vec<f64>> {
    let s = (1.0 - x * x).max(0.0).sqrt();
    let mut p = vec![vec![0.0; k_max + 1]; k_max + 1];
    p[0][0] = std::f64::consts::FRAC_1_SQRT_2;
    for m in 1..=k_max {
        let mf = m as f64;
        p[m][m] = ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * s * p[m - 1][m - 1];
    }
    for m in 0..k_max {
        let mf = m as f64;
        p[m + 1][m] = (2.0 * mf + 3.0).sqrt() * x * p[m][m];
        for l in m + 2..=k_max {
            let lf = l as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
            p[l][m] = a * (x * p[l - 1][m] - b * p[l - 2][m]);
        }
    }
    p
}

/// Values of every `Y_{k,ℓ}` with `k ≤ k_max` at the grid points, stored
/// index-major: `table[idx * points + i]`.
#[derive(Debug, Clone)]
pub struct HarmonicBasis {
    pub grid: AngularGrid,
    pub k_max: usize,
    pub indices: Vec<HarmonicIndex>,
    table: Vec<f64>,
}

impl HarmonicBasis {
    /// Basis up to `k_max` on a grid exact to degree `4 k_max + 4`, so that
    /// energy up to degree `3 k_max + 4` is measured exactly and anything
    /// above `k_max` shows up as tail energy.
    pub fn new(n: usize, k_max: usize) -> Result<Self> {
        Self::with_grid(AngularGrid::new(n, 4 * k_max + 4)?, k_max)
    }

    pub fn with_grid(grid: AngularGrid, k_max: usize) -> Result<Self> {
        ensure!(grid.exactness >= 2 * k_max, Domain, "grid exact to degree {} cannot resolve k_max = {k_max}", grid.exactness);
        let n = grid.n;
        let indices = HarmonicIndex::up_to(n, k_max);
        let pts = grid.len();
        let mut table = vec![0.0; indices.len() * pts];
        for i in 0..pts {
            let (t, p) = grid.angles[i];
            if n == 2 {
                for (row, idx) in indices.iter().enumerate() {
                    table[row * pts + i] = circle_harmonic(*idx, t);
                }
            } else {
                let leg = legendre_table(t.cos(), k_max);
                for (row, idx) in indices.iter().enumerate() {
                    let m = idx.ell / 2;
                    let lp = leg[idx.k][m];
                    table[row * pts + i] = if m == 0 {
                        lp / TAU.sqrt()
                    } else if idx.ell % 2 == 0 {
                        lp * (m as f64 * p).cos() / PI.sqrt()
                    } else {
                        lp * (m as f64 * p).sin() / PI.sqrt()
                    };
                }
            }
        }
        Ok(Self { grid, k_max, indices, table })
    }

    pub fn n(&self) -> usize {
        self.grid.n
    }

    /// `Y_{k,ℓ}` at grid point `i`.
    pub fn value(&self, row: usize, i: usize) -> f64 {
        self.table[row * self.grid.len() + i]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        let pts = self.grid.len();
        &self.table[row * pts..(row + 1) * pts]
    }

    pub fn position(&self, idx: HarmonicIndex) -> Option<usize> {
        self.indices.iter().position(|i| *i == idx)
    }

    /// Coefficients `∫ g Y_{k,ℓ}` of samples on the grid, in `indices` order.
    pub fn project(&self, samples: &[Complex64]) -> Vec<Complex64> {
        let w = &self.grid.weights;
        (0..self.indices.len())
            .map(|row| {
                let mut re = Neumaier::default();
                let mut im = Neumaier::default();
                for ((y, g), wi) in self.row(row).iter().zip(samples).zip(w) {
                    re.add(y * wi * g.re);
                    im.add(y * wi * g.im);
                }
                Complex64::new(re.sum(), im.sum())
            })
            .collect()
    }

    /// Samples of `Σ c_{k,ℓ} Y_{k,ℓ}` on the grid.
    pub fn expand(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let pts = self.grid.len();
        (0..pts)
            .map(|i| {
                let mut re = Neumaier::default();
                let mut im = Neumaier::default();
                for (row, c) in coeffs.iter().enumerate() {
                    let y = self.value(row, i);
                    re.add(y * c.re);
                    im.add(y * c.im);
                }
                Complex64::new(re.sum(), im.sum())
            })
            .collect()
    }
}

/// `1/√(2π)`, `cos(kθ)/√π`, `sin(kθ)/√π`.
fn circle_harmonic(idx: HarmonicIndex, theta: f64) -> f64 {
    if idx.k == 0 {
        1.0 / TAU.sqrt()
    } else if idx.ell == 1 {
        (idx.k as f64 * theta).cos() / PI.sqrt()
    } else {
        (idx.k as f64 * theta).sin() / PI.sqrt()
    }
}
