use num_complex::Complex64;

use super::grid::RadialGrid;
use crate::error::{ensure, Result};
use crate::quadrature::Neumaier;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Space {
    Physical,
    Spectral,
}

impl Space {
    pub fn flip(self) -> Self {
        match self {
            Space::Physical => Space::Spectral,
            Space::Spectral => Space::Physical,
        }
    }
}

/// Radial coefficient of one spherical harmonic `Y_{k,ℓ}`, sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeField {
    pub k: usize,
    /// Index of the harmonic within degree `k`, starting at 1.
    pub ell: usize,
    pub space: Space,
    pub values: Vec<Complex64>,
    pub grid_id: u64,
}

impl ModeField {
    pub fn zeros(k: usize, ell: usize, space: Space, grid: &RadialGrid) -> Self {
        Self { k, ell, space, values: vec![Complex64::default(); grid.len()], grid_id: grid.id() }
    }

    /// Sample `f` at the grid nodes.
    pub fn from_fn<F: Fn(f64) -> Complex64>(k: usize, ell: usize, space: Space, grid: &RadialGrid, f: F) -> Self {
        Self { k, ell, space, values: grid.nodes().iter().map(|&r| f(r)).collect(), grid_id: grid.id() }
    }

    pub fn from_real<F: Fn(f64) -> f64>(k: usize, ell: usize, space: Space, grid: &RadialGrid, f: F) -> Self {
        Self::from_fn(k, ell, space, grid, |r| Complex64::new(f(r), 0.0))
    }

    pub fn check_grid(&self, grid: &RadialGrid) -> Result<()> {
        ensure!(
            self.grid_id == grid.id() && self.values.len() == grid.len(),
            GridMismatch,
            "mode ({}, {}) has {} values on grid {:x}, expected {} on grid {:x}",
            self.k,
            self.ell,
            self.values.len(),
            self.grid_id,
            grid.len(),
            grid.id()
        );
        Ok(())
    }

    /// `‖f‖²` in `L²(r^{n-1} dr)`.
    pub fn norm_sqr(&self, grid: &RadialGrid, n: usize) -> f64 {
        weighted_norm_sqr(&self.values, &grid.measure(n))
    }

    pub fn norm(&self, grid: &RadialGrid, n: usize) -> f64 {
        self.norm_sqr(grid, n).sqrt()
    }

    /// `⟨f, g⟩ = Σ w_i r_i^{n-1} f_i conj(g_i)`.
    pub fn inner(&self, other: &ModeField, grid: &RadialGrid, n: usize) -> Complex64 {
        let m = grid.measure(n);
        let mut re = Neumaier::default();
        let mut im = Neumaier::default();
        for ((a, b), w) in self.values.iter().zip(&other.values).zip(&m) {
            let z = a * b.conj() * *w;
            re.add(z.re);
            im.add(z.im);
        }
        Complex64::new(re.sum(), im.sum())
    }

    /// Fraction of `‖f‖²` carried by nodes with `r > (1 - margin)·R_max`.
    pub fn tail_fraction(&self, grid: &RadialGrid, n: usize, margin: f64) -> f64 {
        let m = grid.measure(n);
        let cut = (1.0 - margin) * grid.r_max();
        let mut tail = Neumaier::default();
        let mut total = Neumaier::default();
        for ((v, w), r) in self.values.iter().zip(&m).zip(grid.nodes()) {
            let e = v.norm_sqr() * w;
            total.add(e);
            if *r > cut {
                tail.add(e);
            }
        }
        let t = total.sum();
        if t == 0.0 {
            0.0
        } else {
            tail.sum() / t
        }
    }
}

pub fn weighted_norm_sqr(values: &[Complex64], measure: &[f64]) -> f64 {
    let mut acc = Neumaier::default();
    for (v, w) in values.iter().zip(measure) {
        acc.add(v.norm_sqr() * w);
    }
    acc.sum()
}

/// Relative `L²(r^{n-1}dr)` distance `‖a - b‖ / ‖b‖`.
pub fn relative_l2(a: &[Complex64], b: &[Complex64], measure: &[f64]) -> f64 {
    let diff: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    (weighted_norm_sqr(&diff, measure) / weighted_norm_sqr(b, measure)).sqrt()
}
