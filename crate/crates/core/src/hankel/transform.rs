use std::collections::{HashMap, HashSet};
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;

use super::field::{ModeField, Space};
use super::grid::RadialGrid;
use super::setup::PotentialSetup;
use crate::error::{ensure, Result};
use crate::quadrature::ComplexSum;
use crate::specfun::{j, BesselOrder};

/// Energy fraction near `R_max` above which a transform logs a truncation
/// warning.
pub const TAIL_WARNING: f64 = 1e-8;

/// True the first time a truncation warning is raised for a mode on a grid.
fn first_warning(grid: u64, k: usize, ell: usize) -> bool {
    static SEEN: OnceLock<Mutex<HashSet<(u64, usize, usize)>>> = OnceLock::new();
    SEEN.get_or_init(Default::default).lock().unwrap().insert((grid, k, ell))
}

/// The discretised order-ν Hankel transform from one grid to another.
///
/// Stores `C_ij = (y_i x_j)^{-(n-2)/2} J_ν(y_i x_j)` for output nodes `y_i`
/// and input nodes `x_j`; the transform is `g_i = Σ_j C_ij m_j f_j` with
/// `m_j = w_j x_j^{n-1}`.
#[derive(Debug)]
pub struct HankelKernel {
    pub nu: f64,
    pub n: usize,
    rows: usize,
    cols: usize,
    core: Vec<f64>,
    in_measure: Vec<f64>,
    out_measure: Vec<f64>,
    pub in_grid: u64,
    pub out_grid: u64,
}

impl HankelKernel {
    pub fn build(n: usize, nu: f64, input: &RadialGrid, output: &RadialGrid) -> Self {
        let alpha = (n as f64 - 2.0) / 2.0;
        let xs = input.nodes();
        let ys = output.nodes();
        let cols = xs.len();
        let mut core = vec![0.0; ys.len() * cols];
        core.par_chunks_mut(cols).zip(ys.par_iter()).for_each(|(row, &y)| {
            for (c, &x) in row.iter_mut().zip(xs) {
                let s = x * y;
                let b = j(nu, s);
                *c = if alpha == 0.0 { b } else { b * s.powf(-alpha) };
            }
        });
        Self {
            nu,
            n,
            rows: ys.len(),
            cols,
            core,
            in_measure: input.measure(n),
            out_measure: output.measure(n),
            in_grid: input.id(),
            out_grid: output.id(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// `(y_i x_j)^{-(n-2)/2} J_ν(y_i x_j)`.
    pub fn core(&self, i: usize, jj: usize) -> f64 {
        self.core[i * self.cols + jj]
    }

    pub fn core_row(&self, i: usize) -> &[f64] {
        &self.core[i * self.cols..(i + 1) * self.cols]
    }

    pub fn in_measure(&self) -> &[f64] {
        &self.in_measure
    }

    pub fn out_measure(&self) -> &[f64] {
        &self.out_measure
    }

    /// Apply to samples on the input grid. Rows are independent and each is
    /// summed in ascending `j` with compensation, so the result does not
    /// depend on thread scheduling.
    pub fn apply(&self, f: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(f.len(), self.cols);
        let weighted: Vec<Complex64> = f.iter().zip(&self.in_measure).map(|(v, m)| v * m).collect();
        (0..self.rows)
            .into_par_iter()
            .map(|i| {
                let mut acc = ComplexSum::default();
                for (c, v) in self.core_row(i).iter().zip(&weighted) {
                    acc.add(v * *c);
                }
                acc.sum()
            })
            .collect()
    }

    /// Entry `(i, j)` of the matrix that is orthogonal when the transform is
    /// an exact isometry: `√(m^{out}_i) C_ij √(m^{in}_j)`.
    pub fn symmetric_entry(&self, i: usize, jj: usize) -> f64 {
        self.out_measure[i].sqrt() * self.core(i, jj) * self.in_measure[jj].sqrt()
    }
}

type Key = (u64, u64, u64, usize);

struct Cache {
    map: HashMap<Key, Arc<HankelKernel>>,
    entries: usize,
}

/// Cached kernels are dropped wholesale once they hold this many entries.
const CACHE_LIMIT: usize = 1 << 27;

fn cache() -> &'static Mutex<Cache> {
    static CACHE: OnceLock<Mutex<Cache>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(Cache { map: HashMap::new(), entries: 0 }))
}

/// The kernel for `(n, ν, input → output)`, built on first use.
pub fn kernel(n: usize, nu: f64, input: &RadialGrid, output: &RadialGrid) -> Arc<HankelKernel> {
    let key = (input.id(), output.id(), nu.to_bits(), n);
    if let Some(k) = cache().lock().unwrap().map.get(&key) {
        return Arc::clone(k);
    }
    let built = Arc::new(HankelKernel::build(n, nu, input, output));
    let mut c = cache().lock().unwrap();
    let size = built.rows * built.cols;
    if c.entries + size > CACHE_LIMIT {
        c.map.clear();
        c.entries = 0;
    }
    c.entries += size;
    Arc::clone(c.map.entry(key).or_insert(built))
}

pub fn clear_kernel_cache() {
    let mut c = cache().lock().unwrap();
    c.map.clear();
    c.entries = 0;
}

/// Order-ν Hankel transform of `f` between two grids. The space tag flips.
pub fn hankel_transform_between(
    setup: &PotentialSetup,
    nu: BesselOrder,
    f: &ModeField,
    from: &RadialGrid,
    to: &RadialGrid,
) -> Result<ModeField> {
    f.check_grid(from)?;
    let n = setup.n();
    let tail = f.tail_fraction(from, n, 0.1);
    if tail > TAIL_WARNING && first_warning(from.id(), f.k, f.ell) {
        log::warn!(
            "mode ({}, {}) carries {tail:.1e} of its energy within 10% of R_max = {}; truncation error likely",
            f.k,
            f.ell,
            from.r_max()
        );
    }
    let kern = kernel(n, nu.value(), from, to);
    Ok(ModeField { k: f.k, ell: f.ell, space: f.space.flip(), values: kern.apply(&f.values), grid_id: to.id() })
}

/// Order-ν Hankel transform on a self-dual grid (spectral grid = physical grid).
///
/// ```
/// use invsq::hankel::*;
/// use invsq::specfun::BesselOrder;
/// let setup = PotentialSetup::new(3, 0.0).unwrap();
/// let grid = make_grid(12.0, 768, GridScheme::CompositeGaussLegendre).unwrap();
/// // r^{ν-(n-2)/2} e^{-r²/2} is its own transform.
/// let f = ModeField::from_real(0, 1, Space::Physical, &grid, |r| (-r * r / 2.0).exp());
/// let g = hankel_transform(&setup, BesselOrder::new(0.5).unwrap(), &f, &grid).unwrap();
/// let i = grid.nodes().iter().position(|&r| r > 1.0).unwrap();
/// assert!((g.values[i].re - f.values[i].re).abs() < 1e-10);
/// ```
pub fn hankel_transform(setup: &PotentialSetup, nu: BesselOrder, f: &ModeField, grid: &RadialGrid) -> Result<ModeField> {
    hankel_transform_between(setup, nu, f, grid, grid)
}

/// Physical and spectral grids used together; they coincide by default.
#[derive(Debug, Clone)]
pub struct GridPair {
    pub physical: Arc<RadialGrid>,
    pub spectral: Arc<RadialGrid>,
}

impl GridPair {
    pub fn self_dual(grid: RadialGrid) -> Self {
        let g = Arc::new(grid);
        Self { physical: Arc::clone(&g), spectral: g }
    }

    pub fn new(physical: RadialGrid, spectral: RadialGrid) -> Self {
        Self { physical: Arc::new(physical), spectral: Arc::new(spectral) }
    }

    pub fn grid_for(&self, space: Space) -> &RadialGrid {
        match space {
            Space::Physical => &self.physical,
            Space::Spectral => &self.spectral,
        }
    }

    /// Transform `f` to the other space.
    pub fn transform(&self, setup: &PotentialSetup, nu: BesselOrder, f: &ModeField) -> Result<ModeField> {
        let from = self.grid_for(f.space);
        let to = self.grid_for(f.space.flip());
        hankel_transform_between(setup, nu, f, from, to)
    }
}

/// `true` when `f` is aligned with `grid` and tagged with `space`.
pub fn ensure_space(f: &ModeField, space: Space) -> Result<()> {
    ensure!(f.space == space, Domain, "mode ({}, {}) is in {:?} space, expected {:?}", f.k, f.ell, f.space, space);
    Ok(())
}
