use num_complex::Complex64;

use super::{InitialData, Snapshot};
use crate::error::{ensure, Result};
use crate::hankel::{GridScheme, ModeField, PotentialSetup, RadialGrid};

/// Largest accepted time step of the finite-difference oracle.
pub const DT_MAX: f64 = 1e-2;
/// Largest accepted number of time steps.
pub const MAX_STEPS: usize = 1_000_000;

/// A real tridiagonal matrix: `lower[i]` couples row `i+1` to column `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let q = self.diag.len();
        (0..q)
            .map(|i| {
                let mut y = x[i] * self.diag[i];
                if i > 0 {
                    y += x[i - 1] * self.lower[i - 1];
                }
                if i + 1 < q {
                    y += x[i + 1] * self.upper[i];
                }
                y
            })
            .collect()
    }
}

/// `-w'' + (ν² - 1/4)/r² w` on a uniform midpoint grid, with mirror ghost
/// nodes `w_{-1} = -w_0` and `w_Q = -w_{Q-1}` (so `w = 0` at `r = 0` and at
/// `R_max`). This is `A_ν` in the variable `w = r^{(n-1)/2} f`.
pub fn a_nu_tridiagonal(nu: f64, grid: &RadialGrid) -> Result<Tridiagonal> {
    ensure!(
        grid.scheme() == GridScheme::Uniform,
        Domain,
        "the finite-difference operator needs a uniform grid, got {:?}",
        grid.scheme()
    );
    let q = grid.len();
    ensure!(q >= 256, GridTooCoarse, "second differences need at least 256 nodes, got {q}");
    let h = grid.spacing().expect("uniform grid");
    let inv = 1.0 / (h * h);
    let pot = nu * nu - 0.25;
    let mut diag: Vec<f64> = grid.nodes().iter().map(|r| 2.0 * inv + pot / (r * r)).collect();
    diag[0] += inv;
    diag[q - 1] += inv;
    Ok(Tridiagonal { lower: vec![-inv; q - 1], diag, upper: vec![-inv; q - 1] })
}

/// Solve `(I - i τ L) x = rhs` by the Thomas algorithm.
fn solve_shifted(l: &Tridiagonal, tau: f64, rhs: &[Complex64]) -> Vec<Complex64> {
    let q = rhs.len();
    let i = Complex64::i();
    let a = |k: usize| -i * tau * l.lower[k - 1];
    let b = |k: usize| Complex64::new(1.0, 0.0) - i * tau * l.diag[k];
    let c = |k: usize| -i * tau * l.upper[k];
    let mut cp = vec![Complex64::default(); q];
    let mut dp = vec![Complex64::default(); q];
    cp[0] = c(0) / b(0);
    dp[0] = rhs[0] / b(0);
    for k in 1..q {
        let m = b(k) - a(k) * cp[k - 1];
        if k + 1 < q {
            cp[k] = c(k) / m;
        }
        dp[k] = (rhs[k] - a(k) * dp[k - 1]) / m;
    }
    let mut x = vec![Complex64::default(); q];
    x[q - 1] = dp[q - 1];
    for k in (0..q - 1).rev() {
        x[k] = dp[k] - cp[k] * x[k + 1];
    }
    x
}

fn step_mode(setup: &PotentialSetup, grid: &RadialGrid, m: &ModeField, t: f64, steps: usize) -> Result<ModeField> {
    let l = a_nu_tridiagonal(setup.nu(m.k), grid)?;
    let half = (setup.n() as f64 - 1.0) / 2.0;
    let r = grid.nodes();
    let mut w: Vec<Complex64> = m.values.iter().zip(r).map(|(v, x)| v * x.powf(half)).collect();
    let tau = 0.5 * t / steps as f64;
    let i = Complex64::i();
    for _ in 0..steps {
        let lw = l.apply(&w);
        let rhs: Vec<Complex64> = w.iter().zip(&lw).map(|(x, y)| x + i * tau * y).collect();
        w = solve_shifted(&l, tau, &rhs);
    }
    let values = w.iter().zip(r).map(|(v, x)| v * x.powf(-half)).collect();
    Ok(ModeField { values, ..m.clone() })
}

/// Crank–Nicolson integration of `∂_t v = i A_ν v` for every mode of
/// `data`, with `⌈t/dt⌉` equal steps. Needs a uniform physical grid.
pub fn oracle_evolve_fd(data: &InitialData, t: f64, dt: f64) -> Result<Snapshot> {
    ensure!(dt.is_finite() && dt > 0.0 && dt <= DT_MAX, StepSize, "dt = {dt} must lie in (0, {DT_MAX}]");
    ensure!(t.is_finite(), Domain, "t must be finite");
    let steps = (t.abs() / dt).ceil() as usize;
    ensure!(steps <= MAX_STEPS, StepSize, "{steps} steps exceed the limit of {MAX_STEPS}");
    let grid = &data.grids.physical;
    let modes = if steps == 0 {
        data.modes.clone()
    } else {
        data.modes
            .iter()
            .map(|m| step_mode(&data.setup, grid, m, t, steps))
            .collect::<Result<Vec<_>>>()?
    };
    Ok(Snapshot { t, modes })
}
