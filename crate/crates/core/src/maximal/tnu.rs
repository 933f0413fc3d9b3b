//! The linearized operator
//! `T_ν g(r) = ∫_I e^{i t(r) ρ²} (rρ)^{1/2} J_ν(rρ) ρ^{-1/4} g(ρ) dρ`
//! from `L²(I)` to `L²(0, 1)`, and the linearized maximal function of radial
//! data on the unit ball.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{ensure, Result};
use crate::propagator::{prepare, InitialData, SpectralState};
use crate::quadrature::{composite_uniform, Neumaier};
use crate::report::ExperimentReport;
use crate::specfun::{j, BesselOrder};

const MAX_NODES: usize = 1 << 16;
const POWER_ITERATIONS: usize = 500;
const POWER_TOLERANCE: f64 = 1e-12;
const ASCENT_CANDIDATES: usize = 64;

/// Nodes on `(0, 1]` fine enough for `J_ν(rρ)` with `ρ ≤ rho_max`.
fn radial_nodes(rho_max: f64) -> (Vec<f64>, Vec<f64>) {
    let panels = (rho_max / PI).ceil().max(16.0) as usize;
    composite_uniform(0.0, 1.0, panels, 16)
}

/// Discretized `T_ν` on fixed `r` and `ρ` grids. The `ρ` grid resolves the
/// phase `t ρ²` for every `|t| ≤ t_max`.
#[derive(Debug, Clone)]
pub struct TnuOperator {
    pub nu: f64,
    pub interval: (f64, f64),
    pub t_max: f64,
    r: Vec<f64>,
    wr: Vec<f64>,
    rho: Vec<f64>,
    wp: Vec<f64>,
    /// `√w_r (rρ)^{1/2} J_ν(rρ) ρ^{-1/4} √w_ρ`, row per `r` node.
    matrix: Vec<f64>,
}

impl TnuOperator {
    pub fn new(nu: BesselOrder, interval: (f64, f64), t_max: f64) -> Result<Self> {
        let (a, b) = interval;
        ensure!(0.0 <= a && a < b && b.is_finite(), Domain, "invalid interval [{a}, {b}]");
        ensure!(t_max >= 0.0 && t_max.is_finite(), Domain, "t_max must be finite and nonnegative, got {t_max}");
        let phase_rate = 1.0 + 2.0 * t_max * b;
        let panels = ((b - a) * phase_rate / PI).ceil().max(4.0);
        ensure!(
            panels * 16.0 <= MAX_NODES as f64,
            Resolution,
            "resolving e^(itρ²) on [{a}, {b}] for |t| <= {t_max} needs {panels} panels"
        );
        let (rho, wp) = composite_uniform(a, b, panels as usize, 16);
        let (r, wr) = radial_nodes(b);
        let nu = nu.value();
        let mut matrix = Vec::with_capacity(r.len() * rho.len());
        for (x, wx) in r.iter().zip(&wr) {
            for (p, w) in rho.iter().zip(&wp) {
                let s = x * p;
                matrix.push((wx * w).sqrt() * s.sqrt() * j(nu, s) * p.powf(-0.25));
            }
        }
        Ok(Self { nu, interval, t_max, r, wr, rho, wp, matrix })
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }

    pub fn r_weights(&self) -> &[f64] {
        &self.wr
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn rho_weights(&self) -> &[f64] {
        &self.wp
    }

    fn check_times(&self, t: &[f64]) -> Result<()> {
        ensure!(t.len() == self.r.len(), GridMismatch, "{} times for {} radial nodes", t.len(), self.r.len());
        let worst = t.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        ensure!(
            worst <= self.t_max && worst.is_finite(),
            Resolution,
            "|t| = {worst} exceeds the resolved t_max = {}",
            self.t_max
        );
        Ok(())
    }

    fn row(&self, i: usize) -> &[f64] {
        let p = self.rho.len();
        &self.matrix[i * p..(i + 1) * p]
    }

    fn phases(&self, t: f64) -> Vec<Complex64> {
        self.rho.iter().map(|p| Complex64::from_polar(1.0, t * p * p)).collect()
    }

    /// `T_ν g` at the radial nodes for `g` sampled on [`Self::rho`].
    pub fn apply(&self, t: &[f64], g: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_times(t)?;
        ensure!(g.len() == self.rho.len(), GridMismatch, "g has {} samples for {} nodes", g.len(), self.rho.len());
        let scaled: Vec<Complex64> = g.iter().zip(&self.wp).map(|(v, w)| v * w.sqrt()).collect();
        Ok((0..self.r.len())
            .map(|i| self.weighted_row_apply(i, t[i], &scaled) / self.wr[i].sqrt())
            .collect())
    }

    fn weighted_row_apply(&self, i: usize, t: f64, h: &[Complex64]) -> Complex64 {
        self.row(i)
            .iter()
            .zip(&self.rho)
            .zip(h)
            .map(|((k, p), v)| v * Complex64::from_polar(*k, t * p * p))
            .sum()
    }

    /// Largest singular value of the weighted matrix and its right vector.
    fn top_singular(&self, t: &[f64], start: Option<Vec<Complex64>>) -> (f64, Vec<Complex64>) {
        let np = self.rho.len();
        let mut h = start.unwrap_or_else(|| (0..np).map(|i| Complex64::new(1.0, 0.1 * i as f64 / np as f64)).collect());
        let phase_rows: Vec<Vec<Complex64>> = t.iter().map(|&ti| self.phases(ti)).collect();
        let mut sigma2 = 0.0;
        for _ in 0..POWER_ITERATIONS {
            let norm = h.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 {
                return (0.0, h);
            }
            h.iter_mut().for_each(|v| *v /= norm);
            let mut back = vec![Complex64::new(0.0, 0.0); np];
            for (i, ph) in phase_rows.iter().enumerate() {
                let row = self.row(i);
                let u: Complex64 = row.iter().zip(ph).zip(&h).map(|((k, e), v)| e * v * *k).sum();
                for ((b, k), e) in back.iter_mut().zip(row).zip(ph) {
                    *b += u * e.conj() * *k;
                }
            }
            let next: f64 = back.iter().zip(&h).map(|(b, v)| (v.conj() * b).re).sum();
            h = back;
            let done = (next - sigma2).abs() <= POWER_TOLERANCE * next;
            sigma2 = next;
            if done {
                break;
            }
        }
        let norm = h.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            h.iter_mut().for_each(|v| *v /= norm);
        }
        (sigma2.max(0.0).sqrt(), h)
    }

    /// `‖T_ν‖` from `L²(I)` to `L²(0, 1)` for the time selection `t`.
    pub fn norm(&self, t: &[f64]) -> Result<f64> {
        self.check_times(t)?;
        Ok(self.top_singular(t, None).0)
    }

    /// Alternating ascent on the time selection: with the current top right
    /// vector `g` fixed, each `t(r_i)` is moved to the candidate in
    /// `[0, t_max]` maximizing `|T_ν g(r_i)|`, which cannot lower `‖T_ν g‖`.
    /// Returns the best norm found and its time selection.
    pub fn ascend(&self, t0: &[f64], candidates: usize, rounds: usize) -> Result<(f64, Vec<f64>)> {
        self.check_times(t0)?;
        let cands: Vec<f64> = (0..candidates.max(2))
            .map(|c| self.t_max * c as f64 / (candidates.max(2) - 1) as f64)
            .collect();
        let cand_phases: Vec<Vec<Complex64>> = cands.iter().map(|&c| self.phases(c)).collect();
        let mut t = t0.to_vec();
        let (mut best, mut h) = self.top_singular(&t, None);
        for _ in 0..rounds {
            let next_t: Vec<f64> = (0..self.r.len())
                .map(|i| {
                    let row = self.row(i);
                    let mut arg = (0.0, t[i]);
                    for (c, ph) in cands.iter().zip(&cand_phases) {
                        let v: Complex64 = row.iter().zip(ph).zip(&h).map(|((k, e), x)| e * x * *k).sum();
                        if v.norm() > arg.0 {
                            arg = (v.norm(), *c);
                        }
                    }
                    arg.1
                })
                .collect();
            let (s, h2) = self.top_singular(&next_t, Some(h.clone()));
            if s <= best * (1.0 + 1e-9) {
                break;
            }
            best = s;
            h = h2;
            t = next_t;
        }
        Ok((best, t))
    }
}

/// `T_ν g` on the radial nodes of `(0, 1]` for the time selection `t_of_r`
/// and density `g` on `interval`. Returns the nodes and the values.
pub fn t_nu_apply<T, G>(nu: BesselOrder, interval: (f64, f64), t_of_r: T, g: G) -> Result<(Vec<f64>, Vec<Complex64>)>
where
    T: Fn(f64) -> f64,
    G: Fn(f64) -> Complex64,
{
    let (r, _) = radial_nodes(interval.1);
    let t: Vec<f64> = r.iter().map(|&x| t_of_r(x)).collect();
    ensure!(t.iter().all(|x| x.is_finite()), Domain, "t(r) must be finite");
    let t_max = t.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let op = TnuOperator::new(nu, interval, t_max)?;
    let samples: Vec<Complex64> = op.rho.iter().map(|&p| g(p)).collect();
    let values = op.apply(&t, &samples)?;
    Ok((op.r, values))
}

/// `‖u(t(|x|), x)‖_{L²(B)}` over the unit ball for radial data.
pub fn radial_maximal_norm<T: Fn(f64) -> f64>(data: &InitialData, t_of_r: T) -> Result<f64> {
    ensure!(
        data.modes.len() == 1 && data.modes[0].k == 0,
        Domain,
        "the linearized maximal function is defined for radial data"
    );
    linearized_ball_norm(&prepare(data)?, t_of_r)
}

/// [`radial_maximal_norm`] for an already prepared radial state.
pub fn linearized_ball_norm<T: Fn(f64) -> f64>(state: &SpectralState, t_of_r: T) -> Result<f64> {
    ensure!(
        state.modes.len() == 1 && state.modes[0].k == 0,
        Domain,
        "the linearized maximal function is defined for radial data"
    );
    let n = state.setup.n();
    let nu = state.setup.nu(0);
    let alpha = state.setup.alpha();
    let grid = &state.grids.spectral;
    let b = &state.modes[0].values;
    let peak = b.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    if peak == 0.0 {
        return Ok(0.0);
    }
    let keep: Vec<usize> = (0..b.len()).filter(|&i| b[i].norm() > 1e-14 * peak).collect();
    let rho: Vec<f64> = keep.iter().map(|&i| grid.nodes()[i]).collect();
    let m = grid.measure(n);
    let coef: Vec<Complex64> = keep.iter().map(|&i| b[i] * m[i]).collect();
    let rho_max = rho.iter().cloned().fold(0.0, f64::max);

    let (r, wr) = radial_nodes(rho_max);
    let t: Vec<f64> = r.iter().map(|&x| t_of_r(x)).collect();
    ensure!(t.iter().all(|x| x.is_finite()), Domain, "t(r) must be finite");
    let t_abs = t.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let gap = rho.windows(2).map(|p| p[1] - p[0]).fold(0.0, f64::max);
    ensure!(
        gap * (2.0 * t_abs * rho_max + 1.0) <= PI / 3.0,
        Resolution,
        "spectral node gap {gap} does not resolve e^(itρ²) for |t| <= {t_abs} up to ρ = {rho_max}"
    );
    let mut acc = Neumaier::default();
    for ((x, w), ti) in r.iter().zip(&wr).zip(&t) {
        let u: Complex64 = rho
            .iter()
            .zip(&coef)
            .map(|(p, c)| {
                let s = x * p;
                c * Complex64::from_polar(s.powf(-alpha) * j(nu, s), ti * p * p)
            })
            .sum();
        acc.add(w * x.powi(n as i32 - 1) * u.norm_sqr());
    }
    Ok(acc.sum().sqrt())
}

/// Random search for large `‖T_ν‖`. For each order, `intervals` intervals
/// `[A, A + L]` with `A = ν + U(0, 100)` and `L ~ √(A + 1)` are drawn, and on
/// each `samples` time selections: even draws are uniform on
/// `[0, 1/(A + 1)]`, odd draws steer the phase to a random `ρ_s ∈ I` through
/// `t(r) = r/(2ρ_s)` with 5% multiplicative jitter. With `ascent_rounds > 0`
/// the best draw on each interval is refined by [`TnuOperator::ascend`].
#[derive(Debug, Clone, PartialEq)]
pub struct TnuSweep {
    pub orders: Vec<f64>,
    pub intervals: usize,
    pub samples: usize,
    pub ascent_rounds: usize,
    pub seed: u64,
}

impl Default for TnuSweep {
    fn default() -> Self {
        Self {
            orders: (0..=10).map(|i| 5.0 * i as f64).collect(),
            intervals: 20,
            samples: 20,
            ascent_rounds: 0,
            seed: 0x7e57,
        }
    }
}

struct Draw {
    interval: (f64, f64),
    t_max: f64,
    selections: Vec<Vec<f64>>,
}

impl TnuSweep {
    /// One row per order and interval with columns `nu`, `interval`, `a`,
    /// `b` and `empirical_norm`, the largest norm found on `[a, b]`. The fit
    /// `norm`
    /// is of the per-order maxima against `1 + ν`.
    pub fn run(&self) -> Result<ExperimentReport> {
        ensure!(!self.orders.is_empty() && self.intervals > 0 && self.samples > 0, InvalidConfig, "empty T_ν sweep");
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut report = ExperimentReport::new(["nu", "interval", "a", "b", "empirical_norm"]);
        for (key, value) in [
            ("seed", self.seed.to_string()),
            ("intervals", self.intervals.to_string()),
            ("samples", self.samples.to_string()),
            ("ascent_rounds", self.ascent_rounds.to_string()),
        ] {
            report.metadata.insert(key.to_string(), value);
        }
        for &nu in &self.orders {
            let order = BesselOrder::new(nu)?;
            let draws: Vec<Draw> = (0..self.intervals).map(|_| self.draw(nu, &mut rng)).collect();
            let norms = draws
                .par_iter()
                .map(|d| -> Result<f64> {
                    let op = TnuOperator::new(order, d.interval, d.t_max)?;
                    let mut best = (0.0f64, 0);
                    for (i, t) in d.selections.iter().enumerate() {
                        let v = op.norm(t)?;
                        if v > best.0 {
                            best = (v, i);
                        }
                    }
                    if self.ascent_rounds > 0 {
                        best.0 = best.0.max(op.ascend(&d.selections[best.1], ASCENT_CANDIDATES, self.ascent_rounds)?.0);
                    }
                    Ok(best.0)
                })
                .collect::<Result<Vec<f64>>>()?;
            for (i, (d, v)) in draws.iter().zip(norms).enumerate() {
                report.push(vec![nu, i as f64, d.interval.0, d.interval.1, v])?;
            }
        }
        let maxima = order_maxima(&report);
        if maxima.len() >= 4 {
            let rows: Vec<(f64, f64)> = maxima.iter().map(|&(nu, v)| (1.0 + nu, v)).collect();
            report.fitted_slopes.insert("norm".into(), crate::report::fit_slope(&rows)?);
        }
        Ok(report)
    }

    fn draw(&self, nu: f64, rng: &mut ChaCha8Rng) -> Draw {
        let a = nu + rng.random_range(0.0..100.0);
        let len = rng.random_range(0.5..1.0) * (a + 1.0).sqrt() * rng.random_range(0.5..4.0);
        let t_max = 2.0 / (a + 1.0);
        let (r, _) = radial_nodes(a + len);
        let selections = (0..self.samples)
            .map(|s| {
                if s % 2 == 0 {
                    r.iter().map(|_| rng.random_range(0.0..1.0 / (a + 1.0))).collect()
                } else {
                    let rho_s = rng.random_range(a..a + len);
                    r.iter()
                        .map(|x| {
                            let jitter: f64 = 1.0 + 0.05 * (rng.random::<f64>() * 2.0 - 1.0) * 3f64.sqrt();
                            (x / (2.0 * rho_s) * jitter).abs().min(t_max)
                        })
                        .collect()
                }
            })
            .collect();
        Draw { interval: (a, a + len), t_max, selections }
    }
}

/// Largest `empirical_norm` per order in a [`TnuSweep`] report, in order of appearance.
pub fn order_maxima(report: &ExperimentReport) -> Vec<(f64, f64)> {
    let (Some(nus), Some(norms)) = (report.column("nu"), report.column("empirical_norm")) else {
        return Vec::new();
    };
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (nu, v) in nus.into_iter().zip(norms) {
        match out.last_mut() {
            Some(last) if last.0 == nu => last.1 = last.1.max(v),
            _ => out.push((nu, v)),
        }
    }
    out
}
