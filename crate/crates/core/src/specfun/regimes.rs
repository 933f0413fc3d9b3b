//! The three size regimes of `J_k(r)` for large `k` and their envelopes.
//!
//! Below the transition (`r ≤ k/2`) the function is exponentially small,
//! near the turning point (`k/2 < r < 2k`) it is of Airy size `k^{-1/3}`,
//! and past `2k` it oscillates with amplitude `r^{-1/2}`. The constants in
//! front of each envelope are not known explicitly, so they are fitted from
//! sweeps and reported rather than assumed.

use statrs::function::gamma::ln_gamma;

use super::bessel::j;
use crate::error::{ensure, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegimeTag {
    BelowTransition,
    Transition,
    Oscillatory,
}

impl RegimeTag {
    pub const ALL: [RegimeTag; 3] = [RegimeTag::BelowTransition, RegimeTag::Transition, RegimeTag::Oscillatory];

    pub fn name(self) -> &'static str {
        match self {
            RegimeTag::BelowTransition => "below",
            RegimeTag::Transition => "transition",
            RegimeTag::Oscillatory => "oscillatory",
        }
    }
}

/// `r ≤ k/2` is below the transition, `r ≥ 2k` oscillatory, the rest is
/// the transition zone. Every `r ≥ 0` lands in exactly one regime.
pub fn classify_regime(k: f64, r: f64) -> RegimeTag {
    if r <= 0.5 * k {
        RegimeTag::BelowTransition
    } else if r >= 2.0 * k {
        RegimeTag::Oscillatory
    } else {
        RegimeTag::Transition
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub regime: RegimeTag,
    pub lhs: f64,
    /// The envelope without the leading constant.
    pub rhs_envelope: f64,
    pub constant_used: f64,
    pub satisfied: bool,
}

/// Shape of the bound in each regime, leading constant omitted:
/// `e^{-c(k+r)}`, `k^{-1/3}(k^{-1/3}|r-k|+1)^{-1/4}` and `r^{-1/2} + r^{-1}`.
pub fn regime_envelope(k: f64, r: f64, c: f64) -> f64 {
    match classify_regime(k, r) {
        RegimeTag::BelowTransition => (-c * (k + r)).exp(),
        RegimeTag::Transition => {
            let k3 = k.cbrt();
            (1.0 / k3) * ((r - k).abs() / k3 + 1.0).powf(-0.25)
        }
        RegimeTag::Oscillatory => r.powf(-0.5) + 1.0 / r,
    }
}

pub fn check_regime_bound(k: u32, r: f64, big_c: f64, small_c: f64) -> Result<BoundReport> {
    ensure!(k >= 2, Domain, "regime bounds are checked for k >= 2, got {k}");
    ensure!(r > 0.0 && r.is_finite(), Domain, "r must be positive, got {r}");
    ensure!(big_c > 0.0 && small_c > 0.0, Domain, "constants must be positive");
    let kf = k as f64;
    let lhs = j(kf, r).abs();
    let rhs_envelope = regime_envelope(kf, r, small_c);
    Ok(BoundReport {
        regime: classify_regime(kf, r),
        lhs,
        rhs_envelope,
        constant_used: big_c,
        satisfied: lhs <= big_c * rhs_envelope,
    })
}

/// The argument lattice used by regime sweeps: log-spaced points on
/// `[r_min, r_max]` plus a dense band around the turning point `r = k`.
pub fn regime_lattice(k: f64, r_min: f64, r_max: f64, per_decade: usize) -> Vec<f64> {
    let decades = (r_max / r_min).log10();
    let count = (decades * per_decade as f64).ceil() as usize;
    let mut rs: Vec<f64> = (0..=count)
        .map(|i| r_min * 10f64.powf(decades * i as f64 / count as f64))
        .collect();
    for i in 0..=200 {
        rs.push(0.5 * k + 1.5 * k * i as f64 / 200.0);
    }
    rs.retain(|r| *r > 0.0);
    rs.sort_by(f64::total_cmp);
    rs.dedup();
    rs
}

/// Fitted constants for one regime over a sweep in `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeFit {
    pub regime: RegimeTag,
    /// Decay rate used for the sub-transition envelope (unused elsewhere).
    pub small_c: f64,
    /// Smallest admissible constant for each `k`.
    pub per_k: Vec<(u32, f64)>,
    /// The fitted constant: the largest per-`k` value.
    pub big_c: f64,
    /// Ratio of the largest to the smallest per-`k` constant.
    pub spread: f64,
    /// Lattice points violating the bound at the fitted constants.
    pub violations: usize,
}

type Samples = Vec<(f64, f64)>;

fn per_k_constants(regime: RegimeTag, ks: &[u32], samples: &[Samples], small_c: f64) -> Vec<(u32, f64)> {
    ks.iter()
        .zip(samples)
        .map(|(&k, rs)| {
            let kf = k as f64;
            let worst = rs
                .iter()
                .filter(|(r, _)| classify_regime(kf, *r) == regime)
                .map(|(r, v)| v / regime_envelope(kf, *r, small_c))
                .fold(0.0, f64::max);
            (k, worst)
        })
        .collect()
}

fn spread(per_k: &[(u32, f64)]) -> f64 {
    let vals: Vec<f64> = per_k.iter().map(|p| p.1).filter(|v| *v > 0.0).collect();
    let max = vals.iter().cloned().fold(0.0, f64::max);
    let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    max / min
}

/// Fit the regime constants over `ks` and the supplied argument lattices.
///
/// For the exponential regime the decay rate `c` is chosen from a scan over
/// `(0, 0.5]` to make the per-`k` constants as uniform as possible.
pub fn fit_regime_constants(ks: &[u32], lattices: &[Vec<f64>]) -> Vec<RegimeFit> {
    let samples: Vec<Samples> = ks
        .iter()
        .zip(lattices)
        .map(|(&k, rs)| rs.iter().map(|&r| (r, j(k as f64, r).abs())).collect())
        .collect();
    RegimeTag::ALL
        .iter()
        .map(|&regime| {
            let small_c = if regime == RegimeTag::BelowTransition {
                (1..=500)
                    .map(|i| i as f64 * 1e-3)
                    .map(|c| (c, spread(&per_k_constants(regime, ks, &samples, c))))
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .map(|p| p.0)
                    .unwrap_or(0.2)
            } else {
                0.2
            };
            let per_k = per_k_constants(regime, ks, &samples, small_c);
            let big_c = per_k.iter().map(|p| p.1).fold(0.0, f64::max) * (1.0 + 1e-12);
            let violations = ks
                .iter()
                .zip(lattices)
                .map(|(&k, rs)| {
                    rs.iter()
                        .filter(|&&r| classify_regime(k as f64, r) == regime)
                        .filter(|&&r| !check_regime_bound(k, r, big_c, small_c).map(|b| b.satisfied).unwrap_or(false))
                        .count()
                })
                .sum();
            RegimeFit { regime, small_c, spread: spread(&per_k), per_k, big_c, violations }
        })
        .collect()
}

/// `r^k / (2^k Γ(k+½) Γ(½)) · (1 + 1/(k+½))`, the small-argument envelope
/// of `|J_k(r)|` without its constant.
pub fn small_argument_envelope(k: f64, r: f64) -> f64 {
    let log = k * (0.5 * r).ln() - ln_gamma(k + 0.5) - ln_gamma(0.5);
    log.exp() * (1.0 + 1.0 / (k + 0.5))
}
