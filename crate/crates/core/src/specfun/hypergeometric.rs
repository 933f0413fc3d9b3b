use statrs::function::gamma::{gamma, ln_gamma};

use crate::error::{ensure, Result};

/// Gauss hypergeometric series `₂F₁(a, b; c; z)` for `|z| ≤ 0.9`, `c` not a
/// non-positive integer.
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    ensure!(z.abs() <= 0.9, Domain, "series for 2F1 needs |z| <= 0.9, got {z}");
    ensure!(!(c <= 0.0 && c == c.floor()), Domain, "c = {c} is a pole of 2F1");
    let mut term = 1.0;
    let mut sum = 1.0;
    for m in 0..4000 {
        let mf = m as f64;
        term *= (a + mf) * (b + mf) / ((c + mf) * (mf + 1.0)) * z;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() || term == 0.0 {
            return Ok(sum);
        }
    }
    Err(crate::error::Error::ConvergenceFailure(format!("2F1({a}, {b}; {c}; {z}) did not converge")))
}

/// `1/Γ(x)`, zero at the poles.
pub fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        0.0
    } else {
        1.0 / gamma(x)
    }
}

/// `∫_0^∞ J_p(xt) J_q(yt) t dt` for `x ≠ y`, the Weber–Schafheitlin
/// discontinuous integral at exponent one. It is symmetric under swapping
/// `(p, x)` with `(q, y)` and decays like `(min/max)^{order of the smaller
/// argument}` away from the diagonal.
pub fn weber_schafheitlin(p: f64, x: f64, q: f64, y: f64) -> Result<f64> {
    ensure!(x > 0.0 && y > 0.0 && x != y, Domain, "arguments must be positive and distinct, got {x}, {y}");
    // Larger argument a with order m, smaller argument b with order v.
    let (m, a, v, b) = if x > y { (p, x, q, y) } else { (q, y, p, x) };
    let z = (b / a).powi(2);
    ensure!(z <= 0.9, Domain, "arguments {x} and {y} too close for the series");
    let h = 0.5 * (m + v) + 1.0;
    let log_mag = v * b.ln() - (v + 2.0) * a.ln() + ln_gamma(h) - ln_gamma(v + 1.0) + 2f64.ln();
    let f = hyp2f1(h, 0.5 * (v - m) + 1.0, v + 1.0, z)?;
    Ok(log_mag.exp() * rgamma(0.5 * (m - v)) * f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate_oscillatory;
    use crate::specfun::j;

    #[test]
    fn hyp2f1_elementary_cases() {
        // 2F1(1, 1; 2; z) = -ln(1-z)/z
        let z = 0.37;
        assert!((hyp2f1(1.0, 1.0, 2.0, z).unwrap() + (1.0 - z).ln() / z).abs() < 1e-14);
        // 2F1(a, b; b; z) = (1-z)^{-a}
        assert!((hyp2f1(0.7, 2.3, 2.3, -0.5).unwrap() - 1.5f64.powf(-0.7)).abs() < 1e-14);
    }

    #[test]
    fn equal_orders_are_orthogonal() {
        assert_eq!(weber_schafheitlin(1.5, 2.0, 1.5, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn matches_damped_quadrature() {
        // Damping by e^{-εt²} and letting ε → 0 recovers the integral; at
        // ε = 1e-4 the tail beyond t = 400 is below 1e-7 and the damping
        // shifts the value by O(ε).
        let (p, x, q, y) = (0.5, 2.0, 1.118033988749895, 0.6);
        let eps = 1e-4;
        let num = integrate_oscillatory(|t| j(p, x * t) * j(q, y * t) * t * (-eps * t * t).exp(), 0.0, 450.0, 1.0);
        let exact = weber_schafheitlin(p, x, q, y).unwrap();
        assert!((num - exact).abs() < 2e-3 * exact.abs(), "{num} vs {exact}");
        assert_eq!(weber_schafheitlin(p, x, q, y).unwrap(), weber_schafheitlin(q, y, p, x).unwrap());
    }
}
