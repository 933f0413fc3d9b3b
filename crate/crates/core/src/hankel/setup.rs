use crate::error::{ensure, Result};
use crate::specfun::BesselOrder;

/// Dimension `n` and coupling `a` of the operator `-Δ + a/|x|²`.
///
/// On degree-`k` harmonics the operator acts radially with Bessel order
/// `ν(k) = √(μ(k)² + a)`, where `μ(k) = (n-2)/2 + k` is the free order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialSetup {
    n: usize,
    a: f64,
}

impl PotentialSetup {
    /// Requires `n ≥ 2` and `a > -(n-2)²/4`.
    pub fn new(n: usize, a: f64) -> Result<Self> {
        ensure!(n >= 2, Domain, "dimension must be >= 2, got {n}");
        ensure!(a.is_finite(), Domain, "coupling must be finite");
        let critical = -((n as f64 - 2.0).powi(2)) / 4.0;
        ensure!(a > critical, Domain, "coupling a = {a} must exceed -(n-2)^2/4 = {critical}");
        Ok(Self { n, a })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// `(n-2)/2`, the power relating radial Hankel and Fourier conventions.
    pub fn alpha(&self) -> f64 {
        (self.n as f64 - 2.0) / 2.0
    }

    pub fn mu(&self, k: usize) -> f64 {
        self.alpha() + k as f64
    }

    pub fn nu(&self, k: usize) -> f64 {
        let mu = self.mu(k);
        (mu * mu + self.a).sqrt()
    }

    /// The same dimension without the potential.
    pub fn free(&self) -> Self {
        Self { n: self.n, a: 0.0 }
    }

    /// `1 + min{(n-2)/2, √((n-2)²/4 + a)}`, the upper limit for the Sobolev
    /// exponents in the norm equivalence and the almost-orthogonality decay.
    pub fn critical_exponent(&self) -> f64 {
        1.0 + self.alpha().min(self.nu(0))
    }
}

/// `ν(k) = √(((n-2)/2 + k)² + a)`.
///
/// ```
/// use invsq::hankel::{order_of_mode, PotentialSetup};
/// let s = PotentialSetup::new(4, -0.75).unwrap();
/// assert!((order_of_mode(&s, 0).unwrap().value() - 0.5).abs() < 1e-15);
/// ```
pub fn order_of_mode(setup: &PotentialSetup, k: usize) -> Result<BesselOrder> {
    let mu = setup.mu(k);
    let sq = mu * mu + setup.a;
    ensure!(sq > 0.0, Domain, "mu(k)^2 + a = {sq} is not positive for k = {k}");
    BesselOrder::new(sq.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_examples() {
        let cases = [(3, 0.0, 0.5), (2, 1.0, 1.0), (4, -0.75, 0.5)];
        for (n, a, expect) in cases {
            let s = PotentialSetup::new(n, a).unwrap();
            assert!((order_of_mode(&s, 0).unwrap().value() - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_subcritical_coupling() {
        assert!(PotentialSetup::new(2, -0.5).is_err());
        assert!(PotentialSetup::new(3, -0.25).is_err());
        assert!(PotentialSetup::new(3, -0.2499).is_ok());
        assert!(PotentialSetup::new(1, 0.0).is_err());
    }
}
