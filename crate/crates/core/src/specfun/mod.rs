//! Bessel functions of the first kind and the estimates built on them.

mod bessel;
mod dyadic;
mod hypergeometric;
mod regimes;

pub use bessel::{bessel_j, bessel_j_eval, bessel_j_quadrature, j, BesselOrder, BesselValue, Method, UNDERFLOW};
pub use hypergeometric::{hyp2f1, rgamma, weber_schafheitlin};
pub use dyadic::{dyadic_l2, dyadic_quad_points, MIN_POINTS_PER_PERIOD};
pub use regimes::{
    check_regime_bound, classify_regime, fit_regime_constants, regime_envelope, regime_lattice, small_argument_envelope,
    BoundReport, RegimeFit, RegimeTag,
};
