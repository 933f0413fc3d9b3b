//! Spherical harmonics on `S^{n-1}`, dyadic band projectors and the
//! Sobolev norm read off the perturbed Hankel transform.

mod bands;
mod equivalence;
mod expansion;
mod sphere;

pub use bands::{
    adjoint_orthogonality_norm, almost_orthogonality_norm, band_of, beta, beta_j, chi, composed_band_norm, projector,
    sobolev_norm_fourier, sobolev_norm_hankel, DyadicIndex, ProjectorKind, SPECTRAL_RANGE_TOLERANCE,
};
pub(crate) use bands::smooth_step;
pub use equivalence::{band_limited_profile, norm_equivalence_scan};
pub use expansion::{analyze, analyze_slice, angular_fractional_power, angular_multiplier, synthesize, DEGREE_TAIL_TOLERANCE};
pub use sphere::{dim_harmonic, AngularGrid, HarmonicBasis, HarmonicIndex};
