//! Radial grids, the order-ν Hankel transform and the radial operator `A_ν`.
//!
//! The transform of a radial profile `f` is
//! `(H_ν f)(ρ) = ∫_0^∞ (rρ)^{-(n-2)/2} J_ν(rρ) f(r) r^{n-1} dr`.
//! It is its own inverse, an isometry of `L²(r^{n-1}dr)`, self-adjoint, and
//! it turns `A_ν` into multiplication by `ρ²`. On a grid every one of these
//! holds up to quadrature and truncation error, which the tests measure.

mod field;
mod grid;
mod operator;
mod setup;
mod transform;

pub use field::{relative_l2, weighted_norm_sqr, ModeField, Space};
pub use grid::{make_grid, GridScheme, RadialGrid};
pub use operator::{apply_a_nu, fd_weights};
pub use setup::{order_of_mode, PotentialSetup};
pub use transform::{
    clear_kernel_cache, ensure_space, hankel_transform, hankel_transform_between, kernel, GridPair, HankelKernel,
    TAIL_WARNING,
};
