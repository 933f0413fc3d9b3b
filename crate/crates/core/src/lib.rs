pub mod counterexample;
pub mod error;
pub mod hankel;
pub mod harmonics;
pub mod maximal;
pub mod propagator;
pub mod quadrature;
pub mod report;
pub mod specfun;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/bessel.md")]
    mod bessel {}
    #[doc = include_str!("../../../book/src/hankel.md")]
    mod hankel {}
    #[doc = include_str!("../../../book/src/propagator.md")]
    mod propagator {}
    #[doc = include_str!("../../../book/src/sobolev.md")]
    mod sobolev {}
    #[doc = include_str!("../../../book/src/maximal.md")]
    mod maximal {}
    #[doc = include_str!("../../../book/src/counterexample.md")]
    mod counterexample {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
