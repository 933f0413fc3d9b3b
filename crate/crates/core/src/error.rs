use thiserror::Error;

/// Everything that can go wrong inside the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("convergence failure: {0}")]
    ConvergenceFailure(String),

    #[error("quadrature does not resolve the integrand: {0}")]
    Resolution(String),

    #[error("field is not aligned with the grid: {0}")]
    GridMismatch(String),

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("input has angular energy above the maximal degree: {0}")]
    DegreeOverflow(String),

    #[error("dyadic band outside the spectral grid: {0}")]
    BandOutsideGrid(String),

    #[error("energy outside the resolvable dyadic range: {0}")]
    SpectralRange(String),

    #[error("requested range exceeds the grid: {0}")]
    GridRange(String),

    #[error("outside the asymptotic regime: {0}")]
    AsymptoticRegime(String),

    #[error("step size rejected: {0}")]
    StepSize(String),

    #[error("grid does not cover the support: {0}")]
    GridCoverage(String),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! ensure {
    ($cond:expr, $variant:ident, $($fmt:tt)+) => {
        if !($cond) {
            return Err($crate::error::Error::$variant(format!($($fmt)+)));
        }
    };
}
pub(crate) use ensure;
