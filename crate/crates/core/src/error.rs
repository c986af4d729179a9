use thiserror::Error;

/// Errors reported by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} is outside {range}")]
    Domain {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("parameters outside (α,β,k) region: {0}")]
    Admissibility(String),
    #[error("grid too fine for factorization; use jitter/regularization flag ({0})")]
    NotPositiveDefinite(String),
    #[error("degenerate sample")]
    DegenerateSample,
    #[error("breakpoint {0} is off the grid beyond the snap tolerance")]
    OffGrid(f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("stochastic convolution is not well defined: {0}")]
    Diverged(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_hurst(h: f64) -> Result<()> {
    if h > 0.0 && h < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "H",
            value: h,
            range: "(0, 1)",
        })
    }
}
