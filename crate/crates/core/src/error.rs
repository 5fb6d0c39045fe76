use thiserror::Error;

/// Errors raised by the numerical operations of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("integral diverges: {0}")]
    Divergent(&'static str),

    #[error("quadrature did not converge (error estimate {err_estimate:e} after {evaluations} evaluations)")]
    NotConverged { err_estimate: f64, evaluations: usize },

    #[error("point {re} + {im}i lies outside the closed sector")]
    OutsideSector { re: f64, im: f64 },

    #[error("point {re} + {im}i is a singular corner of the kernel")]
    SingularCorner { re: f64, im: f64 },

    #[error("point lies outside the domain of univalence (distance {distance:e})")]
    Exterior { distance: f64 },

    #[error("point lies within {distance:e} of a pole vertex")]
    NearP { distance: f64 },

    #[error("operation not applicable: {0}")]
    NotApplicable(String),

    #[error("continuation failed at path parameter {tau}: {reason}")]
    ContinuationFailed { tau: f64, reason: &'static str },

    #[error("series estimate unavailable: {0}")]
    InsufficientCoefficients(String),
}

impl Error {
    /// True for failures of the numerical machinery itself, as opposed to
    /// domain errors caused by the caller's input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotConverged { .. } | Error::ContinuationFailed { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
