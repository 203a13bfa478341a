use num_complex::Complex64;
use thiserror::Error;

/// Everything that can go wrong in the library and the command-line driver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("coupling matrix is not unitary (max |U*U - I| = {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("not supported: {0}")]
    NotSupported(String),

    #[error("momentum {k} lies within tolerance of a pole of the regular part")]
    NearPole { k: Complex64 },

    #[error("linear system is singular at k = {k}")]
    Singular { k: Complex64 },

    #[error("accuracy loss: {0}")]
    AccuracyLoss(String),

    #[error("the coupling does not connect the core to the leads")]
    Decoupled,

    #[error("function vanishes or is singular on the contour near {at}")]
    OnContour { at: Complex64 },

    #[error("root isolation failed: {0}")]
    Unresolved(String),

    #[error("refused: {0}")]
    Refused(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True when the failure comes from bad input rather than a numerical breakdown.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::InvalidParameter(_)
                | Error::NotUnitary { .. }
                | Error::NotSupported(_)
                | Error::Refused(_)
                | Error::Config(_)
                | Error::Json(_)
                | Error::Decoupled
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
