use thiserror::Error;

/// Errors raised by the group, norm, field and operator routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("evaluation at the group identity is undefined for {0}")]
    AtIdentity(&'static str),
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error(
        "phase under-resolved: {max_increment:.3} rad per cell exceeds {limit:.3}; largest feasible {scale_name} is {max_feasible:.4}"
    )]
    Nyquist {
        max_increment: f64,
        limit: f64,
        scale_name: &'static str,
        max_feasible: f64,
    },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

pub type Result<T> = std::result::Result<T, Error>;
