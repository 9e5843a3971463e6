use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected} amplitudes, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("lattice too large for dense construction: N = {vertices} exceeds {limit}")]
    LatticeTooLarge { vertices: usize, limit: usize },

    #[error("phase is singular at (k, l) = ({k}, {l}): sin(phi) = {sin_phi:e}")]
    SingularPoint { k: f64, l: f64, sin_phi: f64 },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
