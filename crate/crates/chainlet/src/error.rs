use thiserror::Error;

/// Errors raised by the chainlet operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("grade mismatch: expected {expected}, found {found}")]
    GradeMismatch { expected: usize, found: usize },
    #[error("degenerate cell: {0}")]
    DegenerateCell(String),
    #[error("invalid index: {0}")]
    InvalidIndex(String),
    #[error("missing jacobian for map `{0}`")]
    MissingJacobian(String),
    #[error("decomposition does not realize the target ({} residual terms)", residual.len())]
    NotRealized { residual: Vec<String> },
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

pub(crate) fn check_grade(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::GradeMismatch { expected, found })
    }
}
