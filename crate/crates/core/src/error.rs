use thiserror::Error;

/// Every fallible operation in the crate reports one of these.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    Dimension {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("invalid fundamental symmetry: {0}")]
    InvalidSymmetry(String),
    #[error("spectral parameter must be nonreal, got {0}")]
    RealParameter(String),
    #[error("invalid boundary pair: {0}")]
    InvalidPair(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("standard unitary conditions violated: {0}")]
    NotStdUnitary(String),
    #[error("unknown theorem id `{0}`")]
    UnknownTheorem(String),
    #[error("generator gave up after {0} attempts: {1}")]
    RetryExhausted(usize, String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension {
            context,
            expected,
            found,
        })
    }
}
