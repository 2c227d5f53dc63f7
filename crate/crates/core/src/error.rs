use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate dimension: 2J = {0} gives a trivial Hilbert space")]
    DegenerateDimension(u32),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not unitary (max deviation {0:e})")]
    NotUnitary(f64),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("populations are not a probability vector: {0}")]
    NotNormalized(String),

    #[error(
        "rotation axis does not match the initial state (<n.J> = {found}, expected {expected})"
    )]
    AxisMismatch { expected: f64, found: f64 },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code for the CLI: 1 for configuration problems, 2 for
    /// numerical invariant violations.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Invariant(_)
            | Error::NotHermitian(_)
            | Error::NotUnitary(_)
            | Error::NotNormalized(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
