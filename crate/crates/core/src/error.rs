use std::path::PathBuf;

/// Errors produced anywhere in the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (max |m - m^dagger| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("trace is {trace:.12}, expected 1")]
    InvalidTrace { trace: f64 },

    #[error("operator is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    Negativity { min_eigenvalue: f64 },

    #[error("state vector has norm {norm:.12}, expected 1")]
    Norm { norm: f64 },

    #[error("measurement intensity {0} outside [0, 1]")]
    EpsilonOutOfRange(f64),

    #[error("coupling strength angle {0} outside [0, pi/2]")]
    StrengthOutOfRange(f64),

    #[error("operation requires a nondegenerate observable (all projectors rank 1)")]
    DegenerateObservable,

    #[error("invalid observable: {0}")]
    InvalidObservable(String),

    #[error("invalid probability vector: {0}")]
    InvalidProbabilities(String),

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("invalid config field `{field}`: {message}")]
    InvalidConfig { field: String, message: String },

    #[error("no records to emit")]
    EmptyRecords,

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.into(),
            message: message.into(),
        }
    }
}
