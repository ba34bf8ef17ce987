use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the state algebra, the scenarios and the file format.
///
/// Subsystem indices are stored 0-based and rendered 1-based.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid Hilbert structure: {0}")]
    InvalidStructure(String),

    #[error("structure mismatch: {0}")]
    StructureMismatch(String),

    #[error("degenerate trace: keep set must be a non-empty proper subset of the {subsystems} subsystems")]
    DegenerateTrace { subsystems: usize },

    #[error("operator is not unitary (max deviation of U^dagger U from identity: {deviation:e})")]
    NonUnitary { deviation: f64 },

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("operator is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("operator trace is {trace}, expected 1")]
    BadTrace { trace: f64 },

    #[error("operator is not positive (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("operator is not idempotent (max deviation of Q^2 from Q: {deviation:e})")]
    NotIdempotent { deviation: f64 },

    #[error("subject event has zero probability (p = {probability:e})")]
    ZeroProbabilityEvent { probability: f64 },

    #[error("subject and object are the same subsystem ({})", .0 + 1)]
    SubjectObjectOverlap(usize),

    #[error("events do not form a partition of identity: {0}")]
    NotAPartition(String),

    #[error("degenerate slit: {0}")]
    DegenerateSlit(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}
