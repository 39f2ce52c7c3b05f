use thiserror::Error;

/// Errors produced by space construction, kernel assembly, solvers and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point index {index} out of range for space with {n} points")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("target set is empty")]
    EmptyTargetSet,

    #[error("exact cover search exceeded the node cap of {cap} nodes")]
    SearchCapExceeded { cap: u64 },

    #[error("solver failure: {0}")]
    SolverFailure(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("schema error in {path}: {message}")]
    Schema { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
