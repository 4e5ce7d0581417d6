use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("graph is not connected")]
    Disconnected,

    #[error("granularity {granularity} does not divide the length {length} of edge `{edge}`")]
    InvalidGranularity {
        granularity: String,
        edge: String,
        length: String,
    },

    #[error("divisor is not supported on the grid: {0}")]
    InvalidSupport(String),

    #[error("invalid piecewise-linear function: {0}")]
    InvalidFunction(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported graph: {0}")]
    UnsupportedGraph(String),

    #[error("precision: {0}")]
    Precision(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A combinatorial statement that the computation was expected to confirm did not hold.
    #[error("check failed: {0}")]
    CheckFailed(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
