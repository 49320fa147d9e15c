use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("vertex {v} out of range for graph with {n} vertices")]
    VertexOutOfRange { v: usize, n: usize },

    #[error("edge weight must be positive, got {w}")]
    NonPositiveWeight { w: f64 },

    #[error("matrix is not positive definite; for a reduced Laplacian this means the graph is disconnected")]
    NotPositiveDefinite,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("base graph must be connected")]
    Disconnected,

    #[error("budget k = {k} exceeds candidate count c = {c}")]
    BudgetTooLarge { k: usize, c: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("oracle guard exceeded: {0}")]
    GuardExceeded(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("inconsistent certificate inputs: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
