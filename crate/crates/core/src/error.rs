use thiserror::Error;

/// Errors raised by the certification library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("distance matrix is not symmetric at ({i}, {j})")]
    AsymmetricMatrix { i: usize, j: usize },

    #[error("negative distance at ({i}, {j})")]
    NegativeDistance { i: usize, j: usize },

    #[error("non-finite distance at ({i}, {j})")]
    NonFiniteDistance { i: usize, j: usize },

    #[error("nonzero diagonal entry at ({i}, {i})")]
    NonzeroDiagonal { i: usize },

    #[error("weight of point {i} is not strictly positive and finite")]
    NonpositiveWeight { i: usize },

    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("index {index} out of range for a space of {n} points")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("set distance needs two non-empty sets")]
    EmptySet,

    #[error("anticlique enumeration exceeded its budget after {nodes} nodes")]
    BudgetExceeded { nodes: u64 },

    #[error("max-cluster search exceeded its budget after {nodes} nodes")]
    ClusterBudgetExceeded { nodes: u64, best_so_far: Vec<usize> },

    #[error("instance too large for the brute-force oracle: n = {n}, limit = {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("denominator bound {bound} is too small")]
    DenominatorBoundTooSmall { bound: u64 },

    #[error("parse error at {context}: {message}")]
    Parse { context: String, message: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParams(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
