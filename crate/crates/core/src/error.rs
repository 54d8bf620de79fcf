use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("graph has no nodes")]
    EmptyGraph,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("coordinate layout required but absent")]
    LayoutMissing,

    #[error("no path between {a} and {b}")]
    Unreachable { a: u32, b: u32 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("every decoder state is unreachable at t={t}")]
    AllStatesUnreachable { t: usize },

    #[error("random walk stuck at isolated node {node} at t={t}")]
    IsolatedNode { node: u32, t: usize },

    #[error("coarse path breaks super-graph adjacency at t={t}")]
    DisconnectedCoarsePath { t: usize },

    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("estimator variance guard tripped: {0}")]
    VarianceGuard(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
