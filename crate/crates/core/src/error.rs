use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("2-density undefined: graph has {0} edge(s), at least 2 required")]
    TooFewEdges(usize),
    #[error("graph has {found} vertices, exhaustive cap is {cap}; use the flow solver")]
    OverCap { found: usize, cap: usize },
    #[error("gadget kind mismatch: expected {expected}, got {found}")]
    KindMismatch { expected: String, found: String },
    #[error("labeling contradiction at vertex {0}")]
    LabelingContradiction(usize),
    #[error("vertex set size {size} not divisible by t = {t}")]
    NotDivisible { size: usize, t: usize },
    #[error("malformed hyperedge {index}: {reason}")]
    MalformedEdge { index: usize, reason: String },
    #[error("template construction failed: {0}")]
    Template(String),
    #[error("pipeline phase `{phase}` failed: {reason}")]
    Phase { phase: String, reason: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
