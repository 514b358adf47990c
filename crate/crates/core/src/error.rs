use thiserror::Error;

/// Errors raised by the engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("blocks must be nonempty")]
    EmptyBlock,

    #[error("malformed symbol {text:?}: {reason}")]
    BadSymbol { text: String, reason: String },

    #[error(
        "resource limit exceeded in dimension {dimension}: {cells} cells need ~{estimated_bytes} bytes, budget is {budget_bytes} bytes"
    )]
    ResourceLimit {
        dimension: usize,
        cells: u64,
        estimated_bytes: u64,
        budget_bytes: u64,
    },

    #[error("chain vector {index} is not a cycle")]
    NotACycle { index: usize },

    #[error("chain vector {index} has dimension {found}, expected {expected}")]
    ChainDimension {
        index: usize,
        expected: usize,
        found: usize,
    },

    #[error("wheel {0} has fewer than two disks and no first homology")]
    WheelTooSmall(String),

    #[error("wheel {0} is not a factor of the product")]
    NotAFactor(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("invalid tensor factor indices ({i}, {j}) for r = {r}")]
    InvalidFactor { i: usize, j: usize, r: usize },

    #[error("invalid bound input: {0}")]
    InvalidBound(String),

    #[error("torus construction produced an invalid product: {0}")]
    Construction(String),

    #[error("degree mismatch: product has degree {found}, top degree is {expected}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("unknown space: {0}")]
    UnknownSpace(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
