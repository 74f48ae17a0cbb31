use thiserror::Error;

/// Crate-wide error type. Structures share one enum because callers routinely
/// compose geometry, structure, and I/O operations in a single pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("object {id} does not belong to shape class {class}")]
    ShapeClassMismatch { id: u64, class: String },
    #[error("duplicate object id {0}")]
    DuplicateId(u64),
    #[error("unknown object id {0}")]
    UnknownId(u64),
    #[error("instance too large for exact solver: {len} objects (max {max})")]
    TooLargeForExact { len: usize, max: usize },
    #[error("separator requires a nonempty first set")]
    EmptySeparatorInput,
    #[error("mix schedule exhausted: all planned steps already emitted")]
    MixExhausted,
    #[error("mix input set is not internally disjoint: objects {0} and {1} intersect")]
    MixNotDisjoint(u64, u64),
    #[error("epsilon {value} outside valid range {range}")]
    InvalidEpsilon { value: f64, range: &'static str },
    #[error("feasibility violation in round {round}: {message}")]
    Feasibility { round: u64, message: String },
    #[error("invalid workload: {0}")]
    InvalidWorkload(String),
    #[error("trace violation at line {line}: {message}")]
    TraceViolation { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
