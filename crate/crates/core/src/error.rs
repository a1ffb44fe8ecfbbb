use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("image sequence is not a permutation")]
    NotAPermutation,
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("degree {0} outside the supported range 1..=1000000")]
    DegreeCap(usize),
    #[error("point {0} out of range for degree {1}")]
    PointOutOfRange(usize, usize),
    #[error("malformed partition: {0}")]
    MalformedPartition(String),
    #[error("generator images do not extend to a homomorphism: {0}")]
    NotAHomomorphism(String),
    #[error("element is not in the group")]
    NotInGroup,
    #[error("{0}")]
    TooLarge(String),
    #[error("inverse of zero")]
    ZeroInverse,
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("dimension mismatch: {0}")]
    Shape(String),
    #[error("form is degenerate on the subspace (radical of dimension {0})")]
    Degenerate(usize),
    #[error("unsupported q = {q}: {reason}")]
    UnsupportedQ { q: u64, reason: String },
    #[error("construction failed at {stage}: {detail}")]
    Construction { stage: String, detail: String },
    #[error("graph size guard: {0}")]
    Guard(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
