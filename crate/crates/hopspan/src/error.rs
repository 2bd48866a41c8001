use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty graph")]
    EmptyGraph,
    #[error("invalid weight: {0}")]
    InvalidWeight(String),
    #[error("vertex id {0} out of range (n = {1})")]
    VertexOutOfRange(u64, u32),
    #[error("edge id {0} out of range (m = {1})")]
    EdgeOutOfRange(u32, u32),
    #[error("use weighted_spanner")]
    UseWeightedSpanner,
    #[error("buckets not well separated: {0}")]
    BucketsNotSeparated(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("artifact does not match graph")]
    ArtifactMismatch,
    #[error("numeric overflow in {0}")]
    Overflow(&'static str),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
