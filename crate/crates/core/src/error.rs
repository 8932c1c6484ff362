use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("graph has no edges")]
    EmptyGraph,

    #[error("vertex index {index} out of range for graph with {vertex_count} vertices")]
    VertexOutOfRange { index: usize, vertex_count: usize },

    #[error("unknown vertex label {0:?}")]
    UnknownLabel(String),

    #[error("vertex {0} has degree 0; the walk is undefined there")]
    IsolatedVertex(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("seed {0} carries no mass; truncation threshold is undefined")]
    ZeroSeedMass(usize),

    #[error("conductance is undefined for a set with zero volume on either side")]
    UndefinedConductance,

    #[error("graph has {vertex_count} vertices, exhaustive search is limited to {limit}")]
    TooLarge { vertex_count: usize, limit: usize },

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
