use thiserror::Error;

use crate::graph::VertexId;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid vertex id {id} (graph has {n} vertices)")]
    InvalidVertex { id: usize, n: usize },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("capacity exceeded: {what} has size {size}, exact routine is limited to {limit}")]
    Capacity {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("degenerate metric: distinct vertices {0} and {1} are at distance zero")]
    DegenerateMetric(VertexId, VertexId),

    #[error("protocol violation: {0}")]
    Protocol(String),

    #[error("disconnected instance: frontier exhausted before reaching the goal")]
    Disconnected,

    #[error("model violation: {0}")]
    ModelViolation(String),

    #[error("generation failed: {0}")]
    Generation(String),

    #[error("parse error at {context}: {message}")]
    Parse { context: String, message: String },

    #[error("validation error at {field}: {message}")]
    Validation { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
