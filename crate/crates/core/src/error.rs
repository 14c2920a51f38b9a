use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),

    #[error("endpoint {vertex} out of range for {vertex_count} vertices")]
    EndpointOutOfRange { vertex: usize, vertex_count: usize },

    #[error("edge index {index} out of range (graph has {m} edges)")]
    EdgeOutOfRange { index: usize, m: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("coloring has length {got}, expected {expected}")]
    ColoringLength { got: usize, expected: usize },

    #[error("color {color} at vertex {vertex} is not below {c}")]
    ColorOutOfRange { vertex: usize, color: u32, c: u32 },

    #[error("enumeration needs {states} states, cap is {cap}")]
    CapExceeded { states: f64, cap: u64 },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
