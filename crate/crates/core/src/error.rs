use thiserror::Error;

use crate::hypergraph::Vertex;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid query: {0}")]
    InvalidQuery(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate parameters: {0}")]
    Degenerate(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("sequence of length {len} cannot be an {ell}-path in a {k}-graph")]
    Arity { len: usize, k: usize, ell: usize },

    #[error("not a path in host: window {window} maps to missing edge {edge:?}")]
    NotAPathInHost { window: usize, edge: Vec<Vertex> },

    #[error("end {left:?} does not match beginning {right:?}")]
    EndMismatch { left: Vec<Vertex>, right: Vec<Vertex> },

    #[error("vertex {0} is shared outside the joining end")]
    VertexOverlap(Vertex),

    #[error("uniformity mismatch: expected {expected}, found {found}")]
    UniformityMismatch { expected: usize, found: usize },

    #[error("cannot absorb: edge {edge:?} is missing from the host")]
    CannotAbsorb { edge: Vec<Vertex> },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("gadget construction failed: {0}")]
    Construction(String),

    #[error("nothing to connect")]
    NothingToConnect,

    #[error("no connecting path from the end of path {from} to path {to}{}", if *.exhausted { "" } else { " within budget" })]
    Unconnectable { from: usize, to: usize, exhausted: bool },

    #[error("density is undefined for hypergraphs on fewer than two vertices")]
    UndefinedDensity,

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
