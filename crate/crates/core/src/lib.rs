//! k-uniform hypergraphs and the machinery for building Hamilton ℓ-cycles in
//! randomly perturbed hypergraphs: absorbing and connecting gadgets, exact and
//! heuristic searches, the multi-round absorbing pipeline, and closed-form
//! evaluators plus a Monte Carlo harness for threshold experiments.
//!
//! Vertices are `u32` indices `0..n`. Gadget vertices are 1-based labels.

pub mod analysis;
pub mod error;
pub mod gadgets;
pub mod hypergraph;
pub mod paths;
pub mod rng;
pub mod search;

pub use error::{Error, Result};
pub use hypergraph::{KUniformHypergraph, PerturbationParams, Vertex, VertexSet};
pub use paths::{EllCycle, EllPath, OrderedTuple};
