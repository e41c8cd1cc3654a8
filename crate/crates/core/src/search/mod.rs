//! Exact and heuristic searches: Hamilton ℓ-cycles at small scale, greedy path
//! tilings, connecting paths, perfect matchings, and the multi-round absorbing
//! pipeline.
//!
//! Budgets count search nodes, so outcomes do not depend on machine speed
//! unless a wall-clock limit is set explicitly.

mod connect;
mod exact;
mod fill;
mod matching;
mod pipeline;
mod tiling;

use std::time::Duration;

use serde::{Deserialize, Serialize};

pub use connect::{
    connect_paths_into_cycle, connect_paths_into_path, connector_interior_sizes, find_connecting_path,
    find_connector,
};
pub use exact::exact_hamilton_search;
pub use matching::{perfect_matching, Matching};
pub use pipeline::{absorbing_pipeline, PipelineOutcome, PipelineParams, Stage, StageRecord, Trace, TracePartition};
pub use tiling::{greedy_path_tiling, Tiling};

/// Result of a bounded search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome<T> {
    Found(T),
    /// The search space was exhausted: definitively nothing exists.
    Exhausted,
    /// The node budget ran out first: inconclusive.
    BudgetExceeded,
}

impl<T> SearchOutcome<T> {
    pub fn found(self) -> Option<T> {
        match self {
            SearchOutcome::Found(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, SearchOutcome::Found(_))
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> SearchOutcome<U> {
        match self {
            SearchOutcome::Found(t) => SearchOutcome::Found(f(t)),
            SearchOutcome::Exhausted => SearchOutcome::Exhausted,
            SearchOutcome::BudgetExceeded => SearchOutcome::BudgetExceeded,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchLimits {
    /// Maximum number of search nodes per search call.
    pub nodes: u64,
    /// Optional wall-clock cap. Off by default so results are reproducible.
    pub time: Option<Duration>,
    /// Break rotation, reflection and within-block symmetries in exact search.
    pub symmetry: bool,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { nodes: 10_000_000, time: None, symmetry: true }
    }
}

impl SearchLimits {
    pub fn with_nodes(nodes: u64) -> Self {
        SearchLimits { nodes, ..Self::default() }
    }

    pub fn validate(&self) -> crate::Result<()> {
        if self.nodes == 0 {
            return Err(crate::Error::InvalidParameter("node budget must be positive".into()));
        }
        if self.time == Some(Duration::ZERO) {
            return Err(crate::Error::InvalidParameter("time budget must be positive".into()));
        }
        Ok(())
    }
}
