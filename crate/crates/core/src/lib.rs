//! Toolkit for loose Hamilton cycles in random and adversarially pruned 3-graphs.

pub mod absorb;
pub mod cli;
pub mod connect;
pub mod hgraph;
pub mod matching;
pub mod models;
pub mod oracle;
pub mod pathcover;
pub mod rng;

pub use hgraph::{validate_loose_cycle, validate_loose_path, Hypergraph3, LooseCycle, LoosePath, VertexSet};
