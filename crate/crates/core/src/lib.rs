//! Graph vertex embeddings that preserve shortest-path distances.
//!
//! Embeddings are fitted by minimizing pairwise stress between embedding
//! distances `‖eᵢ − eⱼ‖^κ` and graph distances, with `κ` fixed or learned.
//! They can be fitted directly or produced by a small network applied to
//! distance-matrix columns, then clustered to find communities.

pub mod baselines;
pub mod clustering;
pub mod drawing;
pub mod embed;
pub mod error;
mod fmt;
pub mod graph;
pub mod metrics;
pub mod neural;

#[cfg(test)]
mod testutil;

pub use embed::{optimize_direct, EmbeddingSet, KappaMode, LossKind, OptimConfig};
pub use error::{Error, Result};
pub use graph::{apsp, components, parse_edge_list, read_edge_list, DistanceMatrix, Graph};
pub use metrics::{ars, modularity, nmi, rmrse, rmse, Partition};
pub use neural::{train_neural, NeuralConfig, NeuralModel};
