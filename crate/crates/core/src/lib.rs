//! Asynchronous bounded-confidence opinion dynamics on hypergraphs.
//!
//! At each step a hyperedge is drawn uniformly at random; if the sample variance
//! of its members' opinions is below the confidence bound `c`, every member adopts
//! the hyperedge's mean opinion. The crate provides the hypergraph representations
//! (including implicit complete and block-structured ones), generators, the
//! simulation loop with absorbing-state detection, closed-form predictions and
//! Monte Carlo estimators, and experiment pipelines behind the `hyperbcm` binary.

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod generators;
pub mod hypergraph;
pub mod stats;

pub use analysis::clusters::{extract_clusters, ClusterSet};
pub use dynamics::{
    discordance, is_absorbing_clustered, is_absorbing_explicit, run, step, InitialDistribution,
    OpinionState, SimConfig, SimSummary, Simulation, StepOutcome, StopReason, StopRule,
};
pub use error::{Error, Result};
pub use hypergraph::{Hyperedge, Hypergraph, MixedEdges, NodeId, Partition, Representation};
