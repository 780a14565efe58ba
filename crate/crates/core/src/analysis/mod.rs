//! Closed-form predictions, bounds, Monte Carlo estimators and the constructive
//! arguments turned into algorithms.

pub mod adversarial;
pub mod clusters;
pub mod concordance;
pub mod jumps;
pub mod prime;
pub mod thresholds;

pub use adversarial::adversarial_initial_state;
pub use clusters::{extract_clusters, Cluster, ClusterSet, DEFAULT_CLUSTER_TOL};
pub use concordance::{
    chernoff_concordance_bound, concordance_prob_mc, concordance_table, estar_curve,
    expected_first_concordant_size, limiting_concordance, BoundParams, ConcordanceEstimate,
};
pub use jumps::{
    expected_jumps, expected_jumps_expanded, jump_probability_mc, single_jump_probability, JumpEstimate, JumpModelInputs,
};
pub use prime::prime_decompose;
pub use thresholds::{consensus_node_threshold, max_cluster_bound};
