//! Opinion clusters: maximal groups of nodes sharing one opinion value.

use serde::{Deserialize, Serialize};

use crate::hypergraph::NodeId;
use crate::stats::KahanSum;

/// Default gap that separates two clusters.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub value: f64,
    pub size: usize,
    /// Largest minus smallest member opinion.
    #[serde(skip)]
    pub spread: f64,
    #[serde(skip)]
    pub members: Vec<NodeId>,
}

/// Clusters ordered by value.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSet {
    clusters: Vec<Cluster>,
    tolerance: f64,
}

impl ClusterSet {
    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn values(&self) -> Vec<f64> {
        self.clusters.iter().map(|c| c.value).collect()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.clusters.iter().map(|c| c.size).collect()
    }

    pub fn node_count(&self) -> usize {
        self.clusters.iter().map(|c| c.size).sum()
    }

    pub fn is_consensus(&self) -> bool {
        self.clusters.len() == 1
    }

    /// Largest within-cluster spread.
    pub fn max_spread(&self) -> f64 {
        self.clusters.iter().map(|c| c.spread).fold(0.0, f64::max)
    }

    /// Every opinion lies within `tolerance` of the rest of its cluster.
    pub fn is_exact(&self) -> bool {
        self.max_spread() <= self.tolerance
    }

    /// Builds a set directly from values and sizes, with synthetic contiguous
    /// membership (cluster 0 owns the first `sizes[0]` nodes, and so on).
    pub fn from_values(values: &[f64], sizes: &[usize], tolerance: f64) -> Self {
        assert_eq!(values.len(), sizes.len());
        let mut next = 0u32;
        let mut clusters: Vec<Cluster> = values
            .iter()
            .zip(sizes)
            .map(|(&value, &size)| {
                let members = (next..next + size as u32).collect();
                next += size as u32;
                Cluster {
                    value,
                    size,
                    spread: 0.0,
                    members,
                }
            })
            .collect();
        clusters.sort_by(|a, b| a.value.total_cmp(&b.value));
        ClusterSet {
            clusters,
            tolerance,
        }
    }
}

/// Sorts the opinions and splits wherever consecutive values differ by more than
/// `tol`. Each cluster's value is the mean of its members.
pub fn extract_clusters(opinions: &[f64], tol: f64) -> ClusterSet {
    assert!(tol >= 0.0, "cluster tolerance must be non-negative");
    let mut order: Vec<NodeId> = (0..opinions.len() as NodeId).collect();
    order.sort_by(|&a, &b| opinions[a as usize].total_cmp(&opinions[b as usize]));

    let mut clusters = Vec::new();
    let mut start = 0;
    for i in 1..=order.len() {
        let split = i == order.len()
            || opinions[order[i] as usize] - opinions[order[i - 1] as usize] > tol;
        if split {
            let members: Vec<NodeId> = order[start..i].to_vec();
            let sum: KahanSum = members.iter().map(|&m| opinions[m as usize]).collect();
            let lo = opinions[order[start] as usize];
            let hi = opinions[order[i - 1] as usize];
            clusters.push(Cluster {
                value: sum.total() / members.len() as f64,
                size: members.len(),
                spread: hi - lo,
                members,
            });
            start = i;
        }
    }
    ClusterSet {
        clusters,
        tolerance: tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cluster() {
        let cs = extract_clusters(&[2.0, 2.0, 2.0], DEFAULT_CLUSTER_TOL);
        assert_eq!(cs.len(), 1);
        assert_eq!(cs.values(), vec![2.0]);
        assert_eq!(cs.sizes(), vec![3]);
        assert!(cs.is_exact());
    }

    #[test]
    fn gap_logic() {
        let cs = extract_clusters(&[-2.0, -2.0 + 1e-13, 2.0], 1e-9);
        assert_eq!(cs.sizes(), vec![2, 1]);
        assert!((cs.values()[0] + 2.0).abs() < 1e-12);
        assert_eq!(cs.values()[1], 2.0);
        assert_eq!(cs.clusters()[0].members, vec![0, 1]);
    }

    #[test]
    fn chained_small_gaps_are_not_exact() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64 * 0.9e-9).collect();
        let cs = extract_clusters(&xs, 1e-9);
        assert_eq!(cs.len(), 1);
        assert!(!cs.is_exact());
    }

    #[test]
    fn empty_input() {
        assert!(extract_clusters(&[], 1e-9).is_empty());
    }
}
