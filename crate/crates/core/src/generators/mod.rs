//! Hypergraph generators and the plain-text hypergraph format.

pub mod io;

use std::collections::{BTreeMap, HashSet};

use num_traits::ToPrimitive;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{binomial, sample_k_subset, Hyperedge, Hypergraph, MixedEdges, NodeId, Partition};

pub use io::{load_hypergraph, parse_hypergraph, save_hypergraph, write_hypergraph, Loaded};

/// Default node cap for explicit HSBM enumeration.
pub const DEFAULT_ENUMERATION_CAP: usize = 20;

/// Every subset of at least two of `node_count` nodes.
pub fn gen_complete(node_count: usize) -> Result<Hypergraph> {
    Hypergraph::complete(node_count)
}

/// `G(N, m)`: `m[i]` hyperedges of size `i` drawn uniformly without replacement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GnmParams {
    pub node_count: usize,
    pub m: BTreeMap<usize, u64>,
}

impl GnmParams {
    pub fn new(node_count: usize, m: impl IntoIterator<Item = (usize, u64)>) -> Self {
        GnmParams {
            node_count,
            m: m.into_iter().collect(),
        }
    }

    /// `min(m_i, C(N, i))`.
    pub fn effective_count(&self, size: usize) -> u64 {
        let requested = self.m.get(&size).copied().unwrap_or(0);
        match binomial(self.node_count, size).to_u64() {
            Some(cap) => requested.min(cap),
            None => requested,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.node_count < 2 {
            return Err(Error::TooFewNodes(self.node_count));
        }
        if let Some(&i) = self.m.keys().find(|&&i| i < 2 || i > self.node_count) {
            return Err(Error::invalid(format!(
                "hyperedge size {i} outside 2..={}",
                self.node_count
            )));
        }
        Ok(())
    }
}

pub fn gen_gnm<R: Rng + ?Sized>(params: &GnmParams, rng: &mut R) -> Result<Hypergraph> {
    params.validate()?;
    let n = params.node_count;
    let mut edges = Vec::new();
    for &size in params.m.keys() {
        let k = params.effective_count(size);
        if k == 0 {
            continue;
        }
        let total = binomial(n, size).to_u64();
        match total {
            Some(total) if 2 * k >= total => {
                for rank in rand::seq::index::sample(rng, total as usize, k as usize) {
                    edges.push(Hyperedge::new(unrank_combination(rank as u64, size))?);
                }
            }
            _ => {
                let mut seen = HashSet::with_capacity(k as usize);
                let mut buf = Vec::with_capacity(size);
                while (seen.len() as u64) < k {
                    sample_k_subset(rng, n, size, &mut buf);
                    if !seen.contains(buf.as_slice()) {
                        seen.insert(buf.clone());
                    }
                }
                for members in seen {
                    edges.push(Hyperedge::new(members)?);
                }
            }
        }
    }
    Hypergraph::explicit(n, edges)
}

/// The `rank`-th `size`-subset in the combinatorial number system (colex order).
fn unrank_combination(mut rank: u64, size: usize) -> Vec<NodeId> {
    let mut out = vec![0; size];
    for j in (1..=size).rev() {
        // Largest c with C(c, j) <= rank.
        let mut c = j as u64 - 1;
        let mut binom: u128 = 0;
        let mut next: u128 = 1;
        while next <= rank as u128 {
            c += 1;
            binom = next;
            next = next * (c as u128 + 1) / (c as u128 + 1 - j as u128);
        }
        out[j - 1] = c as NodeId;
        rank -= binom as u64;
    }
    out
}

/// `(p, q)`-HSBM, or `(p, q, M)`-HSBM when `max_mixed_size` is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HsbmParams {
    pub community_sizes: Vec<usize>,
    pub p: f64,
    pub q: f64,
    #[serde(default)]
    pub max_mixed_size: Option<usize>,
}

impl HsbmParams {
    pub fn partition(&self) -> Result<Partition> {
        Partition::from_sizes(&self.community_sizes)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) || !(0.0..=1.0).contains(&self.q) {
            return Err(Error::invalid("p and q must lie in [0, 1]"));
        }
        if matches!(self.max_mixed_size, Some(m) if m < 2) {
            return Err(Error::invalid("maximum mixed hyperedge size must be at least 2"));
        }
        self.partition().map(|_| ())
    }

    /// Inclusion probability of a candidate subset.
    pub fn inclusion_probability(&self, partition: &Partition, members: &[NodeId]) -> f64 {
        if partition.is_single_community(members) {
            self.p
        } else if self.max_mixed_size.is_some_and(|m| members.len() > m) {
            0.0
        } else {
            self.q
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HsbmMode {
    /// Enumerate every candidate subset; needs at most `cap` nodes.
    Explicit { cap: usize },
    /// Rule-based block representation; needs `p = 1` and `q` in `{0, 1}`.
    Implicit,
}

impl Default for HsbmMode {
    fn default() -> Self {
        HsbmMode::Explicit {
            cap: DEFAULT_ENUMERATION_CAP,
        }
    }
}

pub fn gen_hsbm<R: Rng + ?Sized>(params: &HsbmParams, rng: &mut R, mode: HsbmMode) -> Result<Hypergraph> {
    params.validate()?;
    let partition = params.partition()?;
    let n = partition.node_count();
    match mode {
        HsbmMode::Explicit { cap } => {
            let cap = cap.min(25);
            if n > cap {
                return Err(Error::Unsupported(format!(
                    "explicit HSBM enumerates all subsets and needs N <= {cap}, got {n}"
                )));
            }
            let mut edges = Vec::new();
            let mut members = Vec::with_capacity(n);
            for mask in 0u32..(1u32 << n) {
                if mask.count_ones() < 2 {
                    continue;
                }
                members.clear();
                members.extend((0..n as u32).filter(|i| mask >> i & 1 == 1));
                let prob = params.inclusion_probability(&partition, &members);
                if prob > 0.0 && (prob >= 1.0 || rng.gen_bool(prob)) {
                    edges.push(Hyperedge::new(members.iter().copied())?);
                }
            }
            Hypergraph::explicit(n, edges)
        }
        HsbmMode::Implicit => {
            if params.p != 1.0 {
                return Err(Error::Unsupported(format!(
                    "implicit HSBM needs p = 1, got {}",
                    params.p
                )));
            }
            let mixed = match (params.q, params.max_mixed_size) {
                (0.0, _) => MixedEdges::None,
                (1.0, None) => MixedEdges::All,
                (1.0, Some(m)) => MixedEdges::UpToSize(m),
                (q, _) => {
                    return Err(Error::Unsupported(format!(
                        "implicit HSBM needs q in {{0, 1}}, got {q}"
                    )))
                }
            };
            let flags = vec![true; partition.community_count()];
            Hypergraph::block(partition, flags, mixed)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::trial_rng;
    use num_bigint::BigUint;

    #[test]
    fn complete_counts() {
        assert_eq!(gen_complete(3).unwrap().edge_count(), BigUint::from(4u32));
        let big = gen_complete(200).unwrap().edge_count();
        assert_eq!(big, (BigUint::from(1u32) << 200usize) - BigUint::from(201u32));
        assert!(gen_complete(1).is_err());
    }

    #[test]
    fn gnm_saturated_pairs() {
        let h = gen_gnm(&GnmParams::new(5, [(2, 10)]), &mut trial_rng(0, 0)).unwrap();
        assert_eq!(h.edge_count(), BigUint::from(10u32));
    }

    #[test]
    fn gnm_capped() {
        let h = gen_gnm(&GnmParams::new(4, [(4, 7)]), &mut trial_rng(0, 0)).unwrap();
        let edges = h.edge_list().unwrap().to_hyperedges();
        assert_eq!(edges, vec![Hyperedge::new([0, 1, 2, 3]).unwrap()]);
    }

    #[test]
    fn gnm_counts_and_distinctness() {
        let mut rng = trial_rng(3, 0);
        let p = GnmParams::new(30, [(2, 400), (3, 50), (5, 10), (29, 25), (30, 1)]);
        let h = gen_gnm(&p, &mut rng).unwrap();
        for &(size, want) in &[(2usize, 400u32), (3, 50), (5, 10), (29, 25), (30, 1)] {
            assert_eq!(h.count_of_size(size), BigUint::from(want), "size {size}");
        }
        assert_eq!(h.edge_count(), BigUint::from(486u32));
    }

    #[test]
    fn unrank_covers_all_subsets() {
        let mut all: Vec<Vec<NodeId>> = (0..binomial(7, 3).to_u64().unwrap())
            .map(|r| unrank_combination(r, 3))
            .collect();
        assert!(all.iter().all(|s| s.windows(2).all(|w| w[0] < w[1]) && s[2] < 7));
        all.sort();
        all.dedup();
        assert_eq!(all.len(), 35);
    }

    #[test]
    fn gnm_triples_uniform() {
        // 5 of the 20 triples of 6 nodes: each triple appears with probability 1/4.
        let gens = 20_000;
        let mut counts = std::collections::HashMap::new();
        let mut rng = trial_rng(8, 0);
        for _ in 0..gens {
            let h = gen_gnm(&GnmParams::new(6, [(3, 5)]), &mut rng).unwrap();
            assert_eq!(h.edge_list().unwrap().len(), 5);
            for e in h.edge_list().unwrap().iter() {
                *counts.entry(e.to_vec()).or_insert(0u32) += 1;
            }
        }
        assert_eq!(counts.len(), 20);
        let expect = gens as f64 / 4.0;
        let chi2: f64 = counts.values().map(|&o| (o as f64 - expect).powi(2) / expect).sum();
        // 19 degrees of freedom; 0.999 quantile is about 43.8.
        assert!(chi2 < 43.8, "chi2 = {chi2}");
    }

    #[test]
    fn hsbm_two_singletons() {
        let p = HsbmParams {
            community_sizes: vec![1, 1],
            p: 1.0,
            q: 1.0,
            max_mixed_size: None,
        };
        let e = gen_hsbm(&p, &mut trial_rng(0, 0), HsbmMode::default()).unwrap();
        assert_eq!(e.edge_list().unwrap().to_hyperedges(), vec![Hyperedge::new([0, 1]).unwrap()]);
        let i = gen_hsbm(&p, &mut trial_rng(0, 0), HsbmMode::Implicit).unwrap();
        assert_eq!(i.edge_count(), BigUint::from(1u32));
    }

    #[test]
    fn hsbm_disconnected_communities() {
        let p = HsbmParams {
            community_sizes: vec![4, 4],
            p: 1.0,
            q: 0.0,
            max_mixed_size: None,
        };
        let h = gen_hsbm(&p, &mut trial_rng(0, 0), HsbmMode::default()).unwrap();
        assert_eq!(h.edge_count(), BigUint::from(22u32));
        let part = p.partition().unwrap();
        assert!(h.edge_list().unwrap().iter().all(|e| part.is_single_community(e)));
        let imp = gen_hsbm(&p, &mut trial_rng(0, 0), HsbmMode::Implicit).unwrap();
        assert_eq!(imp.to_explicit(20).unwrap().edge_list(), h.edge_list());
    }

    #[test]
    fn hsbm_polarization_config() {
        let p = HsbmParams {
            community_sizes: vec![500, 500],
            p: 1.0,
            q: 1.0,
            max_mixed_size: Some(2),
        };
        let h = gen_hsbm(&p, &mut trial_rng(0, 0), HsbmMode::Implicit).unwrap();
        let intra = (BigUint::from(1u32) << 500usize) - BigUint::from(501u32);
        assert_eq!(h.count_of_size(2), BigUint::from(2 * 124_750u32 + 250_000));
        assert_eq!(h.edge_count(), intra * 2u32 + BigUint::from(250_000u32));
    }

    #[test]
    fn hsbm_unsupported_modes() {
        let mut p = HsbmParams {
            community_sizes: vec![3, 3],
            p: 0.5,
            q: 1.0,
            max_mixed_size: None,
        };
        assert!(matches!(gen_hsbm(&p, &mut trial_rng(0, 0), HsbmMode::Implicit), Err(Error::Unsupported(_))));
        p.p = 1.0;
        p.q = 0.3;
        assert!(matches!(gen_hsbm(&p, &mut trial_rng(0, 0), HsbmMode::Implicit), Err(Error::Unsupported(_))));
        p.community_sizes = vec![15, 15];
        assert!(matches!(gen_hsbm(&p, &mut trial_rng(0, 0), HsbmMode::default()), Err(Error::Unsupported(_))));
    }

    #[test]
    fn hsbm_inclusion_frequencies() {
        let params = HsbmParams {
            community_sizes: vec![3, 3],
            p: 0.7,
            q: 0.2,
            max_mixed_size: Some(3),
        };
        let part = params.partition().unwrap();
        let gens = 10_000u32;
        let mut counts = std::collections::HashMap::new();
        let mut rng = trial_rng(21, 0);
        for _ in 0..gens {
            let h = gen_hsbm(&params, &mut rng, HsbmMode::default()).unwrap();
            for e in h.edge_list().unwrap().iter() {
                *counts.entry(e.to_vec()).or_insert(0u32) += 1;
            }
        }
        // Pool inclusion counts by category: intra, small mixed, large mixed.
        let mut hits = [0u64; 3];
        let mut candidates = [0u64; 3];
        let probs = [params.p, params.q, 0.0];
        for mask in 0u32..64 {
            if mask.count_ones() < 2 {
                continue;
            }
            let members: Vec<NodeId> = (0..6).filter(|i| mask >> i & 1 == 1).collect();
            let cat = if part.is_single_community(&members) {
                0
            } else if members.len() <= 3 {
                1
            } else {
                2
            };
            assert_eq!(params.inclusion_probability(&part, &members), probs[cat]);
            candidates[cat] += gens as u64;
            hits[cat] += *counts.get(&members).unwrap_or(&0) as u64;
        }
        for cat in 0..3 {
            let prob = probs[cat];
            let freq = hits[cat] as f64 / candidates[cat] as f64;
            let se = (prob * (1.0 - prob) / candidates[cat] as f64).sqrt();
            assert!((freq - prob).abs() <= 3.0 * se.max(1e-12), "category {cat}: {freq} vs {prob}");
        }
    }
}
