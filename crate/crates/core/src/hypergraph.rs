//! Hypergraph representations and uniform hyperedge sampling.
//!
//! Three representations share one interface:
//!
//! * [`Representation::Explicit`] stores a canonical, duplicate-free edge list.
//! * [`Representation::Complete`] stands for every subset of size at least two.
//! * [`Representation::Block`] stands for a community-structured hypergraph whose
//!   edge set is described by rules (complete communities plus a mixed-edge rule)
//!   and is never enumerated.
//!
//! Implicit representations are sampled exactly uniformly. Counts are exact
//! big integers since `2^N` overflows any machine word at the sizes we run.

use std::collections::HashSet;
use std::fmt;

use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type NodeId = u32;

/// A canonical hyperedge: sorted, distinct node ids, at least two of them.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<NodeId>", into = "Vec<NodeId>")]
pub struct Hyperedge(Vec<NodeId>);

impl Hyperedge {
    pub fn new(nodes: impl IntoIterator<Item = NodeId>) -> Result<Self> {
        let mut v: Vec<NodeId> = nodes.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        if v.len() < 2 {
            return Err(Error::EdgeTooSmall(v.len()));
        }
        Ok(Hyperedge(v))
    }

    pub fn members(&self) -> &[NodeId] {
        &self.0
    }

    pub fn size(&self) -> usize {
        self.0.len()
    }

    pub fn into_members(self) -> Vec<NodeId> {
        self.0
    }
}

impl TryFrom<Vec<NodeId>> for Hyperedge {
    type Error = Error;
    fn try_from(v: Vec<NodeId>) -> Result<Self> {
        Hyperedge::new(v)
    }
}

impl From<Hyperedge> for Vec<NodeId> {
    fn from(e: Hyperedge) -> Self {
        e.0
    }
}

impl fmt::Display for Hyperedge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{n}")?;
        }
        f.write_str("}")
    }
}

/// Flat, lexicographically sorted list of distinct hyperedges.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EdgeList {
    offsets: Vec<usize>,
    nodes: Vec<NodeId>,
}

impl EdgeList {
    /// Builds the canonical list: edges sorted lexicographically, duplicates dropped.
    pub fn from_edges(mut edges: Vec<Hyperedge>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        let total: usize = edges.iter().map(Hyperedge::size).sum();
        let mut offsets = Vec::with_capacity(edges.len() + 1);
        let mut nodes = Vec::with_capacity(total);
        offsets.push(0);
        for e in edges {
            nodes.extend_from_slice(e.members());
            offsets.push(nodes.len());
        }
        EdgeList { offsets, nodes }
    }

    pub fn len(&self) -> usize {
        self.offsets.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, i: usize) -> &[NodeId] {
        &self.nodes[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[NodeId]> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }

    /// Membership test on canonical (sorted, distinct) member slices.
    pub fn contains(&self, members: &[NodeId]) -> bool {
        let (mut lo, mut hi) = (0, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.get(mid).cmp(members) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }

    /// Sum of hyperedge sizes.
    pub fn total_size(&self) -> usize {
        self.nodes.len()
    }

    pub fn max_node(&self) -> Option<NodeId> {
        self.nodes.iter().copied().max()
    }

    pub fn to_hyperedges(&self) -> Vec<Hyperedge> {
        self.iter().map(|m| Hyperedge(m.to_vec())).collect()
    }
}

/// Assignment of nodes to non-empty communities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    assignment: Vec<u32>,
    communities: Vec<Vec<NodeId>>,
}

impl Partition {
    /// Contiguous communities: the first `sizes[0]` nodes form community 0, and so on.
    pub fn from_sizes(sizes: &[usize]) -> Result<Self> {
        if sizes.contains(&0) {
            return Err(Error::invalid("every community must be non-empty"));
        }
        let assignment = sizes
            .iter()
            .enumerate()
            .flat_map(|(k, &s)| std::iter::repeat_n(k as u32, s))
            .collect();
        Self::from_assignment(assignment)
    }

    /// Community indices must cover `0..k` with no gaps.
    pub fn from_assignment(assignment: Vec<u32>) -> Result<Self> {
        if assignment.is_empty() {
            return Err(Error::invalid("partition of an empty node set"));
        }
        let k = *assignment.iter().max().unwrap() as usize + 1;
        let mut communities = vec![Vec::new(); k];
        for (node, &c) in assignment.iter().enumerate() {
            communities[c as usize].push(node as NodeId);
        }
        if communities.iter().any(Vec::is_empty) {
            return Err(Error::invalid("every community must be non-empty"));
        }
        Ok(Partition {
            assignment,
            communities,
        })
    }

    pub fn node_count(&self) -> usize {
        self.assignment.len()
    }

    pub fn community_count(&self) -> usize {
        self.communities.len()
    }

    pub fn community_of(&self, node: NodeId) -> usize {
        self.assignment[node as usize] as usize
    }

    pub fn members(&self, community: usize) -> &[NodeId] {
        &self.communities[community]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.communities.iter().map(Vec::len).collect()
    }

    pub fn assignment(&self) -> &[u32] {
        &self.assignment
    }

    /// True when every member lies in one community.
    pub fn is_single_community(&self, members: &[NodeId]) -> bool {
        match members.split_first() {
            None => true,
            Some((&first, rest)) => {
                let c = self.assignment[first as usize];
                rest.iter().all(|&n| self.assignment[n as usize] == c)
            }
        }
    }
}

/// Rule for hyperedges that span more than one community.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MixedEdges {
    None,
    /// Every mixed subset.
    All,
    /// Every mixed subset with at most this many nodes.
    UpToSize(usize),
    /// An explicit list of mixed hyperedges.
    Catalog(EdgeList),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Category {
    Intra(usize),
    MixedAll,
    MixedOfSize(usize),
    Catalog,
}

/// Community-structured hypergraph described by rules rather than a list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockStructure {
    partition: Partition,
    intra_complete: Vec<bool>,
    mixed: MixedEdges,
    categories: Vec<(Category, BigUint)>,
    total: BigUint,
}

impl BlockStructure {
    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn intra_complete(&self) -> &[bool] {
        &self.intra_complete
    }

    pub fn mixed(&self) -> &MixedEdges {
        &self.mixed
    }

    fn contains(&self, members: &[NodeId]) -> bool {
        if self.partition.is_single_community(members) {
            return self.intra_complete[self.partition.community_of(members[0])];
        }
        match &self.mixed {
            MixedEdges::None => false,
            MixedEdges::All => true,
            MixedEdges::UpToSize(m) => members.len() <= *m,
            MixedEdges::Catalog(list) => list.contains(members),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Representation {
    Explicit(EdgeList),
    Complete,
    Block(BlockStructure),
}

/// Hypergraph on nodes `0..node_count`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypergraph {
    node_count: usize,
    repr: Representation,
}

impl Hypergraph {
    /// Explicit hypergraph; duplicates are merged and edges are validated against `node_count`.
    pub fn explicit(node_count: usize, edges: Vec<Hyperedge>) -> Result<Self> {
        check_node_count(node_count)?;
        for e in &edges {
            check_range(e.members(), node_count)?;
        }
        Ok(Hypergraph {
            node_count,
            repr: Representation::Explicit(EdgeList::from_edges(edges)),
        })
    }

    pub fn from_edge_list(node_count: usize, list: EdgeList) -> Result<Self> {
        check_node_count(node_count)?;
        if let Some(m) = list.max_node() {
            if m as usize >= node_count {
                return Err(Error::NodeOutOfRange {
                    node: m as u64,
                    node_count,
                });
            }
        }
        Ok(Hypergraph {
            node_count,
            repr: Representation::Explicit(list),
        })
    }

    /// Every subset of at least two nodes.
    pub fn complete(node_count: usize) -> Result<Self> {
        check_node_count(node_count)?;
        if node_count > NodeId::MAX as usize {
            return Err(Error::invalid("node count exceeds id range"));
        }
        Ok(Hypergraph {
            node_count,
            repr: Representation::Complete,
        })
    }

    /// Block-structured hypergraph: community `k` is a hyperclique when
    /// `intra_complete[k]`, and mixed hyperedges follow `mixed`.
    pub fn block(partition: Partition, intra_complete: Vec<bool>, mixed: MixedEdges) -> Result<Self> {
        let node_count = partition.node_count();
        check_node_count(node_count)?;
        if intra_complete.len() != partition.community_count() {
            return Err(Error::invalid(format!(
                "{} completeness flags for {} communities",
                intra_complete.len(),
                partition.community_count()
            )));
        }
        match &mixed {
            MixedEdges::UpToSize(m) if *m < 2 => {
                return Err(Error::invalid("maximum mixed hyperedge size must be at least 2"))
            }
            MixedEdges::Catalog(list) => {
                for e in list.iter() {
                    check_range(e, node_count)?;
                    if partition.is_single_community(e) {
                        return Err(Error::invalid(
                            "mixed-edge catalog contains a single-community hyperedge",
                        ));
                    }
                }
            }
            _ => {}
        }

        let sizes = partition.sizes();
        let mut categories = Vec::new();
        for (k, &s) in sizes.iter().enumerate() {
            if intra_complete[k] && s >= 2 {
                categories.push((Category::Intra(k), complete_count(s)));
            }
        }
        match &mixed {
            MixedEdges::None => {}
            MixedEdges::All => {
                let intra_all: BigUint = sizes.iter().map(|&s| complete_count(s)).sum();
                let count = complete_count(node_count) - intra_all;
                categories.push((Category::MixedAll, count));
            }
            MixedEdges::UpToSize(m) => {
                for n in 2..=(*m).min(node_count) {
                    let single: BigUint = sizes.iter().map(|&s| binomial(s, n)).sum();
                    let count = binomial(node_count, n) - single;
                    categories.push((Category::MixedOfSize(n), count));
                }
            }
            MixedEdges::Catalog(list) => {
                categories.push((Category::Catalog, BigUint::from(list.len())));
            }
        }
        categories.retain(|(_, c)| !c.is_zero());
        let total = categories.iter().map(|(_, c)| c).sum();
        Ok(Hypergraph {
            node_count,
            repr: Representation::Block(BlockStructure {
                partition,
                intra_complete,
                mixed,
                categories,
                total,
            }),
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    pub fn edge_list(&self) -> Option<&EdgeList> {
        match &self.repr {
            Representation::Explicit(list) => Some(list),
            _ => None,
        }
    }

    pub fn is_explicit(&self) -> bool {
        matches!(self.repr, Representation::Explicit(_))
    }

    /// Exact number of hyperedges.
    pub fn edge_count(&self) -> BigUint {
        match &self.repr {
            Representation::Explicit(list) => BigUint::from(list.len()),
            Representation::Complete => complete_count(self.node_count),
            Representation::Block(b) => b.total.clone(),
        }
    }

    pub fn contains_edge(&self, e: &Hyperedge) -> bool {
        self.contains_members(e.members())
    }

    /// Membership for canonical member slices; out-of-range or short slices are never members.
    pub fn contains_members(&self, members: &[NodeId]) -> bool {
        if members.len() < 2 || members.iter().any(|&n| n as usize >= self.node_count) {
            return false;
        }
        match &self.repr {
            Representation::Explicit(list) => list.contains(members),
            Representation::Complete => true,
            Representation::Block(b) => b.contains(members),
        }
    }

    /// Draws a hyperedge uniformly from the edge set.
    pub fn sample_uniform_hyperedge<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Hyperedge> {
        let mut buf = Vec::new();
        self.sample_into(rng, &mut buf)?;
        Ok(Hyperedge(buf))
    }

    /// Allocation-free variant of [`Self::sample_uniform_hyperedge`]; `buf` receives
    /// the sorted members.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, buf: &mut Vec<NodeId>) -> Result<()> {
        match &self.repr {
            Representation::Explicit(list) => {
                if list.is_empty() {
                    return Err(Error::NoHyperedges);
                }
                let i = rng.gen_range(0..list.len());
                buf.clear();
                buf.extend_from_slice(list.get(i));
            }
            Representation::Complete => loop {
                bernoulli_half_subset(rng, self.node_count, |i| i as NodeId, buf);
                if buf.len() >= 2 {
                    break;
                }
            },
            Representation::Block(b) => {
                if b.total.is_zero() {
                    return Err(Error::NoHyperedges);
                }
                let category = pick_category(rng, &b.categories, &b.total);
                sample_block_category(rng, b, category, self.node_count, buf);
            }
        }
        Ok(())
    }

    /// Materializes the edge set. Implicit representations are enumerated by bitmask,
    /// which is only allowed up to `max_nodes` (itself capped at 25).
    pub fn to_explicit(&self, max_nodes: usize) -> Result<Hypergraph> {
        if let Representation::Explicit(_) = self.repr {
            return Ok(self.clone());
        }
        let cap = max_nodes.min(25);
        if self.node_count > cap {
            return Err(Error::Unsupported(format!(
                "enumerating {} nodes exceeds the cap of {cap}",
                self.node_count
            )));
        }
        let mut edges = Vec::new();
        let mut members = Vec::with_capacity(self.node_count);
        for mask in 0u32..(1u32 << self.node_count) {
            if mask.count_ones() < 2 {
                continue;
            }
            members.clear();
            members.extend((0..self.node_count as u32).filter(|i| mask >> i & 1 == 1));
            if self.contains_members(&members) {
                edges.push(Hyperedge(members.clone()));
            }
        }
        Hypergraph::explicit(self.node_count, edges)
    }

    /// Fraction of hyperedges of each size, indexed by size (entries 0 and 1 are zero).
    pub fn size_distribution(&self) -> Vec<f64> {
        let n = self.node_count;
        let mut dist = vec![0.0; n + 1];
        match &self.repr {
            Representation::Explicit(list) => {
                for e in list.iter() {
                    dist[e.len()] += 1.0;
                }
                let total = list.len().max(1) as f64;
                dist.iter_mut().for_each(|d| *d /= total);
            }
            _ => {
                // Per-size counts in log space so that 2^N never has to fit a float.
                let mut logs = vec![f64::NEG_INFINITY; n + 1];
                for (size, slot) in logs.iter_mut().enumerate().skip(2) {
                    let count = self.count_of_size(size);
                    if !count.is_zero() {
                        *slot = ln_big(&count);
                    }
                }
                let lse = crate::stats::log_sum_exp(&logs);
                for (d, l) in dist.iter_mut().zip(&logs) {
                    *d = (l - lse).exp();
                }
            }
        }
        dist
    }

    /// Exact number of hyperedges with exactly `size` members.
    pub fn count_of_size(&self, size: usize) -> BigUint {
        if size < 2 || size > self.node_count {
            return BigUint::zero();
        }
        match &self.repr {
            Representation::Explicit(list) => {
                BigUint::from(list.iter().filter(|e| e.len() == size).count())
            }
            Representation::Complete => binomial(self.node_count, size),
            Representation::Block(b) => {
                let sizes = b.partition.sizes();
                let mut total = BigUint::zero();
                for (k, &s) in sizes.iter().enumerate() {
                    if b.intra_complete[k] {
                        total += binomial(s, size);
                    }
                }
                let single_all: BigUint = sizes.iter().map(|&s| binomial(s, size)).sum();
                let mixed_of_size = binomial(self.node_count, size) - single_all;
                match &b.mixed {
                    MixedEdges::None => {}
                    MixedEdges::All => total += mixed_of_size,
                    MixedEdges::UpToSize(m) => {
                        if size <= *m {
                            total += mixed_of_size;
                        }
                    }
                    MixedEdges::Catalog(list) => {
                        total += BigUint::from(list.iter().filter(|e| e.len() == size).count())
                    }
                }
                total
            }
        }
    }
}

fn check_node_count(n: usize) -> Result<()> {
    if n < 2 {
        Err(Error::TooFewNodes(n))
    } else {
        Ok(())
    }
}

fn check_range(members: &[NodeId], node_count: usize) -> Result<()> {
    match members.iter().find(|&&m| m as usize >= node_count) {
        Some(&m) => Err(Error::NodeOutOfRange {
            node: m as u64,
            node_count,
        }),
        None => Ok(()),
    }
}

/// `2^n - n - 1`: number of subsets of size at least two.
pub fn complete_count(n: usize) -> BigUint {
    if n < 2 {
        return BigUint::zero();
    }
    (BigUint::one() << n) - BigUint::from(n) - BigUint::one()
}

/// Exact binomial coefficient.
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= BigUint::from(n - i);
        acc /= BigUint::from(i + 1);
    }
    acc
}

/// Natural log of a big integer, accurate to double precision.
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

fn pick_category<R: Rng + ?Sized>(
    rng: &mut R,
    categories: &[(Category, BigUint)],
    total: &BigUint,
) -> Category {
    let mut ticket = rng.gen_biguint_below(total);
    for (cat, count) in categories {
        if ticket < *count {
            return *cat;
        }
        ticket -= count;
    }
    unreachable!("ticket below total always lands in a category")
}

fn sample_block_category<R: Rng + ?Sized>(
    rng: &mut R,
    b: &BlockStructure,
    category: Category,
    node_count: usize,
    buf: &mut Vec<NodeId>,
) {
    match category {
        Category::Intra(k) => {
            let members = b.partition.members(k);
            loop {
                bernoulli_half_subset(rng, members.len(), |i| members[i], buf);
                if buf.len() >= 2 {
                    break;
                }
            }
        }
        Category::MixedAll => loop {
            bernoulli_half_subset(rng, node_count, |i| i as NodeId, buf);
            if buf.len() >= 2 && !b.partition.is_single_community(buf) {
                break;
            }
        },
        Category::MixedOfSize(n) => loop {
            sample_k_subset(rng, node_count, n, buf);
            if !b.partition.is_single_community(buf) {
                break;
            }
        },
        Category::Catalog => {
            let MixedEdges::Catalog(list) = &b.mixed else {
                unreachable!("catalog category without a catalog")
            };
            let i = rng.gen_range(0..list.len());
            buf.clear();
            buf.extend_from_slice(list.get(i));
        }
    }
}

/// Includes each of `len` positions independently with probability 1/2, mapping
/// positions through `id`. Output preserves position order.
fn bernoulli_half_subset<R: Rng + ?Sized>(
    rng: &mut R,
    len: usize,
    id: impl Fn(usize) -> NodeId,
    buf: &mut Vec<NodeId>,
) {
    buf.clear();
    let mut base = 0;
    while base < len {
        let mut bits = rng.next_u64();
        let width = (len - base).min(64);
        if width < 64 {
            bits &= (1u64 << width) - 1;
        }
        while bits != 0 {
            let tz = bits.trailing_zeros() as usize;
            buf.push(id(base + tz));
            bits &= bits - 1;
        }
        base += 64;
    }
}

/// Uniform `k`-subset of `0..n`, sorted. Floyd's algorithm on the smaller of the
/// subset and its complement.
pub fn sample_k_subset<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize, buf: &mut Vec<NodeId>) {
    assert!(k <= n, "cannot draw {k} of {n}");
    buf.clear();
    let complement = 2 * k > n;
    let draw = if complement { n - k } else { k };
    let mut chosen: HashSet<usize> = HashSet::with_capacity(draw);
    for j in (n - draw)..n {
        let t = rng.gen_range(0..=j);
        if !chosen.insert(t) {
            chosen.insert(j);
        }
    }
    if complement {
        buf.extend((0..n).filter(|i| !chosen.contains(i)).map(|i| i as NodeId));
    } else {
        buf.extend(chosen.into_iter().map(|i| i as NodeId));
        buf.sort_unstable();
    }
}
