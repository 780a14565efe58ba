//! Initial states from which the process converges but never in finite time.

use crate::dynamics::OpinionState;
use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, NodeId};

use super::prime::is_prime;

/// Builds an initial state for `h` that cannot reach its limit in finite time.
///
/// `e` must be a prime-size (at least 3) node set that is not a hyperedge of `h`
/// and whose induced subhypergraph is connected. Members of `e` start at
/// `0, 2^-r, ..., 2^-r` with `2^-r < sqrt(c)`, so only dyadic values are ever
/// reachable inside `e` while the limit is `(|e|-1) 2^-r / |e|`. Every other node
/// starts at a common value `M`, doubled until no hyperedge mixing `e` and the
/// rest can become concordant.
pub fn adversarial_initial_state(h: &Hypergraph, e: &[NodeId], c: f64) -> Result<OpinionState> {
    let list = h.edge_list().ok_or(Error::NotExplicit)?;
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::invalid(format!("confidence bound must be positive, got {c}")));
    }
    let mut set = e.to_vec();
    set.sort_unstable();
    set.dedup();
    if set.len() != e.len() {
        return Err(Error::invalid("node set has repeated members"));
    }
    let n = h.node_count();
    if let Some(&v) = set.iter().find(|&&v| v as usize >= n) {
        return Err(Error::NodeOutOfRange { node: v as u64, node_count: n });
    }
    if set.len() < 3 || !is_prime(set.len()) {
        return Err(Error::invalid(format!("node set size must be a prime of at least 3, got {}", set.len())));
    }
    if list.contains(&set) {
        return Err(Error::invalid("node set is already a hyperedge"));
    }
    let mut inside = vec![false; n];
    for &v in &set {
        inside[v as usize] = true;
    }
    if !induced_connected(h, &set, &inside) {
        return Err(Error::invalid("induced subhypergraph on the node set is not connected"));
    }

    let eps = c.sqrt();
    let mut r = 1i32;
    while 2f64.powi(-r) >= eps {
        r += 1;
    }
    let low = 2f64.powi(-r);

    // Each mixed hyperedge with k members in e and the rest at M keeps sum of squared
    // deviations at least k (n-k)/n (M - eps)^2 while e stays inside [0, eps].
    let mixed: Vec<(usize, usize)> = list
        .iter()
        .filter_map(|m| {
            let k = m.iter().filter(|&&v| inside[v as usize]).count();
            (k > 0 && k < m.len()).then_some((k, m.len()))
        })
        .collect();
    let mut big = eps + (2.0 * c * n as f64).sqrt();
    let safe = |big: f64| {
        mixed.iter().all(|&(k, s)| {
            let (k, s) = (k as f64, s as f64);
            k * (s - k) / (s * (s - 1.0)) * (big - eps).powi(2) >= c
        })
    };
    while !safe(big) {
        big *= 2.0;
        if !big.is_finite() {
            return Err(Error::invalid("could not separate the node set from the rest"));
        }
    }

    let mut x = vec![big; n];
    for (i, &v) in set.iter().enumerate() {
        x[v as usize] = if i == 0 { 0.0 } else { low };
    }
    OpinionState::new(x)
}

/// Union-find over the hyperedges that lie entirely inside the node set.
fn induced_connected(h: &Hypergraph, set: &[NodeId], inside: &[bool]) -> bool {
    let list = h.edge_list().expect("explicit");
    let index = |v: NodeId| set.binary_search(&v).expect("member");
    let mut parent: Vec<usize> = (0..set.len()).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for m in list.iter().filter(|m| m.iter().all(|&v| inside[v as usize])) {
        let root = find(&mut parent, index(m[0]));
        for &v in &m[1..] {
            let other = find(&mut parent, index(v));
            parent[other] = root;
        }
    }
    let root = find(&mut parent, 0);
    (1..set.len()).all(|i| find(&mut parent, i) == root)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::Hyperedge;

    fn graph(n: usize, edges: &[&[NodeId]]) -> Hypergraph {
        Hypergraph::explicit(n, edges.iter().map(|e| Hyperedge::new(e.iter().copied()).unwrap()).collect()).unwrap()
    }

    #[test]
    fn triangle() {
        let h = graph(3, &[&[0, 1], &[1, 2], &[0, 2]]);
        let x = adversarial_initial_state(&h, &[0, 1, 2], 1.0).unwrap();
        assert_eq!(x.opinions(), &[0.0, 0.5, 0.5]);
    }

    #[test]
    fn small_bound_needs_larger_r() {
        let h = graph(3, &[&[0, 1], &[1, 2]]);
        // sqrt(0.01) = 0.1, so 2^-4 = 0.0625 is the first power below it.
        let x = adversarial_initial_state(&h, &[0, 1, 2], 0.01).unwrap();
        assert_eq!(x.opinions(), &[0.0, 0.0625, 0.0625]);
    }

    #[test]
    fn outsiders_separated() {
        let h = graph(5, &[&[0, 1], &[1, 2], &[2, 3], &[3, 4], &[0, 3, 4]]);
        let x = adversarial_initial_state(&h, &[0, 1, 2], 1.0).unwrap();
        let m = x.opinions()[3];
        assert_eq!(x.opinions()[4], m);
        for e in h.edge_list().unwrap().iter() {
            let mixed = e.iter().any(|&v| v < 3) && e.iter().any(|&v| v >= 3);
            if mixed {
                assert!(crate::discordance(e, x.opinions(), 1.0).unwrap() >= 1.0);
            }
        }
    }

    #[test]
    fn preconditions() {
        let h = graph(4, &[&[0, 1], &[2, 3], &[1, 2]]);
        assert!(adversarial_initial_state(&h, &[0, 1, 3], 1.0).is_err(), "disconnected");
        assert!(adversarial_initial_state(&h, &[0, 1, 2, 3], 1.0).is_err(), "composite size");
        assert!(adversarial_initial_state(&h, &[0, 1], 1.0).is_err(), "size two");
        let with_e = graph(3, &[&[0, 1], &[0, 1, 2]]);
        assert!(adversarial_initial_state(&with_e, &[0, 1, 2], 1.0).is_err(), "already an edge");
        assert!(matches!(
            adversarial_initial_state(&Hypergraph::complete(3).unwrap(), &[0, 1, 2], 1.0),
            Err(Error::NotExplicit)
        ));
    }
}
