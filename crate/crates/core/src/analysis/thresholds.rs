//! Integer thresholds for consensus on complete hypergraphs with opinions in `[a, b]`.

fn check(a: f64, b: f64, c: f64) {
    assert!(a < b, "need a < b");
    assert!(c > 0.0, "need c > 0");
}

/// Smallest node count `N >= 1` with `N > ((b-a)/sqrt(c) + 1) ((b-a)^2/c - 1)`.
/// Complete hypergraphs with at least this many nodes reach consensus.
pub fn consensus_node_threshold(a: f64, b: f64, c: f64) -> u64 {
    check(a, b, c);
    let w = b - a;
    let x = (w / c.sqrt() + 1.0) * (w * w / c - 1.0);
    if x < 0.0 {
        1
    } else {
        (x.floor() as u64 + 1).max(1)
    }
}

/// Largest possible number of clusters in an absorbing state: `floor((b-a)/sqrt(2c)) + 1`.
pub fn max_cluster_bound(a: f64, b: f64, c: f64) -> u64 {
    check(a, b, c);
    ((b - a) / (2.0 * c).sqrt()).floor() as u64 + 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(consensus_node_threshold(0.0, 1.0, 1.0), 1);
        assert_eq!(consensus_node_threshold(-2.0, 2.0, 1.0), 76);
        assert_eq!(max_cluster_bound(0.0, 1.0, 0.125), 3);
    }

    #[test]
    fn narrow_interval() {
        assert_eq!(consensus_node_threshold(0.0, 0.5, 1.0), 1);
        assert_eq!(max_cluster_bound(0.0, 0.5, 1.0), 1);
    }

    #[test]
    fn strictness_at_integer_values() {
        // (b-a)=3, c=1: (3+1)(9-1) = 32 exactly, so the threshold is 33.
        assert_eq!(consensus_node_threshold(0.0, 3.0, 1.0), 33);
        // (b-a)/sqrt(2c) = 2 exactly.
        assert_eq!(max_cluster_bound(0.0, 2.0, 0.5), 3);
    }
}
