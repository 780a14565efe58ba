//! Decomposing a mean update on a composite-size hyperedge into mean updates on
//! prime-size subsets.

use crate::error::{Error, Result};
use crate::hypergraph::NodeId;

fn smallest_prime_factor(n: usize) -> usize {
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            return p;
        }
        p += 1;
    }
    n
}

pub fn is_prime(n: usize) -> bool {
    n >= 2 && smallest_prime_factor(n) == n
}

/// Ordered sequence of prime-size subsets of `e` whose successive mean updates
/// leave every member of `e` at the mean of `e`.
///
/// With `|e| = p m` and `p` the smallest prime factor, `e` is cut into `p`
/// contiguous blocks of size `m`; each block is decomposed recursively, and then
/// the `m` stride sets `{b_0[j], ..., b_(p-1)[j]}` average across blocks.
pub fn prime_decompose(e: &[NodeId]) -> Result<Vec<Vec<NodeId>>> {
    if e.len() < 2 {
        return Err(Error::EdgeTooSmall(e.len()));
    }
    let mut out = Vec::new();
    decompose_into(e, &mut out);
    Ok(out)
}

fn decompose_into(e: &[NodeId], out: &mut Vec<Vec<NodeId>>) {
    let n = e.len();
    let p = smallest_prime_factor(n);
    if p == n {
        out.push(e.to_vec());
        return;
    }
    let m = n / p;
    for block in e.chunks(m) {
        decompose_into(block, out);
    }
    for j in 0..m {
        out.push((0..p).map(|b| e[b * m + j]).collect());
    }
}
