//! Plain-text hypergraph files.
//!
//! One hyperedge per line as whitespace-separated 0-based node ids. Lines starting
//! with `#` are comments. An optional `nodes=N` line fixes the node count;
//! otherwise it is one more than the largest id. Lines naming fewer than two
//! distinct nodes are skipped and counted.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::hypergraph::{Hyperedge, Hypergraph, NodeId};

#[derive(Debug, Clone)]
pub struct Loaded {
    pub hypergraph: Hypergraph,
    /// Lines skipped because they named fewer than two distinct nodes.
    pub skipped: usize,
}

pub fn load_hypergraph(path: impl AsRef<Path>) -> Result<Loaded> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_hypergraph(&text, path)
}

/// Parses file contents; `origin` only labels errors.
pub fn parse_hypergraph(text: &str, origin: impl AsRef<Path>) -> Result<Loaded> {
    let origin = origin.as_ref();
    let err = |line: usize, msg: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        msg,
    };
    let mut declared: Option<usize> = None;
    let mut edges = Vec::new();
    let mut skipped = 0;
    let mut max_id: Option<NodeId> = None;
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("nodes=") {
            if declared.is_some() || !edges.is_empty() || skipped > 0 {
                return Err(err(lineno, "nodes= header must come before any hyperedge".into()));
            }
            let n = rest
                .trim()
                .parse::<usize>()
                .map_err(|e| err(lineno, format!("bad node count {rest:?}: {e}")))?;
            declared = Some(n);
            continue;
        }
        let mut ids = Vec::new();
        for tok in line.split_whitespace() {
            let id = tok
                .parse::<u64>()
                .map_err(|_| err(lineno, format!("bad node id {tok:?}")))?;
            let limit = declared.map_or(NodeId::MAX as u64, |n| n as u64);
            if id >= limit {
                return Err(Error::NodeOutOfRange {
                    node: id,
                    node_count: declared.unwrap_or(NodeId::MAX as usize),
                });
            }
            ids.push(id as NodeId);
        }
        match Hyperedge::new(ids) {
            Ok(e) => {
                max_id = max_id.max(e.members().last().copied());
                edges.push(e);
            }
            Err(Error::EdgeTooSmall(_)) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    let node_count = declared.unwrap_or_else(|| max_id.map_or(0, |m| m as usize + 1));
    Ok(Loaded {
        hypergraph: Hypergraph::explicit(node_count, edges)?,
        skipped,
    })
}

/// Writes the `nodes=N` header followed by the hyperedges in canonical order.
pub fn write_hypergraph<W: Write>(h: &Hypergraph, mut w: W) -> std::io::Result<()> {
    let list = h
        .edge_list()
        .ok_or_else(|| std::io::Error::new(std::io::ErrorKind::InvalidInput, "implicit hypergraph"))?;
    writeln!(w, "nodes={}", h.node_count())?;
    for e in list.iter() {
        let mut first = true;
        for v in e {
            if !first {
                w.write_all(b" ")?;
            }
            write!(w, "{v}")?;
            first = false;
        }
        w.write_all(b"\n")?;
    }
    w.flush()
}

pub fn save_hypergraph(h: &Hypergraph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if !h.is_explicit() {
        return Err(Error::NotExplicit);
    }
    let f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_hypergraph(h, std::io::BufWriter::new(f)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_gnm, GnmParams};
    use crate::stats::trial_rng;

    #[test]
    fn small_file() {
        let l = parse_hypergraph("0 1\n1 2 3\n", "mem").unwrap();
        assert_eq!(l.hypergraph.node_count(), 4);
        assert_eq!(
            l.hypergraph.edge_list().unwrap().to_hyperedges(),
            vec![Hyperedge::new([0, 1]).unwrap(), Hyperedge::new([1, 2, 3]).unwrap()]
        );
        assert_eq!(l.skipped, 0);
    }

    #[test]
    fn singleton_skipped() {
        let l = parse_hypergraph("# comment\n5\n0 1\n2 2\n", "mem").unwrap();
        assert_eq!(l.skipped, 2);
        assert_eq!(l.hypergraph.edge_list().unwrap().len(), 1);
    }

    #[test]
    fn header_and_range() {
        let l = parse_hypergraph("nodes=10\n0 1\n", "mem").unwrap();
        assert_eq!(l.hypergraph.node_count(), 10);
        assert!(matches!(
            parse_hypergraph("nodes=3\n0 3\n", "mem"),
            Err(Error::NodeOutOfRange { node: 3, node_count: 3 })
        ));
        assert!(matches!(parse_hypergraph("0 x\n", "f.txt"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_hypergraph("0 1\nnodes=4\n", "f.txt"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn round_trip() {
        let h = gen_gnm(&GnmParams::new(40, [(2, 50), (3, 30), (7, 5)]), &mut trial_rng(4, 0)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("h.txt");
        save_hypergraph(&h, &path).unwrap();
        let back = load_hypergraph(&path).unwrap();
        assert_eq!(back.skipped, 0);
        assert_eq!(back.hypergraph.node_count(), 40);
        assert_eq!(back.hypergraph.edge_list(), h.edge_list());
    }

    #[test]
    fn implicit_cannot_be_saved() {
        let dir = tempfile::tempdir().unwrap();
        let h = Hypergraph::complete(4).unwrap();
        assert!(matches!(save_hypergraph(&h, dir.path().join("x")), Err(Error::NotExplicit)));
    }
}
