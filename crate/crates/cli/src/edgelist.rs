//! Edge-list files: one `u v` pair per line, `#` comments, blank lines
//! ignored. Ids are arbitrary nonnegative integers and are densified to
//! `0..n` in order of first appearance.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use matchwidth_core::Graph;

use crate::InputError;

/// A loaded graph plus the original id of every dense vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeList {
    pub graph: Graph,
    pub ids: Vec<u64>,
}

pub fn parse_edge_list(text: &str) -> Result<EdgeList, InputError> {
    let mut index: HashMap<u64, usize> = HashMap::new();
    let mut ids = Vec::new();
    let mut edges = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: String| InputError::Line { line: line_no, msg };
        let mut toks = line.split_whitespace();
        let (Some(a), Some(b), None) = (toks.next(), toks.next(), toks.next()) else {
            return Err(err(format!("expected two vertex ids, got {line:?}")));
        };
        let parse = |t: &str| {
            t.parse::<u64>()
                .map_err(|_| err(format!("bad vertex id {t:?}")))
        };
        let (a, b) = (parse(a)?, parse(b)?);
        if a == b {
            return Err(err(format!("self-loop on {a}")));
        }
        if !seen.insert((a.min(b), a.max(b))) {
            return Err(err(format!("duplicate edge {a} {b}")));
        }
        let mut dense = |x: u64| {
            *index.entry(x).or_insert_with(|| {
                ids.push(x);
                ids.len() - 1
            })
        };
        let (u, v) = (dense(a), dense(b));
        edges.push((u, v));
    }
    let graph =
        Graph::from_edges(ids.len(), &edges).map_err(|e| InputError::Graph(e.to_string()))?;
    Ok(EdgeList { graph, ids })
}

pub fn load_edge_list(path: &Path) -> Result<EdgeList, InputError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| InputError::Io(format!("{}: {e}", path.display())))?;
    parse_edge_list(&text).map_err(|e| match e {
        InputError::Line { line, msg } => {
            InputError::Io(format!("{}:{line}: {msg}", path.display()))
        }
        other => other,
    })
}

/// Serializes with original ids (dense ids when `ids` is empty).
pub fn write_edge_list(g: &Graph, ids: &[u64]) -> String {
    let name = |v: usize| if ids.is_empty() { v as u64 } else { ids[v] };
    let mut s = String::new();
    for (u, v) in g.edges() {
        let _ = writeln!(s, "{} {}", name(u), name(v));
    }
    s
}
