//! On-disk spasm cache.
//!
//! ```text
//! spasm-cache v1
//! pattern cycle:4 terms=3
//! graph n=4 0-2 0-3 1-2 1-3 coeff 1/8
//! elimtree n=4 root=0
//! ...
//! end
//! graph n=3 0-2 1-2 coeff -1/4
//! ...
//! end-cache
//! ```
//!
//! Each `graph` record may be followed by an `elimtree` and/or a
//! `treedecomp` block, each closed by `end`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use matchwidth_core::canon::canonical_graph;
use matchwidth_core::decomp::MatchedEliminationTree;
use matchwidth_core::named::canonical_name;
use matchwidth_core::spasm::SpasmTerm;
use matchwidth_core::Graph;
use num_bigint::BigInt;
use num_rational::BigRational;

use crate::textfmt::{
    read_elim_tree, read_tree_decomposition, write_elim_tree, write_matched_td, Lines,
};
use crate::InputError;

pub const CACHE_HEADER: &str = "spasm-cache v1";
const CACHE_FOOTER: &str = "end-cache";

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SpasmCache {
    entries: BTreeMap<String, Vec<SpasmTerm>>,
}

/// Patterns are keyed by their canonical spelling when they have one.
fn key(name: &str) -> String {
    canonical_name(name).unwrap_or_else(|_| name.to_string())
}

impl SpasmCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, pattern: &str, terms: Vec<SpasmTerm>) {
        self.entries.insert(key(pattern), terms);
    }

    pub fn get(&self, pattern: &str) -> Option<&Vec<SpasmTerm>> {
        self.entries.get(&key(pattern))
    }

    pub fn patterns(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{CACHE_HEADER}\n");
        for (name, terms) in &self.entries {
            let _ = writeln!(s, "pattern {name} terms={}", terms.len());
            for t in terms {
                let q = &t.quotient;
                let _ = write!(s, "graph n={}", q.vertex_count());
                for (u, v) in q.edges() {
                    let _ = write!(s, " {u}-{v}");
                }
                let _ = writeln!(
                    s,
                    " coeff {}/{}",
                    t.coefficient.numer(),
                    t.coefficient.denom()
                );
                if let Some(w) = &t.mtd {
                    s.push_str(&write_elim_tree(w.tree()));
                    s.push_str("end\n");
                }
                if let Some(w) = &t.mtw {
                    s.push_str(&write_matched_td(q.vertex_count(), w));
                    s.push_str("end\n");
                }
            }
        }
        s.push_str(CACHE_FOOTER);
        s.push('\n');
        s
    }

    pub fn from_text(text: &str) -> Result<SpasmCache, InputError> {
        let mut r = Lines::new(text);
        match r.next_line() {
            Some((_, CACHE_HEADER)) => {}
            Some((ln, other)) if other.starts_with("spasm-cache") => {
                return Err(InputError::Line {
                    line: ln,
                    msg: format!("unsupported cache version {other:?}"),
                })
            }
            Some((ln, _)) => {
                return Err(InputError::Line {
                    line: ln,
                    msg: "not a spasm cache".into(),
                })
            }
            None => return Err(InputError::Truncated("empty cache file".into())),
        }
        let mut cache = SpasmCache::new();
        loop {
            let (ln, l) = r.expect("pattern record or end-cache")?;
            if l == CACHE_FOOTER {
                break;
            }
            let mut toks = l.split_whitespace();
            let (Some("pattern"), Some(name), Some(count)) =
                (toks.next(), toks.next(), toks.next())
            else {
                return Err(InputError::Line {
                    line: ln,
                    msg: format!("unknown directive {l:?}"),
                });
            };
            let count: usize = count
                .strip_prefix("terms=")
                .and_then(|c| c.parse().ok())
                .ok_or_else(|| InputError::Line {
                    line: ln,
                    msg: "expected terms=<count>".into(),
                })?;
            let mut terms = Vec::with_capacity(count);
            for _ in 0..count {
                terms.push(read_term(&mut r)?);
            }
            cache.entries.insert(name.to_string(), terms);
        }
        if let Some((ln, l)) = r.next_line() {
            return Err(InputError::Line {
                line: ln,
                msg: format!("trailing content {l:?}"),
            });
        }
        Ok(cache)
    }

    pub fn save(&self, path: &Path) -> Result<(), InputError> {
        std::fs::write(path, self.to_text())
            .map_err(|e| InputError::Io(format!("{}: {e}", path.display())))
    }

    pub fn load(path: &Path) -> Result<SpasmCache, InputError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| InputError::Io(format!("{}: {e}", path.display())))?;
        SpasmCache::from_text(&text).map_err(|e| match e {
            InputError::Line { line, msg } => {
                InputError::Io(format!("{}:{line}: {msg}", path.display()))
            }
            other => other,
        })
    }
}

fn read_term(r: &mut Lines<'_>) -> Result<SpasmTerm, InputError> {
    let (ln, l) = r.expect("graph record")?;
    let bad = |msg: String| InputError::Line { line: ln, msg };
    let toks: Vec<&str> = l.split_whitespace().collect();
    if toks.first() != Some(&"graph") || toks.len() < 4 || toks[toks.len() - 2] != "coeff" {
        return Err(bad(format!("expected graph record, got {l:?}")));
    }
    let n: usize = toks[1]
        .strip_prefix("n=")
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| bad("expected n=<count>".into()))?;
    let mut edges = Vec::new();
    for t in &toks[2..toks.len() - 2] {
        let e = t
            .split_once('-')
            .and_then(|(a, b)| Some((a.parse().ok()?, b.parse().ok()?)));
        edges.push(e.ok_or_else(|| bad(format!("bad edge {t:?}")))?);
    }
    let quotient = Graph::from_edges(n, &edges).map_err(|e| bad(e.to_string()))?;
    if canonical_graph(&quotient).map_err(|e| bad(e.to_string()))? != quotient {
        return Err(bad("graph is not in canonical form".into()));
    }
    let (p, q) = toks[toks.len() - 1]
        .split_once('/')
        .ok_or_else(|| bad("expected coeff p/q".into()))?;
    let parse = |x: &str| {
        x.parse::<BigInt>()
            .map_err(|_| bad(format!("bad coefficient part {x:?}")))
    };
    let (p, q) = (parse(p)?, parse(q)?);
    if q == BigInt::from(0) {
        return Err(bad("zero denominator".into()));
    }
    let mut term = SpasmTerm {
        quotient,
        coefficient: BigRational::new(p, q),
        mtd: None,
        mtw: None,
    };
    loop {
        match r.peek() {
            Some((_, l)) if l.starts_with("elimtree") => {
                let t = read_elim_tree(r)?;
                term.mtd = Some(
                    MatchedEliminationTree::new(&term.quotient, t)
                        .map_err(|e| bad(e.to_string()))?,
                );
            }
            Some((_, l)) if l.starts_with("treedecomp") => {
                term.mtw = Some(read_tree_decomposition(r)?.matched(&term.quotient)?);
            }
            _ => break,
        }
    }
    Ok(term)
}
