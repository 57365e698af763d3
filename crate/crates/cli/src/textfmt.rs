//! Text formats for decompositions.
//!
//! ```text
//! elimtree n=4 root=0
//! 1 0
//! 2 1
//! 3 1
//!
//! treedecomp n=5
//! bag 0: 0 1 2
//! bag 1: 2 3 4
//! link 0 1
//! match 0: 0-1
//! match 1: 3-4
//! ```
//!
//! A block ends at end of input or at a line reading `end`. Unknown
//! directives are errors.

use std::fmt::Write as _;

use matchwidth_core::decomp::{EliminationTree, MatchedTreeDecomposition, TreeDecomposition};
use matchwidth_core::Graph;

use crate::InputError;

/// Lines with 1-based numbers, skipping blanks and `#` comments.
pub struct Lines<'a> {
    inner: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
}

impl<'a> Lines<'a> {
    pub fn new(text: &'a str) -> Self {
        Lines {
            inner: text.lines().enumerate().peekable(),
        }
    }

    fn skip_blank(&mut self) {
        while let Some((_, l)) = self.inner.peek() {
            let t = l.trim();
            if t.is_empty() || t.starts_with('#') {
                self.inner.next();
            } else {
                break;
            }
        }
    }

    pub fn peek(&mut self) -> Option<(usize, &'a str)> {
        self.skip_blank();
        self.inner.peek().map(|&(i, l)| (i + 1, l.trim()))
    }

    pub fn next_line(&mut self) -> Option<(usize, &'a str)> {
        self.skip_blank();
        self.inner.next().map(|(i, l)| (i + 1, l.trim()))
    }

    pub fn expect(&mut self, what: &str) -> Result<(usize, &'a str), InputError> {
        self.next_line()
            .ok_or_else(|| InputError::Truncated(format!("expected {what}")))
    }
}

fn bad(line: usize, msg: impl Into<String>) -> InputError {
    InputError::Line {
        line,
        msg: msg.into(),
    }
}

/// `key=value` token.
fn keyed(line: usize, tok: Option<&str>, key: &str) -> Result<usize, InputError> {
    tok.and_then(|t| t.strip_prefix(key))
        .and_then(|t| t.strip_prefix('='))
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| bad(line, format!("expected {key}=<number>")))
}

fn num(line: usize, t: &str) -> Result<usize, InputError> {
    t.parse()
        .map_err(|_| bad(line, format!("bad number {t:?}")))
}

fn pair(line: usize, t: &str) -> Result<(usize, usize), InputError> {
    let (a, b) = t
        .split_once('-')
        .ok_or_else(|| bad(line, format!("expected u-v, got {t:?}")))?;
    Ok((num(line, a)?, num(line, b)?))
}

fn at_block_end(r: &mut Lines<'_>) -> bool {
    match r.peek() {
        None => true,
        Some((_, "end")) => {
            r.next_line();
            true
        }
        _ => false,
    }
}

pub fn write_elim_tree(t: &EliminationTree) -> String {
    let mut s = format!("elimtree n={} root={}\n", t.vertex_count(), t.root());
    let mut pairs = t.pairs();
    pairs.sort_unstable();
    for (c, p) in pairs {
        let _ = writeln!(s, "{c} {p}");
    }
    s
}

pub fn read_elim_tree(r: &mut Lines<'_>) -> Result<EliminationTree, InputError> {
    let (ln, head) = r.expect("elimtree header")?;
    let mut toks = head.split_whitespace();
    if toks.next() != Some("elimtree") {
        return Err(bad(ln, format!("expected elimtree header, got {head:?}")));
    }
    let n = keyed(ln, toks.next(), "n")?;
    let root = keyed(ln, toks.next(), "root")?;
    let mut pairs = Vec::new();
    while !at_block_end(r) {
        let (ln, l) = r.next_line().expect("peeked");
        let v: Vec<&str> = l.split_whitespace().collect();
        match v.as_slice() {
            [c, p] if c.bytes().all(|b| b.is_ascii_digit()) => {
                pairs.push((num(ln, c)?, num(ln, p)?))
            }
            _ => return Err(bad(ln, format!("unknown directive {l:?}"))),
        }
    }
    if pairs.len() + 1 != n {
        return Err(InputError::Truncated(format!(
            "elimtree lists {} of {} parent links",
            pairs.len(),
            n - 1
        )));
    }
    EliminationTree::from_pairs(n, root, &pairs).map_err(|e| InputError::Graph(e.to_string()))
}

pub fn parse_elim_tree(text: &str) -> Result<EliminationTree, InputError> {
    read_elim_tree(&mut Lines::new(text))
}

pub fn write_tree_decomposition(
    n: usize,
    td: &TreeDecomposition,
    matchings: Option<&[Vec<(usize, usize)>]>,
) -> String {
    let mut s = format!("treedecomp n={n}\n");
    for (i, b) in td.bags().iter().enumerate() {
        let _ = write!(s, "bag {i}:");
        for v in b {
            let _ = write!(s, " {v}");
        }
        s.push('\n');
    }
    for (a, b) in td.links() {
        let _ = writeln!(s, "link {a} {b}");
    }
    for (i, m) in matchings.unwrap_or(&[]).iter().enumerate() {
        let _ = write!(s, "match {i}:");
        for (u, v) in m {
            let _ = write!(s, " {u}-{v}");
        }
        s.push('\n');
    }
    s
}

pub fn write_matched_td(n: usize, d: &MatchedTreeDecomposition) -> String {
    write_tree_decomposition(n, d.decomposition(), Some(d.matchings()))
}

/// A parsed decomposition; `matchings` is present when the text lists them.
pub struct ParsedDecomposition {
    pub n: usize,
    pub td: TreeDecomposition,
    pub matchings: Option<Vec<Vec<(usize, usize)>>>,
}

impl ParsedDecomposition {
    /// Verified against `g`; listed matchings are checked, missing ones are
    /// recomputed.
    pub fn matched(self, g: &Graph) -> Result<MatchedTreeDecomposition, InputError> {
        if self.n != g.vertex_count() {
            return Err(InputError::Graph(format!(
                "decomposition has n={}, graph has {}",
                self.n,
                g.vertex_count()
            )));
        }
        let r = match self.matchings {
            Some(m) => MatchedTreeDecomposition::new(g, self.td, m),
            None => MatchedTreeDecomposition::certify(g, self.td),
        };
        r.map_err(|e| InputError::Graph(e.to_string()))
    }
}

pub fn read_tree_decomposition(r: &mut Lines<'_>) -> Result<ParsedDecomposition, InputError> {
    let (ln, head) = r.expect("treedecomp header")?;
    let mut toks = head.split_whitespace();
    if toks.next() != Some("treedecomp") {
        return Err(bad(ln, format!("expected treedecomp header, got {head:?}")));
    }
    let n = keyed(ln, toks.next(), "n")?;
    let mut bags: Vec<Vec<usize>> = Vec::new();
    let mut links = Vec::new();
    let mut matches: Vec<Option<Vec<(usize, usize)>>> = Vec::new();
    while !at_block_end(r) {
        let (ln, l) = r.next_line().expect("peeked");
        let (directive, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        match directive {
            "bag" => {
                let (id, vs) = rest
                    .split_once(':')
                    .ok_or_else(|| bad(ln, "expected bag <id>: ..."))?;
                if num(ln, id.trim())? != bags.len() {
                    return Err(bad(
                        ln,
                        format!("bags must be numbered 0, 1, ...; expected {}", bags.len()),
                    ));
                }
                let b = vs
                    .split_whitespace()
                    .map(|t| num(ln, t))
                    .collect::<Result<Vec<_>, _>>()?;
                if let Some(&v) = b.iter().find(|&&v| v >= n) {
                    return Err(bad(ln, format!("vertex {v} out of range")));
                }
                bags.push(b);
            }
            "link" => {
                let v: Vec<&str> = rest.split_whitespace().collect();
                let [a, b] = v.as_slice() else {
                    return Err(bad(ln, "expected link <a> <b>"));
                };
                links.push((num(ln, a)?, num(ln, b)?));
            }
            "match" => {
                let (id, ps) = rest
                    .split_once(':')
                    .ok_or_else(|| bad(ln, "expected match <id>: ..."))?;
                let id = num(ln, id.trim())?;
                let m = ps
                    .split_whitespace()
                    .map(|t| pair(ln, t))
                    .collect::<Result<Vec<_>, _>>()?;
                if matches.len() <= id {
                    matches.resize(id + 1, None);
                }
                matches[id] = Some(m);
            }
            _ => return Err(bad(ln, format!("unknown directive {directive:?}"))),
        }
    }
    let td = TreeDecomposition::new(bags, links).map_err(|e| InputError::Graph(e.to_string()))?;
    let matchings = if matches.is_empty() {
        None
    } else {
        if matches.len() > td.bags().len() {
            return Err(InputError::Graph(format!(
                "match line for missing bag {}",
                matches.len() - 1
            )));
        }
        matches.resize(td.bags().len(), None);
        let all: Option<Vec<_>> = matches.into_iter().collect();
        Some(all.ok_or_else(|| InputError::Graph("some bags lack a match line".into()))?)
    };
    Ok(ParsedDecomposition { n, td, matchings })
}

pub fn parse_tree_decomposition(text: &str) -> Result<ParsedDecomposition, InputError> {
    read_tree_decomposition(&mut Lines::new(text))
}
