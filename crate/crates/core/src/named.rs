//! Named pattern families.
//!
//! Names parse from strings such as `path:5`, `cycle:6`, `clique:4`,
//! `star:3` (three leaves), `pbar:5`, `biclique:3,3` and `named:X`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PatternName {
    Path(usize),
    Cycle(usize),
    Clique(usize),
    /// Star with the given number of leaves.
    Star(usize),
    /// Complement of the path on `k` vertices.
    ComplementPath(usize),
    Biclique(usize, usize),
    /// Hexagon with three ears, each a vertex joined to two hexagon vertices
    /// at distance two (9 vertices, 12 edges).
    X,
    /// Three hubs joined pairwise by two disjoint 3-edge paths.
    Y,
    /// A width-4 supergraph of `Y` of treewidth 2.
    Z,
    /// Triangle with a 3-vertex tail.
    T33,
    K4MinusE,
    Petersen,
}

impl fmt::Display for PatternName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternName::Path(k) => write!(f, "path:{k}"),
            PatternName::Cycle(k) => write!(f, "cycle:{k}"),
            PatternName::Clique(k) => write!(f, "clique:{k}"),
            PatternName::Star(k) => write!(f, "star:{k}"),
            PatternName::ComplementPath(k) => write!(f, "pbar:{k}"),
            PatternName::Biclique(a, b) => write!(f, "biclique:{a},{b}"),
            PatternName::X => f.write_str("named:X"),
            PatternName::Y => f.write_str("named:Y"),
            PatternName::Z => f.write_str("named:Z"),
            PatternName::T33 => f.write_str("named:T33"),
            PatternName::K4MinusE => f.write_str("named:K4-e"),
            PatternName::Petersen => f.write_str("named:petersen"),
        }
    }
}

impl FromStr for PatternName {
    type Err = Error;

    fn from_str(s: &str) -> Result<PatternName> {
        let bad = || Error::BadPattern(s.to_string());
        let (family, arg) = s.split_once(':').ok_or_else(bad)?;
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
        let family = family.trim().to_ascii_lowercase();
        let name = match family.as_str() {
            "path" | "p" => PatternName::Path(num(arg)?),
            "cycle" | "c" => PatternName::Cycle(num(arg)?),
            "clique" | "k" => PatternName::Clique(num(arg)?),
            "star" => PatternName::Star(num(arg)?),
            "complement-path" | "pbar" => PatternName::ComplementPath(num(arg)?),
            "biclique" | "kmn" => {
                let (a, b) = arg.split_once(',').ok_or_else(bad)?;
                PatternName::Biclique(num(a)?, num(b)?)
            }
            "named" => match arg.trim().to_ascii_lowercase().as_str() {
                "x" => PatternName::X,
                "y" => PatternName::Y,
                "z" => PatternName::Z,
                "t33" => PatternName::T33,
                "k4-e" => PatternName::K4MinusE,
                "petersen" => PatternName::Petersen,
                _ => return Err(bad()),
            },
            _ => return Err(bad()),
        };
        Ok(name)
    }
}

fn path_edges(k: usize) -> Vec<(usize, usize)> {
    (1..k).map(|i| (i - 1, i)).collect()
}

/// The three hubs of `Y` are 0, 1, 2; path `a-x-y-b` uses fresh `x`, `y`.
fn y_edges() -> Vec<(usize, usize)> {
    let mut e = Vec::new();
    let mut next = 3;
    for (a, b) in [(0, 1), (0, 1), (0, 2), (0, 2), (1, 2), (1, 2)] {
        e.extend([(a, next), (next, next + 1), (next + 1, b)]);
        next += 2;
    }
    e
}

pub fn make_pattern(name: &PatternName) -> Result<Graph> {
    let small = |k: usize, min: usize| {
        if k < min {
            Err(Error::BadPattern(format!(
                "{name} needs size at least {min}"
            )))
        } else {
            Ok(())
        }
    };
    let g = match *name {
        PatternName::Path(k) => {
            small(k, 1)?;
            Graph::from_edges(k, &path_edges(k))?
        }
        PatternName::Cycle(k) => {
            small(k, 3)?;
            let mut e = path_edges(k);
            e.push((0, k - 1));
            Graph::from_edges(k, &e)?
        }
        PatternName::Clique(k) => {
            small(k, 1)?;
            Graph::empty(k).complement()
        }
        PatternName::Star(k) => {
            small(k, 1)?;
            let e: Vec<_> = (1..=k).map(|i| (0, i)).collect();
            Graph::from_edges(k + 1, &e)?
        }
        PatternName::ComplementPath(k) => {
            small(k, 1)?;
            Graph::from_edges(k, &path_edges(k))?.complement()
        }
        PatternName::Biclique(a, b) => {
            small(a.min(b), 1)?;
            let mut e = Vec::new();
            for i in 0..a {
                for j in 0..b {
                    e.push((i, a + j));
                }
            }
            Graph::from_edges(a + b, &e)?
        }
        PatternName::X => {
            let mut e: Vec<_> = (0..6).map(|i| (i, (i + 1) % 6)).collect();
            e.extend([(6, 0), (6, 2), (7, 2), (7, 4), (8, 4), (8, 0)]);
            Graph::from_edges(9, &e)?
        }
        PatternName::Y => Graph::from_edges(15, &y_edges())?,
        PatternName::Z => {
            // Y plus a common neighbor of two hubs.
            let mut e = y_edges();
            e.extend(Z_EXTRA);
            Graph::from_edges(15 + Z_NEW, &e)?
        }
        PatternName::T33 => {
            Graph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 5)])?
        }
        PatternName::K4MinusE => Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)])?,
        PatternName::Petersen => {
            let mut e = Vec::new();
            for i in 0..5 {
                e.push((i, (i + 1) % 5));
                e.push((i, i + 5));
                e.push((5 + i, 5 + (i + 2) % 5));
            }
            Graph::from_edges(10, &e)?
        }
    };
    Ok(g)
}

/// Number of vertices `Z` adds to `Y`.
const Z_NEW: usize = 1;
/// Edges `Z` adds to `Y`.
const Z_EXTRA: &[(usize, usize)] = &[(15, 0), (15, 1)];

/// Parses and builds in one step.
pub fn pattern_from_str(s: &str) -> Result<Graph> {
    make_pattern(&s.parse()?)
}

/// Every accepted spelling maps back to a canonical spelling.
pub fn canonical_name(s: &str) -> Result<String> {
    Ok(s.parse::<PatternName>()?.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        let c4 = pattern_from_str("cycle:4").unwrap();
        assert_eq!((c4.vertex_count(), c4.edge_count()), (4, 4));
        let x = pattern_from_str("named:X").unwrap();
        assert_eq!((x.vertex_count(), x.edge_count()), (9, 12));
        let pb = pattern_from_str("complement-path:5").unwrap();
        assert_eq!((pb.vertex_count(), pb.edge_count()), (5, 6));
        let p = pattern_from_str("named:petersen").unwrap();
        assert_eq!((p.vertex_count(), p.edge_count()), (10, 15));
        assert!((0..10).all(|v| p.degree(v) == 3));
        let y = pattern_from_str("named:Y").unwrap();
        assert_eq!((y.vertex_count(), y.edge_count()), (15, 18));
        let z = pattern_from_str("named:Z").unwrap();
        let keep: Vec<usize> = (0..15).collect();
        assert_eq!(z.induced_subgraph(&keep), y);
    }

    #[test]
    fn rejects_bad_names() {
        assert!(pattern_from_str("cycle:2").is_err());
        assert!(pattern_from_str("cycle").is_err());
        assert!(pattern_from_str("wheel:5").is_err());
        assert!(pattern_from_str("named:W").is_err());
    }

    #[test]
    fn display_round_trips() {
        for s in [
            "path:3",
            "cycle:7",
            "pbar:6",
            "biclique:2,3",
            "named:K4-e",
            "star:4",
        ] {
            let n: PatternName = s.parse().unwrap();
            assert_eq!(n.to_string().parse::<PatternName>().unwrap(), n);
        }
        assert_eq!(canonical_name("complement-path:4").unwrap(), "pbar:4");
    }
}
