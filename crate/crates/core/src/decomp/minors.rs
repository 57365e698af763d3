use alloc::vec;
use alloc::vec::Vec;
use hashbrown::HashSet;

use crate::canon::{canonical_form, CanonicalForm, CANON_LIMIT};
use crate::error::Result;
use crate::graph::Graph;
use crate::named::{make_pattern, PatternName};

/// Does `g` contain an induced copy of `pattern`? Plain backtracking.
pub fn has_induced_subgraph(pattern: &Graph, g: &Graph) -> bool {
    let k = pattern.vertex_count();
    if k > g.vertex_count() {
        return false;
    }
    let mut map = vec![usize::MAX; k];
    let mut used = vec![false; g.vertex_count()];
    fn go(p: &Graph, g: &Graph, i: usize, map: &mut [usize], used: &mut [bool]) -> bool {
        if i == map.len() {
            return true;
        }
        for x in 0..g.vertex_count() {
            if used[x] || g.degree(x) < p.degree(i) {
                continue;
            }
            if (0..i).all(|j| p.has_edge(i, j) == g.has_edge(x, map[j])) {
                map[i] = x;
                used[x] = true;
                if go(p, g, i + 1, map, used) {
                    return true;
                }
                used[x] = false;
            }
        }
        false
    }
    go(pattern, g, 0, &mut map, &mut used)
}

/// True iff `g` has no induced C4, P6 or T33 (triangle with a 3-vertex tail).
pub fn forbidden_mtd3_free(g: &Graph) -> bool {
    [
        PatternName::Cycle(4),
        PatternName::Path(6),
        PatternName::T33,
    ]
    .iter()
    .all(|name| {
        let f = make_pattern(name).expect("fixed pattern");
        !has_induced_subgraph(&f, g)
    })
}

fn contract(g: &Graph, u: usize, v: usize) -> Graph {
    // v merges into u; vertices above v shift down
    let n = g.vertex_count();
    let id = |x: usize| {
        if x == v {
            if u > v {
                u - 1
            } else {
                u
            }
        } else if x > v {
            x - 1
        } else {
            x
        }
    };
    let mut edges = Vec::new();
    for (a, b) in g.edges() {
        let (a, b) = (id(a), id(b));
        if a != b {
            edges.push((a.min(b), a.max(b)));
        }
    }
    Graph::from_edges_dedup(n - 1, &edges).expect("contraction stays simple")
}

fn delete(g: &Graph, v: usize) -> Graph {
    let keep: Vec<usize> = (0..g.vertex_count()).filter(|&x| x != v).collect();
    g.induced_subgraph(&keep)
}

/// Is `pattern` obtainable from `g` by deleting vertices and contracting
/// edges? Exhaustive search over all such reductions, deduplicated up to
/// isomorphism.
pub fn is_induced_minor(pattern: &Graph, g: &Graph) -> Result<bool> {
    g.check_size(CANON_LIMIT)?;
    pattern.check_size(CANON_LIMIT)?;
    let (pn, pm) = (pattern.vertex_count(), pattern.edge_count());
    let target = canonical_form(pattern)?;
    if g.vertex_count() < pn || g.edge_count() < pm {
        return Ok(false);
    }
    let mut seen: HashSet<CanonicalForm> = HashSet::new();
    let mut stack = vec![g.clone()];
    seen.insert(canonical_form(g)?);
    while let Some(h) = stack.pop() {
        if h.vertex_count() == pn {
            if canonical_form(&h)? == target {
                return Ok(true);
            }
            continue;
        }
        let mut next = Vec::new();
        for v in 0..h.vertex_count() {
            next.push(delete(&h, v));
        }
        for (u, v) in h.edges() {
            next.push(contract(&h, u, v));
        }
        for x in next {
            if x.vertex_count() < pn || x.edge_count() < pm {
                continue;
            }
            if seen.insert(canonical_form(&x)?) {
                stack.push(x);
            }
        }
    }
    Ok(false)
}
