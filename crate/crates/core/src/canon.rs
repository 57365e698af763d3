//! Canonical forms and automorphisms of small graphs.
//!
//! Canonical labeling is individualization-refinement: color refinement to an
//! equitable ordered partition, branch on the first non-singleton cell, keep the
//! leaf with the largest adjacency code. Automorphisms found on the way (two
//! leaves with equal codes) prune sibling branches lying in one orbit.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Result;
use crate::graph::Graph;

/// Largest graph accepted by the routines in this module.
pub const CANON_LIMIT: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm {
    pub vertex_count: usize,
    /// Edges `(u, v)`, `u < v`, under the canonical relabeling, sorted.
    pub edges: Vec<(u8, u8)>,
}

impl CanonicalForm {
    pub fn to_graph(&self) -> Graph {
        let e: Vec<_> = self
            .edges
            .iter()
            .map(|&(u, v)| (u as usize, v as usize))
            .collect();
        Graph::from_edges(self.vertex_count, &e).expect("canonical edge list is simple")
    }
}

type Cells = Vec<Vec<u8>>;

fn refine(adj: &[u32], cells: &mut Cells) {
    'restart: loop {
        for s in 0..cells.len() {
            let smask = cells[s].iter().fold(0u32, |m, &v| m | 1 << v);
            for c in 0..cells.len() {
                if cells[c].len() == 1 {
                    continue;
                }
                let cnt = |v: u8| (adj[v as usize] & smask).count_ones();
                let first = cnt(cells[c][0]);
                if cells[c].iter().all(|&v| cnt(v) == first) {
                    continue;
                }
                let mut keyed: Vec<(u32, u8)> = cells[c].iter().map(|&v| (cnt(v), v)).collect();
                keyed.sort_unstable();
                let mut groups: Cells = Vec::new();
                let mut last = u32::MAX;
                for (k, v) in keyed {
                    if k != last {
                        groups.push(Vec::new());
                        last = k;
                    }
                    groups.last_mut().unwrap().push(v);
                }
                cells.splice(c..=c, groups);
                continue 'restart;
            }
        }
        return;
    }
}

fn leaf_code(adj: &[u32], order: &[u8]) -> u128 {
    let mut code = 0u128;
    for i in 0..order.len() {
        for j in i + 1..order.len() {
            code <<= 1;
            if adj[order[i] as usize] >> order[j] & 1 == 1 {
                code |= 1;
            }
        }
    }
    code
}

struct Search<'a> {
    adj: &'a [u32],
    n: usize,
    first: Option<(Vec<u8>, u128, Vec<u8>)>,
    best: Option<(Vec<u8>, u128)>,
    generators: Vec<Vec<u8>>,
}

impl Search<'_> {
    /// Returns `Some(level)` to request a jump back to that level.
    fn run(&mut self, cells: Cells, prefix: &mut Vec<u8>) -> Option<usize> {
        let Some(target) = cells.iter().position(|c| c.len() > 1) else {
            let order: Vec<u8> = cells.iter().map(|c| c[0]).collect();
            return self.leaf(order, prefix);
        };
        let level = prefix.len();
        let mut tried: Vec<u8> = Vec::new();
        for &v in &cells[target] {
            if !tried.is_empty() && self.same_orbit(prefix, &tried, v) {
                continue;
            }
            tried.push(v);
            let mut next = cells.clone();
            let rest: Vec<u8> = next[target].iter().copied().filter(|&w| w != v).collect();
            next.splice(target..=target, [vec![v], rest]);
            refine(self.adj, &mut next);
            prefix.push(v);
            let jump = self.run(next, prefix);
            prefix.pop();
            if let Some(l) = jump {
                if l < level {
                    return Some(l);
                }
            }
        }
        None
    }

    fn leaf(&mut self, order: Vec<u8>, prefix: &[u8]) -> Option<usize> {
        let code = leaf_code(self.adj, &order);
        let Some((first_order, first_code, first_prefix)) = &self.first else {
            self.first = Some((order.clone(), code, prefix.to_vec()));
            self.best = Some((order, code));
            return None;
        };
        if code == *first_code {
            let mut gamma = vec![0u8; self.n];
            for (a, b) in first_order.iter().zip(&order) {
                gamma[*a as usize] = *b;
            }
            self.generators.push(gamma);
            let diverge = first_prefix
                .iter()
                .zip(prefix)
                .position(|(a, b)| a != b)
                .unwrap_or(prefix.len());
            return Some(diverge);
        }
        let (best_order, best_code) = self.best.as_ref().unwrap();
        if code == *best_code {
            let mut gamma = vec![0u8; self.n];
            for (a, b) in best_order.iter().zip(&order) {
                gamma[*a as usize] = *b;
            }
            self.generators.push(gamma);
        } else if code > *best_code {
            self.best = Some((order, code));
        }
        None
    }

    fn same_orbit(&self, prefix: &[u8], tried: &[u8], v: u8) -> bool {
        let mut parent: Vec<u8> = (0..self.n as u8).collect();
        fn find(p: &mut [u8], mut x: u8) -> u8 {
            while p[x as usize] != x {
                p[x as usize] = p[p[x as usize] as usize];
                x = p[x as usize];
            }
            x
        }
        for g in &self.generators {
            if prefix.iter().any(|&p| g[p as usize] != p) {
                continue;
            }
            for x in 0..self.n as u8 {
                let (a, b) = (find(&mut parent, x), find(&mut parent, g[x as usize]));
                if a != b {
                    parent[a as usize] = b;
                }
            }
        }
        let rv = find(&mut parent, v);
        tried.iter().any(|&t| find(&mut parent, t) == rv)
    }
}

/// Canonical form plus the labeling `perm[v] = canonical position of v`.
pub fn canonical_labeling(g: &Graph) -> Result<(CanonicalForm, Vec<usize>)> {
    g.check_size(CANON_LIMIT)?;
    let n = g.vertex_count();
    if n == 0 {
        return Ok((
            CanonicalForm {
                vertex_count: 0,
                edges: Vec::new(),
            },
            Vec::new(),
        ));
    }
    let adj = g.masks();
    let mut cells: Cells = vec![(0..n as u8).collect()];
    refine(&adj, &mut cells);
    let mut s = Search {
        adj: &adj,
        n,
        first: None,
        best: None,
        generators: Vec::new(),
    };
    s.run(cells, &mut Vec::new());
    let (order, _) = s.best.unwrap();
    let mut perm = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        perm[v as usize] = i;
    }
    let mut edges: Vec<(u8, u8)> = g
        .edges()
        .map(|(u, v)| {
            let (a, b) = (perm[u] as u8, perm[v] as u8);
            (a.min(b), a.max(b))
        })
        .collect();
    edges.sort_unstable();
    Ok((
        CanonicalForm {
            vertex_count: n,
            edges,
        },
        perm,
    ))
}

pub fn canonical_form(g: &Graph) -> Result<CanonicalForm> {
    canonical_labeling(g).map(|(c, _)| c)
}

/// The canonical representative of `g`'s isomorphism class.
pub fn canonical_graph(g: &Graph) -> Result<Graph> {
    canonical_form(g).map(|c| c.to_graph())
}

pub fn is_isomorphic(a: &Graph, b: &Graph) -> Result<bool> {
    if a.vertex_count() != b.vertex_count() || a.edge_count() != b.edge_count() {
        return Ok(false);
    }
    Ok(canonical_form(a)? == canonical_form(b)?)
}

/// Backtracking extension of a partial automorphism, vertex by vertex.
struct AutSearch<'a> {
    adj: &'a [u32],
    deg: Vec<u32>,
    n: usize,
}

impl AutSearch<'_> {
    fn consistent(&self, map: &[u8], v: usize, img: u8) -> bool {
        if self.deg[v] != self.deg[img as usize] {
            return false;
        }
        for (w, &m) in map.iter().enumerate() {
            if m == u8::MAX || w == v {
                continue;
            }
            let e1 = self.adj[v] >> w & 1;
            let e2 = self.adj[img as usize] >> m & 1;
            if e1 != e2 {
                return false;
            }
        }
        true
    }

    /// Visits every completion of `map`; the visitor returns false to stop.
    fn extend(&self, map: &mut Vec<u8>, used: u32, visit: &mut dyn FnMut(&[u8]) -> bool) -> bool {
        let Some(v) = map.iter().position(|&m| m == u8::MAX) else {
            return visit(map);
        };
        for img in 0..self.n as u8 {
            if used >> img & 1 == 1 || !self.consistent(map, v, img) {
                continue;
            }
            map[v] = img;
            let go_on = self.extend(map, used | 1 << img, visit);
            map[v] = u8::MAX;
            if !go_on {
                return false;
            }
        }
        true
    }
}

fn aut_search(g: &Graph) -> Result<(Vec<u32>, Vec<u32>)> {
    g.check_size(CANON_LIMIT)?;
    let adj = g.masks();
    let deg = adj.iter().map(|m| m.count_ones()).collect();
    Ok((adj, deg))
}

/// |Aut(g)| via a stabilizer chain: the orbit of each vertex under the
/// pointwise stabilizer of the earlier ones, found by existence searches.
pub fn automorphism_count(g: &Graph) -> Result<u128> {
    let (adj, deg) = aut_search(g)?;
    let n = g.vertex_count();
    let s = AutSearch { adj: &adj, deg, n };
    let mut total: u128 = 1;
    for v in 0..n {
        let mut orbit = 0u128;
        for u in 0..n {
            if u < v {
                continue;
            }
            let mut map = vec![u8::MAX; n];
            let mut used = 0u32;
            for w in 0..v {
                map[w] = w as u8;
                used |= 1 << w;
            }
            if !s.consistent(&map, v, u as u8) {
                continue;
            }
            map[v] = u as u8;
            used |= 1 << u;
            let mut found = false;
            s.extend(&mut map, used, &mut |_| {
                found = true;
                false
            });
            if found {
                orbit += 1;
            }
        }
        total *= orbit;
    }
    Ok(total)
}

/// Every automorphism as a permutation `p` with `p[v]` the image of `v`.
pub fn automorphisms(g: &Graph) -> Result<Vec<Vec<usize>>> {
    let (adj, deg) = aut_search(g)?;
    let n = g.vertex_count();
    let s = AutSearch { adj: &adj, deg, n };
    let mut out = Vec::new();
    s.extend(&mut vec![u8::MAX; n], 0, &mut |m| {
        out.push(m.iter().map(|&x| x as usize).collect());
        true
    });
    Ok(out)
}
