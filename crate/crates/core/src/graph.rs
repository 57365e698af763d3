//! Simple undirected graphs in compressed adjacency form.
//!
//! The same type serves as pattern and host. Neighbor lists are sorted, so the
//! arcs `(x, y)` come out grouped by source `x` when walking the adjacency.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    offsets: Vec<usize>,
    adj: Vec<u32>,
}

impl core::fmt::Debug for Graph {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "Graph(n={}, edges=[", self.vertex_count())?;
        for (i, (u, v)) in self.edges().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{u}-{v}")?;
        }
        write!(f, "])")
    }
}

impl Graph {
    /// Graph on `n` isolated vertices.
    pub fn empty(n: usize) -> Graph {
        Graph {
            offsets: vec![0; n + 1],
            adj: Vec::new(),
        }
    }

    /// Builds a graph, rejecting loops, repeated edges (in either orientation)
    /// and out-of-range endpoints.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        let mut deg = vec![0usize; n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::VertexOutOfRange {
                    vertex: u.max(v),
                    n,
                });
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            deg[u] += 1;
            deg[v] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for v in 0..n {
            offsets[v + 1] = offsets[v] + deg[v];
        }
        let mut fill = offsets.clone();
        let mut adj = vec![0u32; offsets[n]];
        for &(u, v) in edges {
            adj[fill[u]] = v as u32;
            fill[u] += 1;
            adj[fill[v]] = u as u32;
            fill[v] += 1;
        }
        for v in 0..n {
            let list = &mut adj[offsets[v]..offsets[v + 1]];
            list.sort_unstable();
            for w in list.windows(2) {
                if w[0] == w[1] {
                    let (a, b) = (v.min(w[0] as usize), v.max(w[0] as usize));
                    return Err(Error::DuplicateEdge(a, b));
                }
            }
        }
        Ok(Graph { offsets, adj })
    }

    /// Like [`Graph::from_edges`] but silently drops repeated edges. Loops are
    /// still rejected.
    pub fn from_edges_dedup(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        let mut e: Vec<(usize, usize)> = edges.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
        e.sort_unstable();
        e.dedup();
        Graph::from_edges(n, &e)
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.adj.len() / 2
    }

    /// Number of arcs, i.e. `2m`.
    pub fn arc_count(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn max_degree(&self) -> usize {
        (0..self.vertex_count())
            .map(|v| self.degree(v))
            .max()
            .unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        if self.degree(u) > self.degree(v) {
            return self.has_edge(v, u);
        }
        self.neighbors(u).binary_search(&(v as u32)).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.vertex_count()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .filter(move |&&v| (v as usize) > u)
                .map(move |&v| (u, v as usize))
        })
    }

    pub fn edge_vec(&self) -> Vec<(usize, usize)> {
        self.edges().collect()
    }

    /// Adjacency as bitmasks; only for graphs with at most 32 vertices.
    pub fn masks(&self) -> Vec<u32> {
        assert!(
            self.vertex_count() <= 32,
            "bitmask view needs at most 32 vertices"
        );
        (0..self.vertex_count())
            .map(|v| self.neighbors(v).iter().fold(0u32, |m, &w| m | (1 << w)))
            .collect()
    }

    pub fn isolated_vertices(&self) -> Vec<usize> {
        (0..self.vertex_count())
            .filter(|&v| self.degree(v) == 0)
            .collect()
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        let mut stack = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            stack.push(s);
            let mut comp = Vec::new();
            while let Some(v) = stack.pop() {
                comp.push(v);
                for &w in self.neighbors(v) {
                    let w = w as usize;
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.vertex_count() <= 1 || self.components().len() == 1
    }

    /// Subgraph induced by `vertices`; vertex `vertices[i]` becomes `i`.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Graph {
        let mut pos = vec![usize::MAX; self.vertex_count()];
        for (i, &v) in vertices.iter().enumerate() {
            pos[v] = i;
        }
        let mut edges = Vec::new();
        for (i, &v) in vertices.iter().enumerate() {
            for &w in self.neighbors(v) {
                let j = pos[w as usize];
                if j != usize::MAX && i < j {
                    edges.push((i, j));
                }
            }
        }
        Graph::from_edges(vertices.len(), &edges).expect("induced subgraph of a simple graph")
    }

    /// Renames vertex `v` to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Graph {
        let edges: Vec<_> = self.edges().map(|(u, v)| (perm[u], perm[v])).collect();
        Graph::from_edges(self.vertex_count(), &edges).expect("relabeling by a permutation")
    }

    pub fn complement(&self) -> Graph {
        let n = self.vertex_count();
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if !self.has_edge(u, v) {
                    edges.push((u, v));
                }
            }
        }
        Graph::from_edges(n, &edges).expect("complement of a simple graph")
    }

    /// Vertices of `other` are shifted past those of `self`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let n = self.vertex_count();
        let mut edges = self.edge_vec();
        edges.extend(other.edges().map(|(u, v)| (u + n, v + n)));
        Graph::from_edges(n + other.vertex_count(), &edges).expect("disjoint union")
    }

    /// Adds edges, rejecting ones already present.
    pub fn with_edges(&self, extra: &[(usize, usize)]) -> Result<Graph> {
        let mut edges = self.edge_vec();
        edges.extend_from_slice(extra);
        Graph::from_edges(self.vertex_count(), &edges)
    }

    /// Fails with [`Error::TooLarge`] above `limit` vertices.
    pub fn check_size(&self, limit: usize) -> Result<()> {
        if self.vertex_count() > limit {
            return Err(Error::TooLarge {
                n: self.vertex_count(),
                limit,
            });
        }
        Ok(())
    }

    pub fn check_connected(&self) -> Result<()> {
        if self.vertex_count() == 0 || !self.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(())
    }
}

/// Components of the subgraph induced by `set`, as bitmasks.
pub(crate) fn mask_components(adj: &[u32], set: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut rest = set;
    while rest != 0 {
        let start = rest & rest.wrapping_neg();
        let mut comp = start;
        let mut frontier = start;
        while frontier != 0 {
            let v = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let new = adj[v] & set & !comp;
            comp |= new;
            frontier |= new;
        }
        out.push(comp);
        rest &= !comp;
    }
    out
}

/// Union of neighborhoods of `set`, minus `set` itself.
pub(crate) fn mask_neighborhood(adj: &[u32], set: u32) -> u32 {
    let mut n = 0;
    let mut s = set;
    while s != 0 {
        let v = s.trailing_zeros() as usize;
        s &= s - 1;
        n |= adj[v];
    }
    n & !set
}

pub(crate) fn mask_is_connected(adj: &[u32], set: u32) -> bool {
    if set == 0 {
        return true;
    }
    let start = set & set.wrapping_neg();
    let mut comp = start;
    let mut frontier = start;
    while frontier != 0 {
        let v = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let new = adj[v] & set & !comp;
        comp |= new;
        frontier |= new;
    }
    comp == set
}

pub(crate) fn mask_vertices(mut set: u32) -> impl Iterator<Item = usize> {
    core::iter::from_fn(move || {
        if set == 0 {
            None
        } else {
            let v = set.trailing_zeros() as usize;
            set &= set - 1;
            Some(v)
        }
    })
}
