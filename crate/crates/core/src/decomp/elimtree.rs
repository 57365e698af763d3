use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use hashbrown::HashMap;

use crate::error::{Error, Result};
use crate::graph::{mask_components, mask_vertices, Graph};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EliminationTree {
    root: usize,
    parent: Vec<Option<usize>>,
}

impl EliminationTree {
    /// Checks that `parent` describes a single rooted tree with root `root`.
    pub fn new(root: usize, parent: Vec<Option<usize>>) -> Result<EliminationTree> {
        let n = parent.len();
        if root >= n || parent[root].is_some() {
            return Err(Error::InvalidElimTree(format!(
                "root {root} missing or has a parent"
            )));
        }
        for (v, p) in parent.iter().enumerate() {
            match p {
                None if v != root => {
                    return Err(Error::InvalidElimTree(format!("vertex {v} has no parent")))
                }
                Some(p) if *p >= n => return Err(Error::VertexOutOfRange { vertex: *p, n }),
                _ => {}
            }
        }
        let t = EliminationTree { root, parent };
        // every vertex must reach the root within n steps
        for v in 0..n {
            let mut x = v;
            let mut steps = 0;
            while let Some(p) = t.parent[x] {
                x = p;
                steps += 1;
                if steps > n {
                    return Err(Error::InvalidElimTree(format!("cycle through vertex {v}")));
                }
            }
        }
        Ok(t)
    }

    /// From `(child, parent)` pairs.
    pub fn from_pairs(n: usize, root: usize, pairs: &[(usize, usize)]) -> Result<EliminationTree> {
        let mut parent = vec![None; n];
        for &(c, p) in pairs {
            if c >= n || p >= n {
                return Err(Error::VertexOutOfRange {
                    vertex: c.max(p),
                    n,
                });
            }
            if parent[c].is_some() {
                return Err(Error::InvalidElimTree(format!(
                    "vertex {c} has two parents"
                )));
            }
            parent[c] = Some(p);
        }
        EliminationTree::new(root, parent)
    }

    /// A single path `order[0] -> order[1] -> ...`.
    pub fn chain(order: &[usize]) -> Result<EliminationTree> {
        let mut parent = vec![None; order.len()];
        for w in order.windows(2) {
            parent[w[1]] = Some(w[0]);
        }
        EliminationTree::new(order[0], parent)
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn vertex_count(&self) -> usize {
        self.parent.len()
    }

    /// `(child, parent)` pairs in increasing child order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(c, p)| p.map(|p| (c, p)))
            .collect()
    }

    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.vertex_count()];
        for (c, p) in self.pairs() {
            ch[p].push(c);
        }
        ch
    }

    /// Number of vertices on a root-to-vertex path, root at level 1.
    pub fn levels(&self) -> Vec<usize> {
        let n = self.vertex_count();
        let mut lvl = vec![0usize; n];
        for v in 0..n {
            let mut x = v;
            let mut d = 1;
            while let Some(p) = self.parent[x] {
                x = p;
                d += 1;
            }
            lvl[v] = d;
        }
        lvl
    }

    pub fn depth(&self) -> usize {
        self.levels().into_iter().max().unwrap_or(0)
    }

    pub fn is_ancestor(&self, a: usize, mut v: usize) -> bool {
        while let Some(p) = self.parent[v] {
            if p == a {
                return true;
            }
            v = p;
        }
        false
    }

    /// Vertices of each subtree.
    fn subtrees(&self) -> Vec<Vec<usize>> {
        let n = self.vertex_count();
        let mut sub = vec![Vec::new(); n];
        for v in 0..n {
            let mut x = Some(v);
            while let Some(a) = x {
                sub[a].push(v);
                x = self.parent[a];
            }
        }
        sub
    }
}

/// An elimination tree known to satisfy the matched path condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchedEliminationTree(EliminationTree);

impl MatchedEliminationTree {
    pub fn new(g: &Graph, t: EliminationTree) -> Result<MatchedEliminationTree> {
        if verify_matched_elim_tree(g, &t)? {
            Ok(MatchedEliminationTree(t))
        } else {
            Err(Error::InvalidElimTree(
                "not a matched elimination tree".into(),
            ))
        }
    }

    pub fn tree(&self) -> &EliminationTree {
        &self.0
    }

    pub fn depth(&self) -> usize {
        self.0.depth()
    }
}

/// States of the root-to-leaf matching automaton, as bits of a `u8` set.
///
/// `OPEN`/`CLOSED` track pairs before the pivot triple, `OPEN_T`/`CLOSED_T`
/// after it. A path is matched iff it can end in a closed state.
pub struct PathState;

impl PathState {
    pub const OPEN: u8 = 1;
    pub const CLOSED: u8 = 2;
    pub const OPEN_T: u8 = 4;
    pub const CLOSED_T: u8 = 8;
    /// State set before the root: reading the root opens the first pair.
    pub const START: u8 = Self::CLOSED;

    /// Reads the next vertex; `adj` says whether it is adjacent to the previous.
    pub fn step(q: u8, adj: bool) -> u8 {
        let mut out = 0;
        if q & Self::OPEN != 0 && adj {
            out |= Self::CLOSED;
        }
        if q & Self::CLOSED != 0 {
            out |= Self::OPEN;
            if adj {
                out |= Self::CLOSED_T;
            }
        }
        if q & Self::OPEN_T != 0 && adj {
            out |= Self::CLOSED_T;
        }
        if q & Self::CLOSED_T != 0 {
            out |= Self::OPEN_T;
        }
        out
    }

    pub fn accepting(q: u8) -> bool {
        q & (Self::CLOSED | Self::CLOSED_T) != 0
    }
}

fn check_span(g: &Graph, t: &EliminationTree) -> Result<()> {
    if g.vertex_count() != t.vertex_count() {
        return Err(Error::InvalidElimTree(format!(
            "tree has {} vertices, graph has {}",
            t.vertex_count(),
            g.vertex_count()
        )));
    }
    Ok(())
}

/// True iff every edge joins an ancestor/descendant pair and every subtree
/// induces a connected subgraph (so children are exactly the components).
pub fn verify_elim_tree(g: &Graph, t: &EliminationTree) -> Result<bool> {
    check_span(g, t)?;
    for (u, v) in g.edges() {
        if !t.is_ancestor(u, v) && !t.is_ancestor(v, u) {
            return Ok(false);
        }
    }
    for sub in t.subtrees() {
        if !g.induced_subgraph(&sub).is_connected() {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn verify_matched_elim_tree(g: &Graph, t: &EliminationTree) -> Result<bool> {
    if !verify_elim_tree(g, t)? {
        return Ok(false);
    }
    let children = t.children();
    let mut stack = vec![(t.root(), PathState::step(PathState::START, false))];
    while let Some((v, q)) = stack.pop() {
        if q == 0 {
            return Ok(false);
        }
        if children[v].is_empty() {
            if !PathState::accepting(q) {
                return Ok(false);
            }
            continue;
        }
        for &c in &children[v] {
            stack.push((c, PathState::step(q, g.has_edge(v, c))));
        }
    }
    Ok(true)
}

fn small_connected(g: &Graph) -> Result<Vec<u32>> {
    g.check_size(super::EXACT_LIMIT)?;
    g.check_connected()?;
    Ok(g.masks())
}

/// Treedepth with a witness elimination tree (smallest root on ties).
pub fn exact_td(g: &Graph) -> Result<(usize, EliminationTree)> {
    let adj = small_connected(g)?;
    let n = g.vertex_count();
    let mut memo: HashMap<u32, (u8, u8)> = HashMap::new();
    fn td(adj: &[u32], set: u32, memo: &mut HashMap<u32, (u8, u8)>) -> u8 {
        if set.count_ones() == 1 {
            return 1;
        }
        if let Some(&(d, _)) = memo.get(&set) {
            return d;
        }
        let mut best = (u8::MAX, 0u8);
        for r in mask_vertices(set) {
            let mut worst = 0;
            for comp in mask_components(adj, set & !(1 << r)) {
                worst = worst.max(td(adj, comp, memo));
                if worst + 1 >= best.0 {
                    break;
                }
            }
            if worst + 1 < best.0 {
                best = (worst + 1, r as u8);
            }
        }
        memo.insert(set, best);
        best.0
    }
    let full = (1u32 << n) - 1;
    let d = td(&adj, full, &mut memo);
    let mut parent = vec![None; n];
    let mut stack = vec![(full, None)];
    let mut root = 0;
    while let Some((set, par)) = stack.pop() {
        let r = if set.count_ones() == 1 {
            set.trailing_zeros() as usize
        } else {
            memo[&set].1 as usize
        };
        match par {
            None => root = r,
            Some(p) => parent[r] = Some(p),
        }
        for comp in mask_components(&adj, set & !(1 << r)) {
            stack.push((comp, Some(r)));
        }
    }
    Ok((d as usize, EliminationTree::new(root, parent)?))
}

const INFEASIBLE: u8 = u8::MAX;
const NO_PARENT: u8 = u8::MAX;

/// Search for matched elimination trees of bounded depth.
///
/// Among trees within the depth cap it minimizes the number of unanchored
/// vertices on the worst root-to-leaf path. A vertex is anchored when it has a
/// neighbor among its ancestors; the counting routine can then draw its image
/// from a host neighborhood instead of the whole host.
struct MtdSearch<'a> {
    adj: &'a [u32],
    // (set, parent, state set, depth cap) -> (unanchored count, root)
    memo: HashMap<(u32, u8, u8, u8), (u8, u8)>,
}

impl MtdSearch<'_> {
    fn best(&mut self, set: u32, parent: u8, q: u8, cap: u8) -> u8 {
        if cap == 0 {
            return INFEASIBLE;
        }
        let key = (set, parent, q, cap);
        if let Some(&(f, _)) = self.memo.get(&key) {
            return f;
        }
        let mut best = (INFEASIBLE, 0u8);
        for r in mask_vertices(set) {
            let adj = parent != NO_PARENT && self.adj[r] >> parent & 1 == 1;
            let q2 = PathState::step(q, adj);
            if q2 == 0 {
                continue;
            }
            let free = (self.adj[r] & !set == 0) as u8;
            let rest = set & !(1 << r);
            let cand = if rest == 0 {
                if PathState::accepting(q2) {
                    free
                } else {
                    INFEASIBLE
                }
            } else {
                let mut worst = 0u8;
                for comp in mask_components(self.adj, rest) {
                    let f = self.best(comp, r as u8, q2, cap - 1);
                    if f == INFEASIBLE || f + free >= best.0 {
                        worst = INFEASIBLE;
                        break;
                    }
                    worst = worst.max(f);
                }
                if worst == INFEASIBLE {
                    INFEASIBLE
                } else {
                    worst + free
                }
            };
            if cand < best.0 {
                best = (cand, r as u8);
            }
        }
        self.memo.insert(key, best);
        best.0
    }

    fn build(&self, n: usize, cap: u8) -> Result<EliminationTree> {
        let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
        let mut parent = vec![None; n];
        let mut root = 0;
        let mut stack = vec![(full, NO_PARENT, PathState::START, cap)];
        while let Some((set, par, q, cap)) = stack.pop() {
            let r = self.memo[&(set, par, q, cap)].1 as usize;
            if par == NO_PARENT {
                root = r;
            } else {
                parent[r] = Some(par as usize);
            }
            let q2 = PathState::step(q, par != NO_PARENT && self.adj[r] >> par & 1 == 1);
            for comp in mask_components(self.adj, set & !(1 << r)) {
                stack.push((comp, r as u8, q2, cap - 1));
            }
        }
        EliminationTree::new(root, parent)
    }
}

fn mtd_search(g: &Graph) -> Result<(Vec<u32>, usize)> {
    let adj = small_connected(g)?;
    let n = g.vertex_count();
    if n < 2 {
        return Err(Error::NoEdges);
    }
    Ok((adj, n))
}

/// Minimum-depth matched elimination tree, or `Ok(None)` if the minimum
/// exceeds `budget`. Ties are broken towards fewer unanchored vertices per
/// root-to-leaf path.
pub fn exact_mtd(g: &Graph, budget: usize) -> Result<Option<(usize, MatchedEliminationTree)>> {
    let (adj, n) = mtd_search(g)?;
    let mut s = MtdSearch {
        adj: &adj,
        memo: HashMap::new(),
    };
    let full = (1u32 << n) - 1;
    for cap in 1..=budget.min(n) as u8 {
        if s.best(full, NO_PARENT, PathState::START, cap) != INFEASIBLE {
            let t = s.build(n, cap)?;
            return Ok(Some((t.depth(), MatchedEliminationTree::new(g, t)?)));
        }
    }
    Ok(None)
}

/// A matched elimination tree of depth at most `budget` with as few
/// unanchored vertices per root-to-leaf path as possible. Its depth may exceed
/// the minimum; it never exceeds `budget`.
pub fn mtd_witness_within(g: &Graph, budget: usize) -> Result<Option<MatchedEliminationTree>> {
    let (adj, n) = mtd_search(g)?;
    let mut s = MtdSearch {
        adj: &adj,
        memo: HashMap::new(),
    };
    let full = (1u32 << n) - 1;
    let cap = budget.min(n) as u8;
    if s.best(full, NO_PARENT, PathState::START, cap) == INFEASIBLE {
        return Ok(None);
    }
    let t = s.build(n, cap)?;
    Ok(Some(MatchedEliminationTree::new(g, t)?))
}

/// Number of unanchored vertices on the worst root-to-leaf path of `t`.
pub fn unanchored_per_path(g: &Graph, t: &EliminationTree) -> usize {
    let children = t.children();
    let mut stack = vec![(t.root(), 0usize)];
    let mut worst = 0;
    while let Some((v, f)) = stack.pop() {
        let mut a = t.parent(v);
        let mut anchored = false;
        while let Some(x) = a {
            if g.has_edge(x, v) {
                anchored = true;
                break;
            }
            a = t.parent(x);
        }
        let f = f + (!anchored) as usize;
        worst = worst.max(f);
        stack.extend(children[v].iter().map(|&c| (c, f)));
    }
    worst
}

/// Turns an elimination tree of depth `d >= 2` into a matched one of depth at
/// most `2d - 2`.
///
/// Top-down: for the current connected set `C` with top vertex `r`, every
/// component `K` of `C - r` gets a neighbor `w` of `r` pulled up to sit right
/// below `r`. The components of `K - w` are rebuilt the same way, except
/// single vertices, which hang below `w` (they must be adjacent to it).
/// Depths of the rebuilt pieces are bounded by the input tree restricted to
/// them, which gives the `2d - 2` bound.
pub fn lift_td_to_mtd(g: &Graph, t: &EliminationTree) -> Result<MatchedEliminationTree> {
    if !verify_elim_tree(g, t)? {
        return Err(Error::InvalidElimTree(
            "input is not an elimination tree".into(),
        ));
    }
    let n = g.vertex_count();
    if n < 2 {
        return Err(Error::NoEdges);
    }
    let level = t.levels();
    let mut parent = vec![None; n];
    // (vertex set of a connected piece, parent of its top vertex)
    let mut work: Vec<(Vec<usize>, Option<usize>)> = vec![((0..n).collect(), None)];
    let components_of = |set: &[usize]| -> Vec<Vec<usize>> {
        let sub = g.induced_subgraph(set);
        sub.components()
            .into_iter()
            .map(|c| c.into_iter().map(|i| set[i]).collect())
            .collect()
    };
    while let Some((set, above)) = work.pop() {
        let r = *set.iter().min_by_key(|&&v| (level[v], v)).unwrap();
        parent[r] = above;
        let rest: Vec<usize> = set.iter().copied().filter(|&v| v != r).collect();
        for k in components_of(&rest) {
            let w = *k
                .iter()
                .filter(|&&v| g.has_edge(r, v))
                .min_by_key(|&&v| (level[v], v))
                .expect("a component of C - r touches r");
            parent[w] = Some(r);
            let rest_k: Vec<usize> = k.iter().copied().filter(|&v| v != w).collect();
            for l in components_of(&rest_k) {
                if l.len() == 1 {
                    parent[l[0]] = Some(w);
                } else {
                    work.push((l, Some(w)));
                }
            }
        }
    }
    let root = (0..n).find(|&v| parent[v].is_none()).unwrap();
    MatchedEliminationTree::new(g, EliminationTree::new(root, parent)?)
}
