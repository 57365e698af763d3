use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use hashbrown::HashMap;

use crate::error::{Error, Result};
use crate::graph::{mask_components, mask_is_connected, mask_neighborhood, mask_vertices, Graph};

/// Upper limit on `C(n, w+1)` accepted by [`exact_mtw`].
pub const MTW_WORK_LIMIT: u128 = 2_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    bags: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl TreeDecomposition {
    /// Bags are sorted and deduplicated; `edges` must form a tree on the bags.
    pub fn new(mut bags: Vec<Vec<usize>>, edges: Vec<(usize, usize)>) -> Result<TreeDecomposition> {
        for b in &mut bags {
            b.sort_unstable();
            b.dedup();
        }
        let k = bags.len();
        if k == 0 {
            return Err(Error::InvalidDecomposition("no bags".into()));
        }
        if edges.len() + 1 != k {
            return Err(Error::InvalidDecomposition(format!(
                "{} bags need {} links",
                k,
                k - 1
            )));
        }
        let mut adj = vec![Vec::new(); k];
        for &(a, b) in &edges {
            if a >= k || b >= k || a == b {
                return Err(Error::InvalidDecomposition(format!("bad link {a}-{b}")));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; k];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidDecomposition(
                "links do not form a tree".into(),
            ));
        }
        Ok(TreeDecomposition { bags, edges })
    }

    pub fn bags(&self) -> &[Vec<usize>] {
        &self.bags
    }

    pub fn links(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn width(&self) -> usize {
        self.bags
            .iter()
            .map(|b| b.len())
            .max()
            .unwrap_or(1)
            .saturating_sub(1)
    }

    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        adj
    }

    /// Parent of each bag when rooted at bag 0, and a top-down order.
    pub fn rooted(&self) -> (Vec<Option<usize>>, Vec<usize>) {
        self.rooted_at(0)
    }

    /// Parent of each bag when rooted at `root`, and a top-down order.
    pub fn rooted_at(&self, root: usize) -> (Vec<Option<usize>>, Vec<usize>) {
        let adj = self.neighbors();
        let mut parent = vec![None; self.bags.len()];
        let mut order = vec![root];
        let mut seen = vec![false; self.bags.len()];
        seen[root] = true;
        let mut i = 0;
        while i < order.len() {
            let x = order[i];
            i += 1;
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = Some(x);
                    order.push(y);
                }
            }
        }
        (parent, order)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchedTreeDecomposition {
    td: TreeDecomposition,
    matchings: Vec<Vec<(usize, usize)>>,
}

impl MatchedTreeDecomposition {
    /// Checks the certificate against `g`.
    pub fn new(
        g: &Graph,
        td: TreeDecomposition,
        matchings: Vec<Vec<(usize, usize)>>,
    ) -> Result<Self> {
        let d = MatchedTreeDecomposition { td, matchings };
        if verify_matched_td(g, &d)? {
            Ok(d)
        } else {
            Err(Error::InvalidDecomposition(
                "not a matched tree decomposition".into(),
            ))
        }
    }

    /// Computes a matching certificate for every bag.
    pub fn certify(g: &Graph, td: TreeDecomposition) -> Result<Self> {
        let mut ms = Vec::new();
        for (i, b) in td.bags().iter().enumerate() {
            match bag_matching(g, b) {
                Some(m) => ms.push(m),
                None => {
                    return Err(Error::InvalidDecomposition(format!(
                        "bag {i} is not matched"
                    )))
                }
            }
        }
        MatchedTreeDecomposition::new(g, td, ms)
    }

    pub fn decomposition(&self) -> &TreeDecomposition {
        &self.td
    }

    pub fn matchings(&self) -> &[Vec<(usize, usize)>] {
        &self.matchings
    }

    pub fn width(&self) -> usize {
        self.td.width()
    }
}

pub fn verify_td(g: &Graph, d: &TreeDecomposition) -> Result<bool> {
    let n = g.vertex_count();
    for b in d.bags() {
        if let Some(&v) = b.iter().find(|&&v| v >= n) {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
    }
    let mut holders = vec![Vec::new(); n];
    for (i, b) in d.bags().iter().enumerate() {
        for &v in b {
            holders[v].push(i);
        }
    }
    if holders.iter().any(|h| h.is_empty()) {
        return Ok(false);
    }
    for (u, v) in g.edges() {
        if !d
            .bags()
            .iter()
            .any(|b| b.binary_search(&u).is_ok() && b.binary_search(&v).is_ok())
        {
            return Ok(false);
        }
    }
    let adj = d.neighbors();
    for (v, h) in holders.iter().enumerate() {
        let mut seen = vec![false; d.bags().len()];
        let mut stack = vec![h[0]];
        seen[h[0]] = true;
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if !seen[y] && d.bags()[y].binary_search(&v).is_ok() {
                    seen[y] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        if count != h.len() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True iff `m` is a matching of `g[bag]` leaving no vertex, or exactly one
/// vertex adjacent to a matched one, uncovered.
fn certificate_ok(g: &Graph, bag: &[usize], m: &[(usize, usize)]) -> bool {
    let mut covered = Vec::new();
    for &(u, v) in m {
        if !g.has_edge(u, v) || bag.binary_search(&u).is_err() || bag.binary_search(&v).is_err() {
            return false;
        }
        covered.push(u);
        covered.push(v);
    }
    covered.sort_unstable();
    if covered.windows(2).any(|w| w[0] == w[1]) {
        return false;
    }
    let loose: Vec<usize> = bag
        .iter()
        .copied()
        .filter(|v| covered.binary_search(v).is_err())
        .collect();
    match loose.as_slice() {
        [] => true,
        [x] => covered.iter().any(|&c| g.has_edge(*x, c)),
        _ => false,
    }
}

pub fn verify_matched_td(g: &Graph, d: &MatchedTreeDecomposition) -> Result<bool> {
    if d.matchings.len() != d.td.bags().len() || !verify_td(g, &d.td)? {
        return Ok(false);
    }
    Ok(d.td
        .bags()
        .iter()
        .zip(&d.matchings)
        .all(|(b, m)| certificate_ok(g, b, m)))
}

/// Perfect matching of the vertices in `set` (bitmask over `pos`).
fn perfect_matching(g: &Graph, verts: &[usize], set: u32, out: &mut Vec<(usize, usize)>) -> bool {
    if set == 0 {
        return true;
    }
    let i = set.trailing_zeros() as usize;
    for j in mask_vertices(set & !(1 << i)) {
        if g.has_edge(verts[i], verts[j]) {
            out.push((verts[i], verts[j]));
            if perfect_matching(g, verts, set & !(1 << i) & !(1 << j), out) {
                return true;
            }
            out.pop();
        }
    }
    false
}

/// A matching certificate for `bag`, if the bag is matched.
pub fn bag_matching(g: &Graph, bag: &[usize]) -> Option<Vec<(usize, usize)>> {
    assert!(bag.len() <= 32, "bags above 32 vertices are not supported");
    let full = if bag.len() == 32 {
        u32::MAX
    } else {
        (1u32 << bag.len()) - 1
    };
    let mut out = Vec::new();
    if bag.len() % 2 == 0 {
        return perfect_matching(g, bag, full, &mut out).then_some(out);
    }
    for x in 0..bag.len() {
        if !bag.iter().any(|&y| y != bag[x] && g.has_edge(bag[x], y)) {
            continue;
        }
        out.clear();
        if perfect_matching(g, bag, full & !(1 << x), &mut out) {
            return Some(out);
        }
    }
    None
}

fn mask_matched(adj: &[u32], set: u32, memo: &mut HashMap<u32, bool>) -> bool {
    fn pm(adj: &[u32], set: u32) -> bool {
        if set == 0 {
            return true;
        }
        let i = set.trailing_zeros() as usize;
        let rest = set & !(1 << i);
        mask_vertices(adj[i] & rest).any(|j| pm(adj, rest & !(1 << j)))
    }
    if let Some(&b) = memo.get(&set) {
        return b;
    }
    let ok = if set.count_ones() % 2 == 0 {
        pm(adj, set)
    } else {
        mask_vertices(set).any(|x| adj[x] & set != 0 && pm(adj, set & !(1 << x)))
    };
    memo.insert(set, ok);
    ok
}

/// Treewidth and an optimal elimination order, by dynamic programming over
/// vertex subsets (eliminated-set recurrence).
pub fn exact_tw(g: &Graph) -> Result<(usize, Vec<usize>)> {
    g.check_size(super::EXACT_LIMIT + 4)?;
    let n = g.vertex_count();
    if n == 0 {
        return Ok((0, Vec::new()));
    }
    let adj = g.masks();
    // |Q(S, v)|: vertices outside S + v reachable from v through S
    let q = |s: u32, v: usize| -> u32 {
        let mut reach = 1u32 << v;
        let mut frontier = 1u32 << v;
        let mut out = 0u32;
        while frontier != 0 {
            let x = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let nb = adj[x] & !reach;
            reach |= nb;
            out |= nb & !s;
            frontier |= nb & s;
        }
        out.count_ones()
    };
    let size = 1usize << n;
    let mut tw = vec![u32::MAX; size];
    let mut choice = vec![0u8; size];
    tw[0] = 0;
    for s in 1..size as u32 {
        let mut best = u32::MAX;
        for v in mask_vertices(s) {
            let prev = s & !(1 << v);
            let val = tw[prev as usize].max(q(prev, v));
            if val < best {
                best = val;
                choice[s as usize] = v as u8;
            }
        }
        tw[s as usize] = best;
    }
    let full = (size - 1) as u32;
    let mut order = Vec::with_capacity(n);
    let mut s = full;
    while s != 0 {
        let v = choice[s as usize] as usize;
        order.push(v);
        s &= !(1 << v);
    }
    order.reverse();
    Ok((tw[full as usize] as usize, order))
}

/// Standard decomposition from an elimination order: one bag per vertex
/// holding it and its later neighbors in the fill-in graph.
pub fn td_from_elimination_order(g: &Graph, order: &[usize]) -> Result<TreeDecomposition> {
    let n = g.vertex_count();
    if order.len() != n {
        return Err(Error::InvalidDecomposition(
            "order must list every vertex once".into(),
        ));
    }
    let mut pos = vec![usize::MAX; n];
    for (i, &v) in order.iter().enumerate() {
        if v >= n || pos[v] != usize::MAX {
            return Err(Error::InvalidDecomposition(
                "order must list every vertex once".into(),
            ));
        }
        pos[v] = i;
    }
    let mut nb: Vec<Vec<usize>> = (0..n)
        .map(|v| g.neighbors(v).iter().map(|&w| w as usize).collect())
        .collect();
    let mut bags = Vec::with_capacity(n);
    let mut later_sets = Vec::with_capacity(n);
    for &v in order {
        let mut later: Vec<usize> = nb[v].iter().copied().filter(|&w| pos[w] > pos[v]).collect();
        later.sort_unstable();
        later.dedup();
        for i in 0..later.len() {
            for j in 0..later.len() {
                if i != j && !nb[later[i]].contains(&later[j]) {
                    nb[later[i]].push(later[j]);
                }
            }
        }
        let mut bag = later.clone();
        bag.push(v);
        bags.push(bag);
        later_sets.push(later);
    }
    let mut links = Vec::new();
    let mut last_root: Option<usize> = None;
    for (i, later) in later_sets.iter().enumerate() {
        match later.iter().min_by_key(|&&w| pos[w]) {
            Some(&w) => links.push((i, pos[w])),
            None => {
                if let Some(r) = last_root {
                    links.push((r, i));
                }
                last_root = Some(i);
            }
        }
    }
    TreeDecomposition::new(bags, links)
}

#[derive(Clone)]
struct Choice {
    bag: u32,
    groups: Vec<u32>,
}

struct MtwSearch<'a> {
    /// Structure adjacency: graph edges plus any co-residence requirements.
    adj: &'a [u32],
    /// Graph adjacency, used for matchings.
    madj: &'a [u32],
    cap: u32,
    connected_bags: bool,
    matched: HashMap<u32, bool>,
    memo: HashMap<(u32, u32), Option<Choice>>,
}

/// Subsets of `pool` of size exactly `k`, in colex order.
fn subsets_of_size(pool: u32, k: u32, mut f: impl FnMut(u32) -> bool) -> bool {
    let items: Vec<usize> = mask_vertices(pool).collect();
    let k = k as usize;
    if k > items.len() {
        return false;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let m = idx.iter().fold(0u32, |m, &i| m | 1 << items[i]);
        if f(m) {
            return true;
        }
        let mut i = k;
        loop {
            if i == 0 {
                return false;
            }
            i -= 1;
            if idx[i] < items.len() - k + i {
                break;
            }
            if i == 0 {
                return false;
            }
        }
        if idx[i] >= items.len() - k + i {
            return false;
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

impl MtwSearch<'_> {
    /// Can the vertices `d` be placed in a subtree hanging below a bag `p`?
    /// The subtree's top bag must contain `N(d)`, may borrow other vertices
    /// of `p`, and must introduce at least one vertex of `d`.
    fn solve(&mut self, d: u32, p: u32) -> bool {
        if let Some(c) = self.memo.get(&(d, p)) {
            return c.is_some();
        }
        let found = self.search(d, p);
        let ok = found.is_some();
        self.memo.insert((d, p), found);
        ok
    }

    fn search(&mut self, d: u32, p: u32) -> Option<Choice> {
        let need = if p == 0 {
            d & d.wrapping_neg()
        } else {
            mask_neighborhood(self.adj, d)
        };
        if need.count_ones() >= self.cap + (p == 0) as u32 {
            return None;
        }
        let pool = (d | p) & !need;
        let room = self.cap - need.count_ones();
        let mut result = None;
        for k in 0..=room {
            if k == 0 && (p != 0 || need == 0) {
                continue;
            }
            let hit = subsets_of_size(pool, k, |x| {
                let bag = need | x;
                if bag & d == 0 {
                    return false;
                }
                if let Some(groups) = self.try_bag(d, bag) {
                    result = Some(Choice { bag, groups });
                    return true;
                }
                false
            });
            if hit {
                break;
            }
        }
        result
    }

    fn try_bag(&mut self, d: u32, bag: u32) -> Option<Vec<u32>> {
        if self.connected_bags && !mask_is_connected(self.madj, bag) {
            return None;
        }
        if !mask_matched(self.madj, bag, &mut self.matched) {
            return None;
        }
        let comps = mask_components(self.adj, d & !bag);
        let single: Vec<bool> = comps.iter().map(|&c| self.solve(c, bag)).collect();
        if single.iter().all(|&b| b) {
            return Some(comps);
        }
        if comps.len() < 2 || comps.len() > 8 {
            return None;
        }
        // Some component fails alone: try grouping components below one child.
        let c = comps.len();
        let full = (1usize << c) - 1;
        let mut feasible: Vec<Option<Option<usize>>> = vec![None; 1 << c];
        feasible[0] = Some(Some(0));
        fn part(
            s: &mut MtwSearch<'_>,
            comps: &[u32],
            bag: u32,
            rest: usize,
            table: &mut Vec<Option<Option<usize>>>,
        ) -> bool {
            if let Some(r) = table[rest] {
                return r.is_some();
            }
            let low = rest & rest.wrapping_neg();
            let others = rest & !low;
            let mut sub = others;
            let mut ans = None;
            loop {
                let group = sub | low;
                let union = (0..comps.len())
                    .filter(|i| group >> i & 1 == 1)
                    .fold(0u32, |m, i| m | comps[i]);
                if s.solve(union, bag) && part(s, comps, bag, rest & !group, table) {
                    ans = Some(group);
                    break;
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & others;
            }
            table[rest] = Some(ans);
            ans.is_some()
        }
        if !part(self, &comps, bag, full, &mut feasible) {
            return None;
        }
        let mut groups = Vec::new();
        let mut rest = full;
        while rest != 0 {
            let g = feasible[rest].unwrap().unwrap();
            groups.push(
                (0..c)
                    .filter(|i| g >> i & 1 == 1)
                    .fold(0u32, |m, i| m | comps[i]),
            );
            rest &= !g;
        }
        Some(groups)
    }

    fn build(
        &self,
        d: u32,
        p: u32,
        bags: &mut Vec<u32>,
        links: &mut Vec<(usize, usize)>,
        above: Option<usize>,
    ) {
        let choice = self.memo[&(d, p)]
            .clone()
            .expect("only successful states are expanded");
        let id = bags.len();
        bags.push(choice.bag);
        if let Some(a) = above {
            links.push((a, id));
        }
        for g in choice.groups {
            self.build(g, choice.bag, bags, links, Some(id));
        }
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    let mut r = 1u128;
    for i in 0..k.min(n) {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Merges every bag contained in a neighboring bag into that neighbor. Each
/// remaining bag was already a bag, so matchings are unaffected.
fn contract_subset_bags(
    bags: Vec<u32>,
    links: Vec<(usize, usize)>,
) -> (Vec<u32>, Vec<(usize, usize)>) {
    let k = bags.len();
    let mut alive = vec![true; k];
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); k];
    for &(a, b) in &links {
        adj[a].push(b);
        adj[b].push(a);
    }
    'again: loop {
        for a in 0..k {
            if !alive[a] {
                continue;
            }
            if let Some(&b) = adj[a].iter().find(|&&b| bags[a] & !bags[b] == 0) {
                alive[a] = false;
                let moved = core::mem::take(&mut adj[a]);
                adj[b].retain(|&x| x != a);
                for x in moved {
                    if x != b {
                        adj[x].retain(|&y| y != a);
                        adj[x].push(b);
                        adj[b].push(x);
                    }
                }
                continue 'again;
            }
        }
        break;
    }
    let mut index = vec![usize::MAX; k];
    let mut out = Vec::new();
    for a in 0..k {
        if alive[a] {
            index[a] = out.len();
            out.push(bags[a]);
        }
    }
    let mut new_links = Vec::new();
    for a in 0..k {
        for &b in &adj[a] {
            if alive[a] && a < b {
                new_links.push((index[a], index[b]));
            }
        }
    }
    (out, new_links)
}

fn mtw_at_width(
    g: &Graph,
    structure: &[u32],
    w: usize,
    connected_bags: bool,
) -> Option<MatchedTreeDecomposition> {
    let madj = g.masks();
    let n = g.vertex_count();
    let mut s = MtwSearch {
        adj: structure,
        madj: &madj,
        cap: (w + 1) as u32,
        connected_bags,
        matched: HashMap::new(),
        memo: HashMap::new(),
    };
    let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    if !s.solve(full, 0) {
        return None;
    }
    let mut bags = Vec::new();
    let mut links = Vec::new();
    s.build(full, 0, &mut bags, &mut links, None);
    let (bags, links) = contract_subset_bags(bags, links);
    let bags: Vec<Vec<usize>> = bags
        .into_iter()
        .map(|b| mask_vertices(b).collect())
        .collect();
    let td = TreeDecomposition::new(bags, links).expect("search output is a tree");
    Some(MatchedTreeDecomposition::certify(g, td).expect("search output is matched"))
}

/// Minimum-width matched tree decomposition, or `Ok(None)` if it exceeds
/// `budget`. Among optimal witnesses, one whose bags induce connected
/// subgraphs is preferred when it exists.
pub fn exact_mtw(g: &Graph, budget: usize) -> Result<Option<(usize, MatchedTreeDecomposition)>> {
    exact_mtw_covering(g, &[], budget)
}

/// As [`exact_mtw`], additionally requiring each set in `cover` to lie inside
/// a single bag.
pub fn exact_mtw_covering(
    g: &Graph,
    cover: &[Vec<usize>],
    budget: usize,
) -> Result<Option<(usize, MatchedTreeDecomposition)>> {
    g.check_size(32)?;
    g.check_connected()?;
    let n = g.vertex_count();
    if n < 2 {
        return Err(Error::NoEdges);
    }
    let top = budget.min(n - 1);
    if binomial(n as u128, top as u128 + 1) > MTW_WORK_LIMIT {
        return Err(Error::Infeasible(format!(
            "C({}, {}) bag candidates",
            n,
            top + 1
        )));
    }
    let mut structure = g.masks();
    for set in cover {
        for &a in set {
            for &b in set {
                if a >= n || b >= n {
                    return Err(Error::VertexOutOfRange {
                        vertex: a.max(b),
                        n,
                    });
                }
                if a != b {
                    structure[a] |= 1 << b;
                }
            }
        }
    }
    for w in 1..=top {
        if let Some(any) = mtw_at_width(g, &structure, w, false) {
            let best = mtw_at_width(g, &structure, w, true).unwrap_or(any);
            debug_assert!(verify_matched_td(g, &best).unwrap_or(false));
            return Ok(Some((best.width(), best)));
        }
    }
    Ok(None)
}

/// Working state of the decomposition lift: mutable bags as bitmasks.
struct Lift<'a> {
    adj: &'a [u32],
    bags: Vec<u32>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    matching: Vec<Vec<(usize, usize)>>,
}

impl Lift<'_> {
    fn new<'a>(adj: &'a [u32], d: &TreeDecomposition) -> Lift<'a> {
        let (parent, _) = d.rooted();
        let mut children = vec![Vec::new(); parent.len()];
        for (c, p) in parent.iter().enumerate() {
            if let Some(p) = p {
                children[*p].push(c);
            }
        }
        let bags = d
            .bags()
            .iter()
            .map(|b| b.iter().fold(0u32, |m, &v| m | 1 << v))
            .collect();
        Lift {
            adj,
            bags,
            parent,
            matching: vec![Vec::new(); children.len()],
            children,
        }
    }

    fn partner(&self, bag: usize, v: usize) -> Option<usize> {
        self.matching[bag].iter().find_map(|&(a, b)| {
            if a == v {
                Some(b)
            } else if b == v {
                Some(a)
            } else {
                None
            }
        })
    }

    fn remove_from_subtree(&mut self, b: usize, v: usize) {
        let mut stack = vec![b];
        while let Some(x) = stack.pop() {
            if self.bags[x] >> v & 1 == 1 {
                self.bags[x] &= !(1 << v);
                stack.extend(self.children[x].iter().copied());
            }
        }
    }

    /// Adds `u` to every bag between `b` and the nearest descendant bag
    /// holding both `u` and `v`, walking only through bags holding `v`.
    fn pull_up(&mut self, b: usize, u: usize, v: usize) -> bool {
        let mut prev = vec![usize::MAX; self.bags.len()];
        let mut queue = VecDeque::from([b]);
        prev[b] = b;
        while let Some(x) = queue.pop_front() {
            if self.bags[x] >> u & 1 == 1 {
                let mut y = x;
                while y != b {
                    self.bags[y] |= 1 << u;
                    y = prev[y];
                }
                self.bags[b] |= 1 << u;
                return true;
            }
            for &c in &self.children[x] {
                if prev[c] == usize::MAX && self.bags[c] >> v & 1 == 1 {
                    prev[c] = x;
                    queue.push_back(c);
                }
            }
        }
        false
    }

    fn add_leaf(&mut self, b: usize, v: usize) {
        let mut bag = 1u32 << v;
        let mut m = Vec::new();
        for x in mask_vertices(self.adj[v]) {
            let y = self
                .partner(b, x)
                .expect("neighbors of a removed vertex are matched");
            if bag >> x & 1 == 0 {
                bag |= 1 << x | 1 << y;
                m.push((x.min(y), x.max(y)));
            }
        }
        let id = self.bags.len();
        self.bags.push(bag);
        self.parent.push(Some(b));
        self.children.push(Vec::new());
        self.children[b].push(id);
        self.matching.push(m);
    }

    /// Greedy maximal matching on the uncovered vertices of bag `b`.
    fn extend_greedily(&mut self, b: usize, covered: &mut u32) {
        for x in mask_vertices(self.bags[b] & !*covered) {
            if *covered >> x & 1 == 1 {
                continue;
            }
            let free = self.adj[x] & self.bags[b] & !*covered & !(1 << x);
            if free != 0 {
                let y = free.trailing_zeros() as usize;
                self.matching[b].push((x.min(y), x.max(y)));
                *covered |= 1 << x | 1 << y;
            }
        }
    }

    /// Handles the uncovered vertices that lie outside the parent bag.
    fn fix_fresh(&mut self, b: usize, covered: &mut u32, allow_near_perfect: bool) -> bool {
        let p = self.parent[b].map_or(0, |p| self.bags[p]);
        loop {
            let loose = self.bags[b] & !*covered;
            if loose == 0 {
                return true;
            }
            let v = loose.trailing_zeros() as usize;
            if allow_near_perfect
                && loose.count_ones() == 1
                && self.adj[v] & *covered & self.bags[b] != 0
            {
                return true;
            }
            if p >> v & 1 == 1 {
                // only reachable in the greedy variant
                let cands = self.adj[v] & p & !self.bags[b];
                if cands != 0 {
                    let u = cands.trailing_zeros() as usize;
                    self.bags[b] |= 1 << u;
                    self.matching[b].push((u.min(v), u.max(v)));
                    *covered |= 1 << u | 1 << v;
                    continue;
                }
                let outside = self.adj[v] & !self.bags[b] & !p;
                if let Some(u) = mask_vertices(outside).find(|&u| self.pull_up_check(b, u, v)) {
                    self.pull_up(b, u, v);
                    self.matching[b].push((u.min(v), u.max(v)));
                    *covered |= 1 << u | 1 << v;
                    continue;
                }
                return false;
            }
            let outside = self.adj[v] & !self.bags[b];
            if outside == 0 {
                self.bags[b] &= !(1 << v);
                for &c in &self.children[b].clone() {
                    self.remove_from_subtree(c, v);
                }
                self.add_leaf(b, v);
                continue;
            }
            let u = outside.trailing_zeros() as usize;
            if !self.pull_up(b, u, v) {
                return false;
            }
            self.matching[b].push((u.min(v), u.max(v)));
            *covered |= 1 << u | 1 << v;
        }
    }

    fn pull_up_check(&self, b: usize, u: usize, v: usize) -> bool {
        let mut stack = vec![b];
        while let Some(x) = stack.pop() {
            if self.bags[x] >> u & 1 == 1 {
                return true;
            }
            for &c in &self.children[x] {
                if self.bags[c] >> v & 1 == 1 {
                    stack.push(c);
                }
            }
        }
        false
    }

    /// Keeps parent partners, as in the textbook argument.
    fn process_faithful(&mut self, b: usize) -> bool {
        let mut covered = 0u32;
        if let Some(p) = self.parent[b] {
            for v in mask_vertices(self.bags[b] & self.bags[p]) {
                if covered >> v & 1 == 1 {
                    continue;
                }
                let Some(u) = self.partner(p, v) else {
                    return false;
                };
                self.bags[b] |= 1 << u;
                self.matching[b].push((u.min(v), u.max(v)));
                covered |= 1 << u | 1 << v;
            }
        }
        self.extend_greedily(b, &mut covered);
        self.fix_fresh(b, &mut covered, false)
    }

    /// Starts from a maximum matching of the bag and tolerates one loose vertex.
    fn process_greedy(&mut self, b: usize) -> bool {
        let bag = self.bags[b];
        let best = maximum_matching(self.adj, bag);
        let mut covered = 0u32;
        for &(x, y) in &best {
            covered |= 1 << x | 1 << y;
        }
        self.matching[b] = best;
        self.fix_fresh(b, &mut covered, true)
    }

    fn run(
        mut self,
        greedy: bool,
    ) -> Option<(Vec<u32>, Vec<(usize, usize)>, Vec<Vec<(usize, usize)>>)> {
        let mut queue = VecDeque::from([0usize]);
        let original = self.bags.len();
        while let Some(b) = queue.pop_front() {
            let ok = if greedy {
                self.process_greedy(b)
            } else {
                self.process_faithful(b)
            };
            if !ok {
                return None;
            }
            for &c in &self.children[b] {
                if c < original {
                    queue.push_back(c);
                }
            }
        }
        let links = self
            .parent
            .iter()
            .enumerate()
            .filter_map(|(c, p)| p.map(|p| (p, c)))
            .collect();
        Some((self.bags, links, self.matching))
    }
}

/// Maximum matching of the subgraph induced by `set`, by exhaustive search.
fn maximum_matching(adj: &[u32], set: u32) -> Vec<(usize, usize)> {
    fn go(adj: &[u32], set: u32, cur: &mut Vec<(usize, usize)>, best: &mut Vec<(usize, usize)>) {
        if cur.len() + set.count_ones() as usize / 2 <= best.len() {
            return;
        }
        if set == 0 {
            *best = cur.clone();
            return;
        }
        let i = set.trailing_zeros() as usize;
        let rest = set & !(1 << i);
        for j in mask_vertices(adj[i] & rest) {
            cur.push((i, j));
            go(adj, rest & !(1 << j), cur, best);
            cur.pop();
        }
        go(adj, rest, cur, best);
    }
    let mut best = Vec::new();
    go(adj, set, &mut Vec::new(), &mut best);
    best
}

/// Matched decomposition of width at most `2k + 1` from one of width `k`.
///
/// Bags are processed top-down. Unmatched vertices get a partner from the
/// parent bag, a partner pulled up from the nearest descendant bag, or (when
/// all their neighbors already sit in the bag) are moved to a new leaf bag
/// with their neighbors and those neighbors' partners. Two variants run: one
/// keeping parent partners throughout, one starting from a maximum matching
/// of each bag; the narrower verified result is returned.
pub fn lift_tw_to_mtw(g: &Graph, d: &TreeDecomposition) -> Result<MatchedTreeDecomposition> {
    g.check_size(32)?;
    if !verify_td(g, d)? {
        return Err(Error::InvalidDecomposition(
            "input is not a tree decomposition".into(),
        ));
    }
    let adj = g.masks();
    let mut best: Option<MatchedTreeDecomposition> = None;
    for greedy in [true, false] {
        let Some((bags, links, matching)) = Lift::new(&adj, d).run(greedy) else {
            continue;
        };
        let bags: Vec<Vec<usize>> = bags
            .into_iter()
            .map(|b| mask_vertices(b).collect())
            .collect();
        let Ok(td) = TreeDecomposition::new(bags, links) else {
            continue;
        };
        let Ok(m) = MatchedTreeDecomposition::new(g, td, matching) else {
            continue;
        };
        if best.as_ref().is_none_or(|b| m.width() < b.width()) {
            best = Some(m);
        }
    }
    best.ok_or_else(|| Error::Consistency("decomposition lift produced no valid result".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize, e: &[(usize, usize)]) -> Graph {
        Graph::from_edges(n, e).unwrap()
    }
    fn cycle(n: usize) -> Graph {
        let e: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        g(n, &e)
    }
    fn kmn(a: usize, b: usize) -> Graph {
        let mut e = Vec::new();
        for i in 0..a {
            for j in 0..b {
                e.push((i, a + j));
            }
        }
        g(a + b, &e)
    }

    #[test]
    fn tree_edge_bags() {
        let t = g(4, &[(0, 1), (1, 2), (1, 3)]);
        let td = TreeDecomposition::new(
            vec![vec![0, 1], vec![1, 2], vec![1, 3]],
            vec![(0, 1), (0, 2)],
        )
        .unwrap();
        let m = MatchedTreeDecomposition::certify(&t, td.clone()).unwrap();
        assert_eq!(m.width(), 1);
        assert_eq!(exact_mtw(&t, 5).unwrap().unwrap().0, 1);
        assert_eq!(lift_tw_to_mtw(&t, &td).unwrap().width(), 1);
    }

    #[test]
    fn knn_two_bags() {
        for n in 2..=4 {
            let k = kmn(n, n);
            let all: Vec<usize> = (0..2 * n).collect();
            let b1: Vec<usize> = all.iter().copied().filter(|&v| v != 0).collect();
            let b2: Vec<usize> = all.iter().copied().filter(|&v| v != 1).collect();
            let td = TreeDecomposition::new(vec![b1, b2], vec![(0, 1)]).unwrap();
            let m = MatchedTreeDecomposition::certify(&k, td).unwrap();
            assert_eq!(m.width(), 2 * n - 2);
        }
    }

    #[test]
    fn c5_single_bag() {
        let c5 = cycle(5);
        let td = TreeDecomposition::new(vec![(0..5).collect()], vec![]).unwrap();
        let m = MatchedTreeDecomposition::certify(&c5, td).unwrap();
        assert_eq!(m.width(), 4);
        assert_eq!(exact_mtw(&c5, 4).unwrap().unwrap().0, 3);
        assert!(exact_mtw(&c5, 2).unwrap().is_none());
    }

    #[test]
    fn small_exact_values() {
        assert_eq!(exact_mtw(&cycle(4), 4).unwrap().unwrap().0, 2);
        assert_eq!(exact_mtw(&kmn(3, 3), 5).unwrap().unwrap().0, 4);
        assert_eq!(exact_tw(&cycle(5)).unwrap().0, 2);
        assert_eq!(exact_tw(&kmn(3, 3)).unwrap().0, 3);
    }

    #[test]
    fn lift_c5_and_c6() {
        let c5 = cycle(5);
        let (k, order) = exact_tw(&c5).unwrap();
        let td = td_from_elimination_order(&c5, &order).unwrap();
        assert!(verify_td(&c5, &td).unwrap());
        assert_eq!(td.width(), k);
        assert!(lift_tw_to_mtw(&c5, &td).unwrap().width() <= 2 * k + 1);
        let c6 = cycle(6);
        let fan = TreeDecomposition::new(
            vec![vec![0, 1, 2], vec![0, 2, 3], vec![0, 3, 4], vec![0, 4, 5]],
            vec![(0, 1), (1, 2), (2, 3)],
        )
        .unwrap();
        assert!(verify_td(&c6, &fan).unwrap());
        assert!(lift_tw_to_mtw(&c6, &fan).unwrap().width() <= 3);
    }

    #[test]
    fn bad_certificates_fail() {
        let c5 = cycle(5);
        let td = TreeDecomposition::new(vec![(0..5).collect()], vec![]).unwrap();
        let m = MatchedTreeDecomposition {
            td: td.clone(),
            matchings: vec![vec![(0, 1)]],
        };
        assert!(!verify_matched_td(&c5, &m).unwrap());
        let m = MatchedTreeDecomposition {
            td,
            matchings: vec![vec![(0, 2), (3, 4)]],
        };
        assert!(!verify_matched_td(&c5, &m).unwrap());
        assert!(TreeDecomposition::new(vec![vec![0], vec![1]], vec![]).is_err());
    }
}
