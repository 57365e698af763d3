//! Homomorphism-polynomial circuits over matched tree decompositions.
//!
//! Bags are processed children first. Every bag enumerates the images of its
//! vertices pair by pair along its matching certificate: the first vertex of a
//! pair ranges over the host (or over the neighborhood of an already placed
//! neighbor's image) and its partner over the neighbors of that image, so one
//! pair costs at most `2m` steps. A map that breaks an edge inside the bag is
//! skipped. A surviving map contributes the term
//!
//! ```text
//! y(vertices first seen here) * MapGate(child, restriction to the child interface) * ...
//! ```
//!
//! to `MapGate(bag, restriction to the parent interface)`, creating that gate on
//! first use (gates are numbered in creation order). A child gate that was never created stands for 0 and the term is
//! dropped.
//!
//! The same enumeration feeds either a recorder, which materializes the
//! circuit, or a ring evaluator, which folds gate values directly and frees a
//! bag's table as soon as its parent is done.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;
use core::hash::Hash;
use hashbrown::hash_map::Entry;
use hashbrown::HashMap;
use num_bigint::BigUint;

use super::constraint::{all_hold, Constraint};
use super::ring::{CheckedU128, EvalRing, Naturals};
use crate::decomp::{verify_matched_td, MatchedTreeDecomposition, TreeDecomposition};
use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Clone, Debug)]
enum Step {
    Free,
    /// Image drawn from the neighborhood of an earlier position's image.
    Near(Vec<usize>),
}

#[derive(Clone, Debug)]
struct BagPlan {
    verts: Vec<usize>,
    steps: Vec<Step>,
    /// Earlier positions adjacent to each position.
    checks: Vec<Vec<usize>>,
    /// Positions forming the interface with the parent bag.
    key: Vec<usize>,
    /// For each child bag, the positions of its interface inside this bag.
    child_keys: Vec<(usize, Vec<usize>)>,
    /// Positions of the vertices whose variable this bag contributes.
    assigned: Vec<usize>,
    constraints: Vec<Constraint>,
}

/// Host-independent part of the construction.
#[derive(Clone, Debug)]
pub struct CircuitPlan {
    bags: Vec<BagPlan>,
    post_order: Vec<usize>,
    pattern_size: usize,
    widest_key: usize,
}

/// Interface images, packed `bits` bits per vertex without allocation when
/// they fit in an integer.
trait TableKey: Eq + Hash {
    fn pack(xs: &[u32], bits: u32) -> Self;
}

impl TableKey for u64 {
    fn pack(xs: &[u32], bits: u32) -> u64 {
        xs.iter().fold(0, |a, &x| a << bits | x as u64)
    }
}

impl TableKey for u128 {
    fn pack(xs: &[u32], bits: u32) -> u128 {
        xs.iter().fold(0, |a, &x| a << bits | x as u128)
    }
}

impl TableKey for Vec<u32> {
    fn pack(xs: &[u32], _: u32) -> Vec<u32> {
        xs.to_vec()
    }
}

fn enumeration_order(
    g: &Graph,
    bag: &[usize],
    matching: &[(usize, usize)],
) -> (Vec<usize>, Vec<Step>) {
    let mut order: Vec<usize> = Vec::new();
    let mut steps = Vec::new();
    let placed_nbrs = |order: &[usize], v: usize| -> Vec<usize> {
        (0..order.len())
            .filter(|&i| g.has_edge(order[i], v))
            .collect()
    };
    let mut pending: Vec<(usize, usize)> = matching.to_vec();
    while !pending.is_empty() {
        let pick = pending.iter().position(|&(a, b)| {
            !placed_nbrs(&order, a).is_empty() || !placed_nbrs(&order, b).is_empty()
        });
        let (mut a, mut b) = pending.remove(pick.unwrap_or(0));
        if placed_nbrs(&order, a).is_empty() {
            core::mem::swap(&mut a, &mut b);
        }
        let near = placed_nbrs(&order, a);
        steps.push(if near.is_empty() {
            Step::Free
        } else {
            Step::Near(near)
        });
        order.push(a);
        steps.push(Step::Near(placed_nbrs(&order, b)));
        order.push(b);
    }
    for &z in bag {
        if !order.contains(&z) {
            let near = placed_nbrs(&order, z);
            steps.push(if near.is_empty() {
                Step::Free
            } else {
                Step::Near(near)
            });
            order.push(z);
        }
    }
    (order, steps)
}

/// The bag minimizing the largest number of pattern vertices below any
/// non-root bag. Tables describe partial maps of those vertices, so shallow
/// subtrees keep them small.
fn balanced_root(td: &TreeDecomposition) -> usize {
    let k = td.bags().len();
    if td.bags().iter().flatten().any(|&v| v >= 64) {
        return 0;
    }
    let cost = |r: usize| {
        let (parent, top_down) = td.rooted_at(r);
        let mut below: Vec<u64> = td
            .bags()
            .iter()
            .map(|b| b.iter().fold(0u64, |m, &v| m | 1 << v))
            .collect();
        for &b in top_down.iter().rev() {
            if let Some(p) = parent[b] {
                below[p] |= below[b];
            }
        }
        let sizes = (0..k).filter(|&b| b != r).map(|b| below[b].count_ones());
        (sizes.clone().max().unwrap_or(0), sizes.sum::<u32>())
    };
    (0..k).min_by_key(|&r| cost(r)).unwrap_or(0)
}

impl CircuitPlan {
    /// Prepares the construction for pattern `g`. Each constraint is anchored
    /// at the topmost bag holding all of its vertices.
    pub fn new(
        g: &Graph,
        d: &MatchedTreeDecomposition,
        constraints: &[Constraint],
    ) -> Result<CircuitPlan> {
        if !verify_matched_td(g, d)? {
            return Err(Error::InvalidDecomposition(
                "not a matched tree decomposition of this pattern".into(),
            ));
        }
        let td = d.decomposition();
        let (parent, top_down) = td.rooted_at(balanced_root(td));
        let k = td.bags().len();
        let n = g.vertex_count();
        let mut depth = vec![0usize; k];
        for &b in &top_down {
            if let Some(p) = parent[b] {
                depth[b] = depth[p] + 1;
            }
        }
        let mut home = vec![usize::MAX; n];
        for &b in &top_down {
            for &v in &td.bags()[b] {
                if home[v] == usize::MAX {
                    home[v] = b;
                }
            }
        }
        let mut anchored: Vec<Vec<Constraint>> = vec![Vec::new(); k];
        for c in constraints {
            let vs = c.vertices();
            if let Some(&v) = vs.iter().find(|&&v| v >= n) {
                return Err(Error::VertexOutOfRange { vertex: v, n });
            }
            let holder = top_down
                .iter()
                .copied()
                .find(|&b| vs.iter().all(|v| td.bags()[b].binary_search(v).is_ok()))
                .ok_or_else(|| Error::UnanchoredConstraint(format!("{c}")))?;
            anchored[holder].push(c.clone());
        }
        let mut bags = Vec::with_capacity(k);
        for b in 0..k {
            let bag = &td.bags()[b];
            let (verts, steps) = enumeration_order(g, bag, &d.matchings()[b]);
            let pos = |v: usize| verts.iter().position(|&x| x == v).unwrap();
            let checks = (0..verts.len())
                .map(|i| (0..i).filter(|&j| g.has_edge(verts[i], verts[j])).collect())
                .collect();
            let shared = |other: usize| -> Vec<usize> {
                let ob = &td.bags()[other];
                bag.iter()
                    .copied()
                    .filter(|v| ob.binary_search(v).is_ok())
                    .map(pos)
                    .collect()
            };
            let key = parent[b].map(shared).unwrap_or_default();
            let child_keys = (0..k)
                .filter(|&c| parent[c] == Some(b))
                .map(|c| (c, shared(c)))
                .collect();
            let assigned = bag
                .iter()
                .copied()
                .filter(|&v| home[v] == b)
                .map(pos)
                .collect();
            bags.push(BagPlan {
                verts,
                steps,
                checks,
                key,
                child_keys,
                assigned,
                constraints: anchored[b].clone(),
            });
        }
        let post_order = top_down.into_iter().rev().collect();
        let widest_key = bags.iter().map(|b| b.key.len()).max().unwrap_or(0);
        Ok(CircuitPlan {
            bags,
            post_order,
            pattern_size: n,
            widest_key,
        })
    }

    fn run<S: GateSink>(&self, h: &Graph, sink: &mut S) -> Option<S::Val> {
        let bits = usize::BITS - h.vertex_count().leading_zeros();
        let packed = self.widest_key as u32 * bits;
        if packed <= 64 {
            self.run_keyed::<S, u64>(h, sink, bits)
        } else if packed <= 128 {
            self.run_keyed::<S, u128>(h, sink, bits)
        } else {
            self.run_keyed::<S, Vec<u32>>(h, sink, bits)
        }
    }

    /// A bag's table maps interface images to slots in a dense value vector;
    /// both are dropped once the parent bag has been enumerated.
    fn run_keyed<S: GateSink, K: TableKey>(
        &self,
        h: &Graph,
        sink: &mut S,
        bits: u32,
    ) -> Option<S::Val> {
        let k = self.bags.len();
        let mut index: Vec<HashMap<K, u32>> = (0..k).map(|_| HashMap::new()).collect();
        let mut vals: Vec<Vec<S::Val>> = (0..k).map(|_| Vec::new()).collect();
        let mut sigma = vec![0usize; self.pattern_size];
        let mut root_val = None;
        for &b in &self.post_order {
            let plan = &self.bags[b];
            let mut slots: HashMap<K, u32> = HashMap::new();
            let mut accs: Vec<S::Acc> = Vec::new();
            let mut en = Enum {
                plan,
                h,
                img: vec![0u32; plan.verts.len()],
                bits,
                keybuf: Vec::new(),
                vars: Vec::new(),
                kids: Vec::new(),
                index: &index,
                vals: &vals,
                slots: &mut slots,
                accs: &mut accs,
                sink,
                sigma: &mut sigma,
            };
            en.rec(0);
            for (c, _) in &plan.child_keys {
                index[*c] = HashMap::new();
                vals[*c] = Vec::new();
            }
            let mut remap = Vec::with_capacity(accs.len());
            let mut out = Vec::with_capacity(accs.len());
            for acc in accs {
                match sink.finish(acc) {
                    Some(v) => {
                        remap.push(out.len() as u32);
                        out.push(v);
                    }
                    None => remap.push(u32::MAX),
                }
            }
            if out.len() < remap.len() {
                slots.retain(|_, id| {
                    *id = remap[*id as usize];
                    *id != u32::MAX
                });
            }
            if plan.key.is_empty() && self.post_order.last() == Some(&b) {
                root_val = out.pop();
            } else {
                index[b] = slots;
                vals[b] = out;
            }
        }
        root_val
    }

    /// Materializes the circuit for host `h`.
    pub fn build(&self, h: &Graph) -> HomCircuit {
        let mut rec = Recorder {
            circuit: HomCircuit {
                data: Vec::new(),
                gates: Vec::new(),
                output: None,
            },
        };
        let out = self.run(h, &mut rec);
        rec.circuit.output = out;
        rec.circuit
    }

    /// Evaluates the polynomial for host `h` without materializing it.
    pub fn evaluate<R: EvalRing>(&self, h: &Graph, ring: &R) -> R::Elem {
        let mut ev = Evaluator { ring };
        self.run(h, &mut ev).unwrap_or_else(|| ring.zero())
    }
}

struct Enum<'a, S: GateSink, K> {
    plan: &'a BagPlan,
    h: &'a Graph,
    img: Vec<u32>,
    bits: u32,
    keybuf: Vec<u32>,
    vars: Vec<u32>,
    kids: Vec<(usize, u32)>,
    index: &'a [HashMap<K, u32>],
    vals: &'a [Vec<S::Val>],
    slots: &'a mut HashMap<K, u32>,
    accs: &'a mut Vec<S::Acc>,
    sink: &'a mut S,
    sigma: &'a mut [usize],
}

impl<S: GateSink, K: TableKey> Enum<'_, S, K> {
    fn place(&mut self, i: usize, x: u32) {
        if self.plan.checks[i]
            .iter()
            .all(|&j| self.h.has_edge(x as usize, self.img[j] as usize))
        {
            self.img[i] = x;
            self.rec(i + 1);
        }
    }

    fn rec(&mut self, i: usize) {
        if i == self.img.len() {
            self.leaf();
            return;
        }
        match &self.plan.steps[i] {
            Step::Free => {
                for x in 0..self.h.vertex_count() as u32 {
                    self.place(i, x);
                }
            }
            Step::Near(near) => {
                let h = self.h;
                let src = near
                    .iter()
                    .map(|&j| self.img[j])
                    .min_by_key(|&x| h.degree(x as usize))
                    .unwrap();
                for &x in h.neighbors(src as usize) {
                    self.place(i, x);
                }
            }
        }
    }

    fn leaf(&mut self) {
        let plan = self.plan;
        if !plan.constraints.is_empty() {
            for (p, &v) in plan.verts.iter().enumerate() {
                self.sigma[v] = self.img[p] as usize;
            }
            if !all_hold(&plan.constraints, self.sigma) {
                return;
            }
        }
        self.kids.clear();
        for (c, positions) in &plan.child_keys {
            self.keybuf.clear();
            self.keybuf.extend(positions.iter().map(|&p| self.img[p]));
            match self.index[*c].get(&K::pack(&self.keybuf, self.bits)) {
                Some(&id) => self.kids.push((*c, id)),
                None => return,
            }
        }
        self.vars.clear();
        self.vars.extend(plan.assigned.iter().map(|&p| self.img[p]));
        self.keybuf.clear();
        self.keybuf.extend(plan.key.iter().map(|&p| self.img[p]));
        let id = match self.slots.entry(K::pack(&self.keybuf, self.bits)) {
            Entry::Occupied(e) => *e.get(),
            Entry::Vacant(e) => {
                let id = self.accs.len() as u32;
                self.accs.push(self.sink.new_acc());
                *e.insert(id)
            }
        };
        self.sink.add_term(
            &mut self.accs[id as usize],
            &self.vars,
            &self.kids,
            self.vals,
        );
    }
}

/// Receives the terms produced by the construction.
pub trait GateSink {
    type Acc;
    type Val;
    fn new_acc(&mut self) -> Self::Acc;
    /// Adds `Π y(vars) · Π vals[bag][id]` over `kids` to `acc`.
    fn add_term(
        &mut self,
        acc: &mut Self::Acc,
        vars: &[u32],
        kids: &[(usize, u32)],
        vals: &[Vec<Self::Val>],
    );
    /// `None` marks a gate that is identically zero.
    fn finish(&mut self, acc: Self::Acc) -> Option<Self::Val>;
}

/// A monotone arithmetic circuit. Gates are sums of products of host-vertex
/// variables and earlier gates; gate ids follow a topological order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomCircuit {
    /// Per term: `[#vars, vars.., #kids, kids..]`.
    data: Vec<u32>,
    gates: Vec<(u32, u32)>,
    output: Option<u32>,
}

impl HomCircuit {
    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    pub fn term_count(&self) -> usize {
        self.gates
            .iter()
            .map(|&(s, e)| self.terms(s, e).count())
            .sum()
    }

    /// `None` when the polynomial is identically zero.
    pub fn output(&self) -> Option<usize> {
        self.output.map(|o| o as usize)
    }

    fn terms(&self, start: u32, end: u32) -> impl Iterator<Item = (&[u32], &[u32])> + '_ {
        let mut i = start as usize;
        let end = end as usize;
        core::iter::from_fn(move || {
            if i >= end {
                return None;
            }
            let nv = self.data[i] as usize;
            let vars = &self.data[i + 1..i + 1 + nv];
            let nk = self.data[i + 1 + nv] as usize;
            let kids = &self.data[i + 2 + nv..i + 2 + nv + nk];
            i += 2 + nv + nk;
            Some((vars, kids))
        })
    }

    /// Debug listing; the layout is not a stable format.
    pub fn dump(&self) -> String {
        let mut s = String::from("hom-circuit v1\n");
        for (id, &(a, b)) in self.gates.iter().enumerate() {
            let _ = write!(s, "gate {id} =");
            for (t, (vars, kids)) in self.terms(a, b).enumerate() {
                s.push_str(if t == 0 { " " } else { " + " });
                let mut factors: Vec<String> = vars.iter().map(|v| format!("y{v}")).collect();
                factors.extend(kids.iter().map(|k| format!("g{k}")));
                if factors.is_empty() {
                    s.push('1');
                } else {
                    s.push_str(&factors.join("*"));
                }
            }
            s.push('\n');
        }
        match self.output {
            Some(o) => {
                let _ = writeln!(s, "output g{o}");
            }
            None => s.push_str("output 0\n"),
        }
        s
    }
}

struct Recorder {
    circuit: HomCircuit,
}

impl GateSink for Recorder {
    type Acc = Vec<u32>;
    type Val = u32;
    fn new_acc(&mut self) -> Vec<u32> {
        Vec::new()
    }
    fn add_term(
        &mut self,
        acc: &mut Vec<u32>,
        vars: &[u32],
        kids: &[(usize, u32)],
        vals: &[Vec<u32>],
    ) {
        acc.push(vars.len() as u32);
        acc.extend_from_slice(vars);
        acc.push(kids.len() as u32);
        acc.extend(kids.iter().map(|&(b, i)| vals[b][i as usize]));
    }
    fn finish(&mut self, acc: Vec<u32>) -> Option<u32> {
        let c = &mut self.circuit;
        let start = c.data.len() as u32;
        c.data.extend_from_slice(&acc);
        c.gates.push((start, c.data.len() as u32));
        Some(c.gates.len() as u32 - 1)
    }
}

struct Evaluator<'r, R: EvalRing> {
    ring: &'r R,
}

impl<R: EvalRing> GateSink for Evaluator<'_, R> {
    type Acc = R::Elem;
    type Val = R::Elem;
    fn new_acc(&mut self) -> R::Elem {
        self.ring.zero()
    }
    fn add_term(
        &mut self,
        acc: &mut R::Elem,
        vars: &[u32],
        kids: &[(usize, u32)],
        vals: &[Vec<R::Elem>],
    ) {
        let r = self.ring;
        let mut t = match kids.first() {
            Some(&(b, i)) => vals[b][i as usize].clone(),
            None => r.one(),
        };
        for &(b, i) in kids.iter().skip(1) {
            t = r.mul(&t, &vals[b][i as usize]);
        }
        for &x in vars {
            t = r.mul_var(&t, x);
        }
        r.add(acc, &t);
    }
    fn finish(&mut self, acc: R::Elem) -> Option<R::Elem> {
        if self.ring.is_zero(&acc) {
            None
        } else {
            Some(acc)
        }
    }
}

/// Builds the circuit of homomorphisms `g → h` that satisfy `constraints`.
pub fn build_hom_circuit(
    g: &Graph,
    d: &MatchedTreeDecomposition,
    h: &Graph,
    constraints: &[Constraint],
) -> Result<HomCircuit> {
    Ok(CircuitPlan::new(g, d, constraints)?.build(h))
}

/// Evaluates `c` in one pass over its gates.
pub fn evaluate_circuit<R: EvalRing>(c: &HomCircuit, ring: &R) -> R::Elem {
    let mut vals: Vec<R::Elem> = Vec::with_capacity(c.gates.len());
    for &(a, b) in &c.gates {
        let mut acc = ring.zero();
        for (vars, kids) in c.terms(a, b) {
            let mut t = ring.one();
            for &k in kids {
                t = ring.mul(&t, &vals[k as usize]);
            }
            for &x in vars {
                t = ring.mul_var(&t, x);
            }
            ring.add(&mut acc, &t);
        }
        vals.push(acc);
    }
    match c.output {
        Some(o) => vals.swap_remove(o as usize),
        None => ring.zero(),
    }
}

/// `|Hom(g, h)|` through the circuit construction, evaluated on the fly.
pub fn count_hom_mtw(g: &Graph, d: &MatchedTreeDecomposition, h: &Graph) -> Result<BigUint> {
    let plan = CircuitPlan::new(g, d, &[])?;
    Ok(count_with_plan(&plan, h))
}

pub fn count_with_plan(plan: &CircuitPlan, h: &Graph) -> BigUint {
    let ring = CheckedU128::default();
    let v = plan.evaluate(h, &ring);
    if !ring.overflowed() {
        return BigUint::from(v);
    }
    plan.evaluate(h, &Naturals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::{exact_mtw, TreeDecomposition};
    use crate::named::pattern_from_str as p;

    fn witness(name: &str) -> (Graph, MatchedTreeDecomposition) {
        let g = p(name).unwrap();
        let (_, d) = exact_mtw(&g, 8).unwrap().unwrap();
        (g, d)
    }

    #[test]
    fn k2_circuit_counts_arcs() {
        let (g, d) = witness("clique:2");
        let h = p("cycle:5").unwrap();
        let c = build_hom_circuit(&g, &d, &h, &[]).unwrap();
        assert_eq!(evaluate_circuit(&c, &Naturals), BigUint::from(10u8));
        assert_eq!(count_hom_mtw(&g, &d, &h).unwrap(), BigUint::from(10u8));
    }

    #[test]
    fn p4_edge_bags() {
        let g = p("path:4").unwrap();
        let td = TreeDecomposition::new(
            vec![vec![0, 1], vec![1, 2], vec![2, 3]],
            vec![(0, 1), (1, 2)],
        )
        .unwrap();
        let d = MatchedTreeDecomposition::certify(&g, td).unwrap();
        // closed-form check: 3-edge walks in P4 number 3 + 5 + 5 + 3
        assert_eq!(count_hom_mtw(&g, &d, &g).unwrap(), BigUint::from(16u8));
        assert_eq!(crate::oracle::oracle_hom(&g, &g, &[]).unwrap(), 16);
    }

    #[test]
    fn c5_and_c4() {
        let (g, d) = witness("cycle:5");
        assert_eq!(count_hom_mtw(&g, &d, &g).unwrap(), BigUint::from(10u8));
        let (g, d) = witness("cycle:4");
        let k3 = p("clique:3").unwrap();
        let c = build_hom_circuit(&g, &d, &k3, &[]).unwrap();
        assert_eq!(evaluate_circuit(&c, &Naturals), BigUint::from(18u8));
    }

    #[test]
    fn zero_valuation_gives_zero() {
        struct Zeros;
        impl EvalRing for Zeros {
            type Elem = u64;
            fn zero(&self) -> u64 {
                0
            }
            fn one(&self) -> u64 {
                1
            }
            fn add(&self, a: &mut u64, b: &u64) {
                *a += b;
            }
            fn mul(&self, a: &u64, b: &u64) -> u64 {
                a * b
            }
            fn var(&self, _: u32) -> u64 {
                0
            }
            fn is_zero(&self, a: &u64) -> bool {
                *a == 0
            }
        }
        let (g, d) = witness("cycle:4");
        let c = build_hom_circuit(&g, &d, &p("clique:4").unwrap(), &[]).unwrap();
        assert_eq!(evaluate_circuit(&c, &Zeros), 0);
    }

    #[test]
    fn unanchored_constraint_is_rejected() {
        let g = p("path:4").unwrap();
        let td = TreeDecomposition::new(
            vec![vec![0, 1], vec![1, 2], vec![2, 3]],
            vec![(0, 1), (1, 2)],
        )
        .unwrap();
        let d = MatchedTreeDecomposition::certify(&g, td).unwrap();
        let r = CircuitPlan::new(&g, &d, &[Constraint::Less(0, 3)]);
        assert!(matches!(r, Err(Error::UnanchoredConstraint(_))));
        let plan = CircuitPlan::new(&g, &d, &[Constraint::Less(0, 1)]).unwrap();
        let want = crate::oracle::oracle_hom(&g, &g, &[Constraint::Less(0, 1)]).unwrap();
        assert_eq!(plan.evaluate(&g, &Naturals), BigUint::from(want));
    }

    #[test]
    fn dump_lists_gates() {
        let (g, d) = witness("clique:2");
        let c = build_hom_circuit(&g, &d, &p("clique:2").unwrap(), &[]).unwrap();
        let text = c.dump();
        assert!(text.starts_with("hom-circuit v1\n"));
        assert!(text.contains("y0*y1"));
        assert!(text.ends_with("output g0\n"));
    }
}
