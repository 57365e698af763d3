//! Constant-space homomorphism counting over matched elimination trees.
//!
//! The tree is walked depth-first with one image slot per pattern vertex. A
//! vertex adjacent to its tree parent takes its image from the parent image's
//! neighborhood, so a top vertex and its partner child are enumerated as the
//! arcs `(x, y)` of the host grouped by source `x`: for each `x` the per-child
//! sums are accumulated over the arcs leaving `x`, and their product is
//! flushed into the running total when the source changes. Vertices adjacent
//! to some other ancestor draw their image from the neighborhood of that
//! ancestor's image (the smallest one at run time); only vertices with no
//! earlier neighbor range over the whole host.
//!
//! Nothing allocated during the walk depends on the host: the scratch space is
//! one image per pattern vertex plus the recursion stack of depth `d`.

use alloc::vec;
use alloc::vec::Vec;
use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::decomp::{verify_matched_elim_tree, EliminationTree, MatchedEliminationTree};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// How a pattern vertex gets its image.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Source {
    /// From the neighborhood of the parent's image.
    Parent,
    /// From the neighborhood of some adjacent ancestor's image.
    Ancestor,
    /// From the whole host.
    Free,
}

struct Layout {
    children: Vec<Vec<usize>>,
    parent: Vec<Option<usize>>,
    /// Adjacent ancestors of each vertex.
    back: Vec<Vec<usize>>,
    source: Vec<Source>,
    root: usize,
}

impl Layout {
    fn new(g: &Graph, t: &EliminationTree) -> Layout {
        let n = g.vertex_count();
        let mut back = vec![Vec::new(); n];
        let mut source = vec![Source::Free; n];
        let mut parent = vec![None; n];
        for v in 0..n {
            parent[v] = t.parent(v);
            let mut a = t.parent(v);
            while let Some(x) = a {
                if g.has_edge(v, x) {
                    back[v].push(x);
                }
                a = t.parent(x);
            }
            source[v] = match t.parent(v) {
                Some(p) if g.has_edge(v, p) => Source::Parent,
                _ if !back[v].is_empty() => Source::Ancestor,
                _ => Source::Free,
            };
        }
        Layout {
            children: t.children(),
            parent,
            back,
            source,
            root: t.root(),
        }
    }
}

trait Tally: Sized {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    /// `false` on overflow.
    fn add(&mut self, o: &Self) -> bool;
    fn mul(&mut self, o: &Self) -> bool;
}

impl Tally for u128 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn add(&mut self, o: &Self) -> bool {
        match self.checked_add(*o) {
            Some(v) => {
                *self = v;
                true
            }
            None => false,
        }
    }
    fn mul(&mut self, o: &Self) -> bool {
        match self.checked_mul(*o) {
            Some(v) => {
                *self = v;
                true
            }
            None => false,
        }
    }
}

impl Tally for BigUint {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&mut self, o: &Self) -> bool {
        *self += o;
        true
    }
    fn mul(&mut self, o: &Self) -> bool {
        *self *= o;
        true
    }
}

struct Walk<'a> {
    l: &'a Layout,
    h: &'a Graph,
    sigma: Vec<usize>,
}

impl Walk<'_> {
    fn consistent(&self, v: usize, x: usize) -> bool {
        self.l.back[v]
            .iter()
            .all(|&a| self.h.has_edge(x, self.sigma[a]))
    }

    /// Product over the children of `v` of their extension counts.
    fn below<T: Tally>(&mut self, v: usize) -> Option<T> {
        let mut prod = T::one();
        for i in 0..self.l.children[v].len() {
            let c = self.l.children[v][i];
            let s: T = self.ext(c)?;
            if s.is_zero() {
                return Some(T::zero());
            }
            if !prod.mul(&s) {
                return None;
            }
        }
        Some(prod)
    }

    fn try_image<T: Tally>(&mut self, v: usize, x: usize, total: &mut T) -> Option<()> {
        if self.consistent(v, x) {
            self.sigma[v] = x;
            let p: T = self.below(v)?;
            if !total.add(&p) {
                return None;
            }
        }
        Some(())
    }

    /// Number of ways to map the subtree of `v` given the ancestors' images.
    fn ext<T: Tally>(&mut self, v: usize) -> Option<T> {
        let mut total = T::zero();
        let h = self.h;
        match self.l.source[v] {
            Source::Free => {
                for x in 0..h.vertex_count() {
                    self.try_image(v, x, &mut total)?;
                }
            }
            Source::Parent | Source::Ancestor => {
                let anchor = if self.l.source[v] == Source::Parent {
                    self.l.parent[v].unwrap()
                } else {
                    *self.l.back[v]
                        .iter()
                        .min_by_key(|&&a| h.degree(self.sigma[a]))
                        .unwrap()
                };
                let from = self.sigma[anchor];
                for &x in h.neighbors(from) {
                    self.try_image(v, x as usize, &mut total)?;
                }
            }
        }
        Some(total)
    }
}

/// `|Hom(g, h)|` for a connected pattern `g` with a matched elimination tree.
pub fn count_hom_mtd(g: &Graph, t: &MatchedEliminationTree, h: &Graph) -> Result<BigUint> {
    if !verify_matched_elim_tree(g, t.tree())? {
        return Err(Error::InvalidElimTree(
            "not a matched elimination tree of this pattern".into(),
        ));
    }
    let layout = Layout::new(g, t.tree());
    let mut w = Walk {
        l: &layout,
        h,
        sigma: vec![0; g.vertex_count()],
    };
    let root = layout.root;
    if let Some(c) = w.ext::<u128>(root) {
        return Ok(BigUint::from(c));
    }
    Ok(w.ext::<BigUint>(root)
        .expect("arbitrary precision never overflows"))
}

/// Host statistics used to compare candidate trees.
#[derive(Clone, Copy, Debug)]
pub struct HostProfile {
    pub n: f64,
    pub m: f64,
    /// Expected degree of a vertex reached along a uniformly random arc.
    pub branching: f64,
}

impl HostProfile {
    pub fn of(h: &Graph) -> HostProfile {
        let n = h.vertex_count() as f64;
        let arcs = h.arc_count() as f64;
        let sq: f64 = (0..h.vertex_count())
            .map(|v| (h.degree(v) * h.degree(v)) as f64)
            .sum();
        let branching = if arcs > 0.0 { sq / arcs } else { 0.0 };
        HostProfile {
            n,
            m: arcs / 2.0,
            branching,
        }
    }
}

/// Rough number of image trials `count_hom_mtd` makes with tree `t` on a host
/// with the given profile: for every vertex, the product of per-level
/// candidate counts along its root path.
pub fn estimated_work(g: &Graph, t: &EliminationTree, p: &HostProfile) -> f64 {
    let l = Layout::new(g, t);
    let mut total = 0.0;
    let mut stack = vec![(l.root, 1.0f64)];
    while let Some((v, above)) = stack.pop() {
        let f = match l.source[v] {
            Source::Free => p.n,
            _ => p.branching.max(1.0),
        };
        let here = above * f;
        total += here;
        stack.extend(l.children[v].iter().map(|&c| (c, here)));
    }
    total
}
