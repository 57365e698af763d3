//! Randomized induced-subgraph detection for `C6` and complements of paths.
//!
//! Modulo 2 the induced-subgraph polynomial of a pattern `G` is the sum of the
//! subgraph polynomials of the edge supergraphs `G'` of `G` on the same vertex
//! set that contain an odd number of copies of `G`. A subgraph polynomial is
//! recovered from the homomorphism polynomial by keeping only the multilinear
//! monomials and dividing by `|Aut(G')|`; over GF(2) the division is replaced
//! by symmetry-breaking constraints that leave an odd number of the
//! automorphic relabelings of every copy.
//!
//! Non-multilinear monomials are killed by substituting, for each host vertex
//! `x`, the group-algebra element `e_0 + e_{v(x)}` of `GF(2)[Z_2^k]`, whose
//! square is zero. A product of such elements over a vertex set is nonzero
//! exactly when the labels are linearly independent, so a nonzero evaluation
//! certifies an induced copy and a random labeling finds one with constant
//! probability.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use hashbrown::HashSet;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::canon::{automorphisms, canonical_form};
use crate::decomp::{exact_mtw_covering, MatchedTreeDecomposition, TreeDecomposition};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::homcount::{all_hold, CircuitPlan, Constraint, EvalRing};
use crate::named::{make_pattern, PatternName};
use crate::oracle::oracle_sub;

/// An element of `GF(2)[Z_2^k]`: bit `g` of the mask is the coefficient of
/// the group element `g`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupAlgebraElement {
    words: Vec<u64>,
}

/// `SWAP[t]` selects the positions whose bit `t` is clear.
const SWAP: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0F0F_0F0F_0F0F_0F0F,
    0x00FF_00FF_00FF_00FF,
    0x0000_FFFF_0000_FFFF,
    0x0000_0000_FFFF_FFFF,
];

/// Largest supported group dimension.
pub const MAX_DIMENSION: usize = 16;

impl GroupAlgebraElement {
    pub fn zero(k: usize) -> Self {
        assert!(k <= MAX_DIMENSION, "group dimension {k} too large");
        GroupAlgebraElement {
            words: vec![0; ((1usize << k) / 64).max(1)],
        }
    }

    pub fn one(k: usize) -> Self {
        let mut e = Self::zero(k);
        e.words[0] = 1;
        e
    }

    /// `e_0 + e_v`.
    pub fn generator(k: usize, v: u32) -> Self {
        let mut e = Self::one(k);
        e.flip(v);
        e
    }

    fn flip(&mut self, g: u32) {
        self.words[g as usize / 64] ^= 1 << (g % 64);
    }

    pub fn coefficient(&self, g: u32) -> bool {
        self.words[g as usize / 64] >> (g % 64) & 1 == 1
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn add_assign(&mut self, o: &Self) {
        for (a, b) in self.words.iter_mut().zip(&o.words) {
            *a ^= b;
        }
    }

    /// `self · e_v`: the coefficient of `g` moves to `g ⊕ v`.
    pub fn translate(&self, v: u32) -> Self {
        let hi = v as usize >> 6;
        let mut out = vec![0u64; self.words.len()];
        for (w, o) in out.iter_mut().enumerate() {
            let mut x = self.words[w ^ hi];
            for (t, &m) in SWAP.iter().enumerate() {
                if v >> t & 1 == 1 {
                    let s = 1 << t;
                    x = ((x & m) << s) | ((x >> s) & m);
                }
            }
            *o = x;
        }
        GroupAlgebraElement { words: out }
    }

    /// XOR convolution.
    pub fn mul(&self, o: &Self) -> Self {
        let mut out = GroupAlgebraElement {
            words: vec![0; self.words.len()],
        };
        for (w, &word) in self.words.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let b = bits.trailing_zeros();
                bits &= bits - 1;
                out.add_assign(&o.translate(w as u32 * 64 + b));
            }
        }
        out
    }

    /// `self · (e_0 + e_v)`.
    pub fn mul_generator(&self, v: u32) -> Self {
        let mut t = self.translate(v);
        t.add_assign(self);
        t
    }
}

/// The group algebra with host vertex `x` valued at `e_0 + e_{labels[x]}`.
pub struct GroupAlgebra {
    pub dimension: usize,
    pub labels: Vec<u32>,
}

impl EvalRing for GroupAlgebra {
    type Elem = GroupAlgebraElement;
    fn zero(&self) -> Self::Elem {
        GroupAlgebraElement::zero(self.dimension)
    }
    fn one(&self) -> Self::Elem {
        GroupAlgebraElement::one(self.dimension)
    }
    fn add(&self, a: &mut Self::Elem, b: &Self::Elem) {
        a.add_assign(b);
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.mul(b)
    }
    fn var(&self, x: u32) -> Self::Elem {
        GroupAlgebraElement::generator(self.dimension, self.labels[x as usize])
    }
    fn mul_var(&self, a: &Self::Elem, x: u32) -> Self::Elem {
        a.mul_generator(self.labels[x as usize])
    }
    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.is_zero()
    }
}

#[derive(Clone, Debug)]
pub struct RecipeTerm {
    /// Supergraph `G'` of the pattern, labeled so the pattern is a spanning
    /// subgraph on the same vertex ids.
    pub graph: Graph,
    pub decomposition: MatchedTreeDecomposition,
    pub constraints: Vec<Constraint>,
    plan: CircuitPlan,
}

impl RecipeTerm {
    pub fn new(
        graph: Graph,
        decomposition: MatchedTreeDecomposition,
        constraints: Vec<Constraint>,
    ) -> Result<Self> {
        let plan = CircuitPlan::new(&graph, &decomposition, &constraints)?;
        Ok(RecipeTerm {
            graph,
            decomposition,
            constraints,
            plan,
        })
    }
}

#[derive(Clone, Debug)]
pub struct DetectionRecipe {
    pub pattern: Graph,
    pub terms: Vec<RecipeTerm>,
    pub trials: usize,
    pub seed: u64,
    /// Group dimension `k`.
    pub dimension: usize,
}

pub const DEFAULT_TRIALS: usize = 32;
pub const DEFAULT_SEED: u64 = 0x6d77_2d64_6574;

impl DetectionRecipe {
    fn new(pattern: Graph, terms: Vec<RecipeTerm>) -> Self {
        let dimension = pattern.vertex_count() + 2;
        DetectionRecipe {
            pattern,
            terms,
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
            dimension,
        }
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// For each ordering of the pattern's image vertices, the number of
/// automorphisms `α` such that the relabeled map `σ ∘ α` passes every
/// constraint. Indexed by the orderings in lexicographic order.
pub fn surviving_multiplicities(g: &Graph, constraints: &[Constraint]) -> Result<Vec<usize>> {
    let auts = automorphisms(g)?;
    let n = g.vertex_count();
    let mut out = Vec::new();
    let mut sigma = vec![0usize; n];
    for_each_permutation(n, &mut |rank| {
        let c = auts
            .iter()
            .filter(|a| {
                for v in 0..n {
                    sigma[v] = rank[a[v]];
                }
                all_hold(constraints, &sigma)
            })
            .count();
        out.push(c);
    });
    Ok(out)
}

/// Every relabeled copy survives an odd number of times.
pub fn constraints_valid(g: &Graph, constraints: &[Constraint]) -> Result<bool> {
    Ok(surviving_multiplicities(g, constraints)?
        .iter()
        .all(|c| c % 2 == 1))
}

fn for_each_permutation(n: usize, f: &mut dyn FnMut(&[usize])) {
    fn go(p: &mut Vec<usize>, used: u32, n: usize, f: &mut dyn FnMut(&[usize])) {
        if p.len() == n {
            f(p);
            return;
        }
        for x in 0..n {
            if used >> x & 1 == 0 {
                p.push(x);
                go(p, used | 1 << x, n, f);
                p.pop();
            }
        }
    }
    go(&mut Vec::with_capacity(n), 0, n, f);
}

fn cycle6() -> Graph {
    make_pattern(&PatternName::Cycle(6)).expect("valid")
}

/// Edge supergraphs of `C6` on six vertices with an odd number of `C6`
/// copies, one labeled representative per isomorphism class. Vertex ids
/// follow the cycle `0-1-2-3-4-5`.
pub fn odd_c6_supergraphs() -> Result<Vec<Graph>> {
    let c6 = cycle6();
    let chords: Vec<(usize, usize)> = (0..6)
        .flat_map(|a| (a + 2..6).map(move |b| (a, b)))
        .filter(|&(a, b)| !(a == 0 && b == 5))
        .collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for mask in 0u32..1 << chords.len() {
        let extra: Vec<_> = (0..chords.len())
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| chords[i])
            .collect();
        let g = c6.with_edges(&extra)?;
        if seen.insert(canonical_form(&g)?) && oracle_sub(&c6, &g)? % 2 == 1 {
            out.push(g);
        }
    }
    Ok(out)
}

/// Constraint sets suggested by the hand analysis of the cycle itself and of
/// the supergraph with a flip symmetry, tried before the generic search.
fn hinted_sets() -> Vec<Vec<Constraint>> {
    vec![
        vec![Constraint::MinOf(1, vec![1, 2, 4, 5])],
        vec![Constraint::Less(2, 5), Constraint::Less(1, 3)],
    ]
}

fn candidate_constraints(n: usize) -> Vec<Constraint> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a != b {
                out.push(Constraint::Less(a, b));
            }
        }
    }
    for size in [3usize, 4] {
        for set in subsets(n, size) {
            for &a in &set {
                out.push(Constraint::MinOf(a, set.clone()));
            }
        }
    }
    out
}

fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == size)
        .map(|m| (0..n).filter(|&i| m >> i & 1 == 1).collect())
        .collect()
}

/// Per-candidate survival table: for each ordering, the bitset of
/// automorphisms passing the constraint.
struct Survival {
    words: usize,
    orderings: usize,
    table: Vec<u64>,
}

impl Survival {
    fn new(g: &Graph, auts: &[Vec<usize>], c: &Constraint) -> Survival {
        let n = g.vertex_count();
        let words = auts.len().div_ceil(64);
        let mut table = Vec::new();
        let mut orderings = 0;
        let mut sigma = vec![0usize; n];
        for_each_permutation(n, &mut |rank| {
            orderings += 1;
            let mut row = vec![0u64; words];
            for (i, a) in auts.iter().enumerate() {
                for v in 0..n {
                    sigma[v] = rank[a[v]];
                }
                if c.holds(&sigma) {
                    row[i / 64] |= 1 << (i % 64);
                }
            }
            table.extend(row);
        });
        Survival {
            words,
            orderings,
            table,
        }
    }
}

fn all_odd(parts: &[&Survival], auts: usize) -> bool {
    let words = auts.div_ceil(64);
    for o in 0..parts.first().map_or(0, |p| p.orderings) {
        let mut ones = 0;
        for w in 0..words {
            let mut x = if w + 1 == words && auts % 64 != 0 {
                (1u64 << (auts % 64)) - 1
            } else {
                u64::MAX
            };
            for p in parts {
                x &= p.table[o * p.words + w];
            }
            ones += x.count_ones();
        }
        if ones % 2 == 0 {
            return false;
        }
    }
    true
}

fn decompose_with(
    g: &Graph,
    cs: &[Constraint],
    width: usize,
) -> Result<Option<MatchedTreeDecomposition>> {
    let cover: Vec<Vec<usize>> = cs.iter().map(Constraint::vertices).collect();
    Ok(exact_mtw_covering(g, &cover, width)?.map(|(_, d)| d))
}

/// Finds constraints that leave every copy an odd number of times and fit a
/// matched decomposition of width at most `width` with every constraint
/// inside one bag.
pub fn find_constraints(
    g: &Graph,
    width: usize,
) -> Result<Option<(Vec<Constraint>, MatchedTreeDecomposition)>> {
    let auts = automorphisms(g)?;
    if auts.len() % 2 == 1 {
        if let Some(d) = decompose_with(g, &[], width)? {
            return Ok(Some((Vec::new(), d)));
        }
    }
    for cs in hinted_sets() {
        if cs
            .iter()
            .all(|c| c.vertices().iter().all(|&v| v < g.vertex_count()))
            && constraints_valid(g, &cs)?
        {
            if let Some(d) = decompose_with(g, &cs, width)? {
                return Ok(Some((cs, d)));
            }
        }
    }
    let cands = candidate_constraints(g.vertex_count());
    let tables: Vec<Survival> = cands.iter().map(|c| Survival::new(g, &auts, c)).collect();
    for size in 1..=3usize {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let parts: Vec<&Survival> = idx.iter().map(|&i| &tables[i]).collect();
            if all_odd(&parts, auts.len()) {
                let cs: Vec<Constraint> = idx.iter().map(|&i| cands[i].clone()).collect();
                if let Some(d) = decompose_with(g, &cs, width)? {
                    return Ok(Some((cs, d)));
                }
            }
            // next combination
            let mut i = size;
            while i > 0 && idx[i - 1] == cands.len() - size + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..size {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    Ok(None)
}

/// The detection recipe for induced `C6`: every odd supergraph with a
/// width-3 matched decomposition and a validated constraint set.
pub fn build_c6_recipe() -> Result<DetectionRecipe> {
    let mut terms = Vec::new();
    let mut missing = Vec::new();
    for g in odd_c6_supergraphs()? {
        match find_constraints(&g, 3)? {
            Some((cs, d)) => terms.push(RecipeTerm::new(g, d, cs)?),
            None => missing.push(crate::spasm::describe(&g)),
        }
    }
    if !missing.is_empty() {
        return Err(Error::NoWitness(format!(
            "C6 recipe: {}",
            missing.join("; ")
        )));
    }
    Ok(DetectionRecipe::new(cycle6(), terms))
}

/// Three-bag matched decomposition of the complement of `P_k` (path
/// `0-1-…-(k-1)`) around middle index `j`: bags miss `{j-1, j+1}`,
/// `{j, j+1}` and `{j, j+2}`; the middle one comes first and holds both
/// path ends.
pub fn pbar_decomposition(k: usize) -> Result<(Graph, MatchedTreeDecomposition)> {
    if !(4..=8).contains(&k) {
        return Err(Error::BadPattern(format!("pbar:{k} (supported: 4..=8)")));
    }
    let g = make_pattern(&PatternName::ComplementPath(k))?;
    let j = (k - 2) / 2;
    let without =
        |a: usize, b: usize| -> Vec<usize> { (0..k).filter(|&v| v != a && v != b).collect() };
    let bags = vec![without(j, j + 1), without(j - 1, j + 1), without(j, j + 2)];
    let td = TreeDecomposition::new(bags, vec![(0, 1), (0, 2)])?;
    let d = MatchedTreeDecomposition::certify(&g, td)?;
    Ok((g, d))
}

/// Single-term recipe for induced `P̄_k` with the constraint `σ(0) < σ(k-1)`
/// picking one of the two orientations of each copy.
pub fn build_pbar_recipe(k: usize) -> Result<DetectionRecipe> {
    let (g, d) = pbar_decomposition(k)?;
    let cs = vec![Constraint::Less(0, k - 1)];
    let term = RecipeTerm::new(g.clone(), d, cs)?;
    Ok(DetectionRecipe::new(g, vec![term]))
}

/// Recipe by pattern name: `c6` or `pbar:<k>`.
pub fn recipe_for(name: &str) -> Result<DetectionRecipe> {
    let lower = name.trim().to_ascii_lowercase();
    if lower == "c6" || lower == "cycle:6" {
        return build_c6_recipe();
    }
    match lower.parse::<PatternName>() {
        Ok(PatternName::ComplementPath(k)) => build_pbar_recipe(k),
        _ => Err(Error::BadPattern(String::from(name))),
    }
}

/// Group labels for one trial; trial `t` draws from stream `t` of the seed.
pub fn trial_labels(recipe: &DetectionRecipe, n: usize, trial: u64) -> Vec<u32> {
    let mut rng = ChaCha8Rng::seed_from_u64(recipe.seed);
    rng.set_stream(trial);
    let mask = (1u32 << recipe.dimension) - 1;
    (0..n).map(|_| rng.next_u32() & mask).collect()
}

/// One evaluation of the recipe; `true` certifies an induced copy.
pub fn run_trial(recipe: &DetectionRecipe, h: &Graph, trial: u64) -> bool {
    if h.vertex_count() < recipe.pattern.vertex_count() {
        return false;
    }
    let ring = GroupAlgebra {
        dimension: recipe.dimension,
        labels: trial_labels(recipe, h.vertex_count(), trial),
    };
    let mut acc = ring.zero();
    for t in &recipe.terms {
        acc.add_assign(&t.plan.evaluate(h, &ring));
    }
    !acc.is_zero()
}

/// `true` if some trial certifies an induced copy of the recipe's pattern.
/// Never wrong when it answers `true`.
pub fn detect_induced(recipe: &DetectionRecipe, h: &Graph) -> bool {
    (0..recipe.trials as u64).any(|t| run_trial(recipe, h, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::verify_matched_td;
    use crate::named::pattern_from_str as p;
    use crate::oracle::{oracle_induced_exists, oracle_injective_hom};

    #[test]
    fn generators_square_to_zero() {
        for k in [3usize, 6, 8, 10] {
            for v in 0..(1u32 << k).min(300) {
                let e = GroupAlgebraElement::generator(k, v);
                assert!(e.mul(&e).is_zero());
                assert_eq!(e.mul_generator(v), e.mul(&e));
            }
        }
    }

    #[test]
    fn translate_matches_definition() {
        let k = 8;
        let mut a = GroupAlgebraElement::zero(k);
        for g in [0u32, 3, 64, 77, 200, 255] {
            a.flip(g);
        }
        for v in [1u32, 5, 64, 130, 255] {
            let t = a.translate(v);
            for g in 0..256u32 {
                assert_eq!(t.coefficient(g), a.coefficient(g ^ v));
            }
        }
    }

    #[test]
    fn cycle_itself_uses_the_min_constraint() {
        let r = build_c6_recipe().unwrap();
        let own = r.terms.iter().find(|t| t.graph.edge_count() == 6).unwrap();
        assert_eq!(
            own.constraints,
            vec![Constraint::MinOf(1, vec![1, 2, 4, 5])]
        );
        assert!(surviving_multiplicities(&own.graph, &own.constraints)
            .unwrap()
            .iter()
            .all(|&c| c == 3));
        for t in &r.terms {
            assert!(t.decomposition.width() <= 3);
            assert!(constraints_valid(&t.graph, &t.constraints).unwrap());
            assert_eq!(oracle_sub(&cycle6(), &t.graph).unwrap() % 2, 1);
        }
    }

    #[test]
    fn even_supergraphs_are_excluded() {
        // K_{3,3} holds six Hamiltonian cycles
        let k33 = p("biclique:3,3").unwrap();
        assert_eq!(oracle_sub(&cycle6(), &k33).unwrap(), 6);
        let kept = odd_c6_supergraphs().unwrap();
        assert!(kept
            .iter()
            .all(|g| !crate::canon::is_isomorphic(g, &k33).unwrap()));
    }

    #[test]
    fn recipe_parity_on_some_six_vertex_hosts() {
        let r = build_c6_recipe().unwrap();
        let c6 = cycle6();
        for h in [
            cycle6(),
            p("clique:6").unwrap(),
            p("biclique:3,3").unwrap(),
            c6.with_edges(&[(0, 3)]).unwrap(),
        ] {
            let parity: u64 = r
                .terms
                .iter()
                .map(|t| oracle_injective_hom(&t.graph, &h, &t.constraints).unwrap())
                .sum();
            assert_eq!(parity % 2 == 1, oracle_induced_exists(&c6, &h).unwrap());
        }
    }

    #[test]
    fn pbar_decompositions() {
        for k in 4..=8 {
            let (g, d) = pbar_decomposition(k).unwrap();
            assert!(verify_matched_td(&g, &d).unwrap());
            assert_eq!(d.width(), k - 3);
        }
        assert!(build_pbar_recipe(3).is_err());
        assert!(build_pbar_recipe(9).is_err());
    }

    #[test]
    fn detection_basics() {
        let r = build_c6_recipe().unwrap();
        assert!(detect_induced(&r, &cycle6()));
        assert!(!detect_induced(&r, &p("clique:6").unwrap()));
        let c6k1 = cycle6().disjoint_union(&Graph::empty(1));
        assert!(detect_induced(&r, &c6k1));
        assert!(!detect_induced(&r, &p("cycle:7").unwrap()));
        let pb = build_pbar_recipe(5).unwrap();
        assert!(detect_induced(&pb, &p("pbar:5").unwrap()));
        assert!(!detect_induced(&pb, &p("clique:7").unwrap()));
    }
}
