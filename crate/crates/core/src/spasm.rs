//! Spasms and the subgraph-to-homomorphism basis change.
//!
//! For a connected pattern `G`,
//!
//! ```text
//! Sub(G, H) = (1 / |Aut(G)|) * sum over partitions ρ of V(G) into independent sets
//!             of μ(ρ) * Hom(G/ρ, H),        μ(ρ) = Π_blocks (-1)^(|B|-1) (|B|-1)!
//! ```
//!
//! which is Möbius inversion on the partition lattice (injective homomorphisms
//! are homomorphisms with no two vertices identified). Partitions that merge
//! adjacent vertices are skipped: their quotients carry loops and have no
//! homomorphisms into simple hosts. Since the sign of `μ(ρ)` depends only on
//! the number of blocks, weights of isomorphic quotients never cancel and every
//! member of the spasm keeps a nonzero coefficient.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use hashbrown::HashMap;
use num_bigint::BigInt;
use num_rational::BigRational;

use crate::canon::{automorphism_count, canonical_form, CanonicalForm};
use crate::decomp::{exact_mtd, exact_mtw, MatchedEliminationTree, MatchedTreeDecomposition};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Largest pattern whose spasm is computed.
pub const SPASM_LIMIT: usize = 11;

#[derive(Clone, Debug, PartialEq)]
pub struct SpasmTerm {
    /// Canonical representative of the quotient.
    pub quotient: Graph,
    pub coefficient: BigRational,
    pub mtd: Option<MatchedEliminationTree>,
    pub mtw: Option<MatchedTreeDecomposition>,
}

impl SpasmTerm {
    pub fn canonical(&self) -> CanonicalForm {
        canonical_form(&self.quotient).expect("quotients are small")
    }
}

struct Partitions<'a> {
    adj: &'a [u32],
    edges: &'a [(usize, usize)],
    block_of: Vec<usize>,
    blocks: Vec<u32>,
    /// Labeled quotient (block count, pair mask) -> summed Möbius weight.
    table: HashMap<(u8, u64), i128>,
}

fn pair_index(a: usize, b: usize) -> usize {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    b * (b - 1) / 2 + a
}

impl Partitions<'_> {
    fn run(&mut self, v: usize, weight: i128) {
        if v == self.adj.len() {
            let mut mask = 0u64;
            for &(a, b) in self.edges {
                mask |= 1 << pair_index(self.block_of[a], self.block_of[b]);
            }
            *self
                .table
                .entry((self.blocks.len() as u8, mask))
                .or_insert(0) += weight;
            return;
        }
        for b in 0..self.blocks.len() {
            if self.blocks[b] & self.adj[v] == 0 {
                let size = self.blocks[b].count_ones() as i128;
                self.blocks[b] |= 1 << v;
                self.block_of[v] = b;
                self.run(v + 1, -weight * size);
                self.blocks[b] &= !(1 << v);
            }
        }
        self.blocks.push(1 << v);
        self.block_of[v] = self.blocks.len() - 1;
        self.run(v + 1, weight);
        self.blocks.pop();
    }
}

fn quotient_graph(k: usize, mask: u64) -> Graph {
    let mut e = Vec::new();
    for b in 1..k {
        for a in 0..b {
            if mask >> pair_index(a, b) & 1 == 1 {
                e.push((a, b));
            }
        }
    }
    Graph::from_edges(k, &e).expect("quotient of a simple graph by independent sets is simple")
}

/// Canonical quotient -> summed Möbius weight.
fn weighted_spasm(g: &Graph) -> Result<BTreeMap<CanonicalForm, i128>> {
    g.check_size(SPASM_LIMIT)?;
    if g.vertex_count() < 2 {
        return Err(Error::NoEdges);
    }
    g.check_connected()?;
    let adj = g.masks();
    let edges = g.edge_vec();
    let mut p = Partitions {
        adj: &adj,
        edges: &edges,
        block_of: vec![0; adj.len()],
        blocks: Vec::new(),
        table: HashMap::new(),
    };
    p.run(0, 1);
    let mut grouped = BTreeMap::new();
    for ((k, mask), w) in p.table {
        let c = canonical_form(&quotient_graph(k as usize, mask))?;
        *grouped.entry(c).or_insert(0) += w;
    }
    Ok(grouped)
}

/// Canonical forms of every member of `Spasm(g)`.
pub fn spasm(g: &Graph) -> Result<Vec<CanonicalForm>> {
    Ok(weighted_spasm(g)?.into_keys().collect())
}

/// `Spasm(g)` with the coefficients realizing `Sub(g, H) = Σ α Hom(G', H)`,
/// largest quotients first (the pattern itself leads with `1/|Aut(g)|`).
pub fn spasm_with_coefficients(g: &Graph) -> Result<Vec<SpasmTerm>> {
    let aut = BigInt::from(automorphism_count(g)?);
    let mut terms: Vec<(CanonicalForm, i128)> = weighted_spasm(g)?
        .into_iter()
        .filter(|&(_, w)| w != 0)
        .collect();
    terms.sort_by(|a, b| {
        b.0.vertex_count
            .cmp(&a.0.vertex_count)
            .then_with(|| a.0.cmp(&b.0))
    });
    Ok(terms
        .into_iter()
        .map(|(c, w)| SpasmTerm {
            quotient: c.to_graph(),
            coefficient: BigRational::new(BigInt::from(w), aut.clone()),
            mtd: None,
            mtw: None,
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessMode {
    Mtd,
    Mtw,
}

/// Edge list of a quotient, as used in diagnostics.
pub fn describe(g: &Graph) -> String {
    let mut s = format!("n={}", g.vertex_count());
    for (u, v) in g.edges() {
        s.push_str(&format!(" {u}-{v}"));
    }
    s
}

/// Equips every term with a minimum-depth or minimum-width witness within
/// `budget`. Fails with [`Error::NoWitness`] listing every quotient that has
/// none.
pub fn attach_decompositions(
    mut terms: Vec<SpasmTerm>,
    mode: WitnessMode,
    budget: usize,
) -> Result<Vec<SpasmTerm>> {
    let mut offenders = Vec::new();
    for t in terms.iter_mut() {
        let found = match mode {
            WitnessMode::Mtd => {
                if t.mtd.as_ref().is_some_and(|w| w.depth() <= budget) {
                    continue;
                }
                exact_mtd(&t.quotient, budget)?
                    .map(|(_, w)| t.mtd = Some(w))
                    .is_some()
            }
            WitnessMode::Mtw => {
                if t.mtw.as_ref().is_some_and(|w| w.width() <= budget) {
                    continue;
                }
                exact_mtw(&t.quotient, budget)?
                    .map(|(_, w)| t.mtw = Some(w))
                    .is_some()
            }
        };
        if !found {
            offenders.push(describe(&t.quotient));
        }
    }
    if offenders.is_empty() {
        Ok(terms)
    } else {
        let what = match mode {
            WitnessMode::Mtd => "depth",
            WitnessMode::Mtw => "width",
        };
        Err(Error::NoWitness(format!(
            "{what} {budget}: {}",
            offenders.join("; ")
        )))
    }
}
