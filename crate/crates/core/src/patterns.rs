//! Subgraph and homomorphism counting pipelines.
//!
//! A [`CountPlan`] expands a connected pattern into its spasm and attaches a
//! witness to every quotient: matched elimination trees for the
//! constant-space mode, matched tree decompositions (compiled into circuit
//! plans) for the polynomial-space mode. Witnesses are searched within the
//! budgets that give `m^3` (depth 6) and `m^2` (width 3); a quotient beyond
//! the budget is lifted from an exact treedepth or treewidth decomposition
//! and the worse exponent shows up in the plan.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::decomp::{
    exact_mtd, exact_mtw, exact_td, exact_tw, lift_td_to_mtd, lift_tw_to_mtw, mtd_witness_within,
    td_from_elimination_order, unanchored_per_path, MatchedEliminationTree,
    MatchedTreeDecomposition,
};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::homcount::{count_hom_mtd, count_with_plan, estimated_work, CircuitPlan, HostProfile};
use crate::spasm::{describe, spasm_with_coefficients, SpasmTerm};

/// Depth budget of the constant-space mode.
pub const DEPTH_BUDGET: usize = 6;
/// Width budget of the polynomial-space mode.
pub const WIDTH_BUDGET: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    ConstantSpace,
    PolySpace,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    MtdAlg1,
    MtwCircuit,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::MtdAlg1 => "mtd-alg1",
            Strategy::MtwCircuit => "mtw-circuit",
        })
    }
}

#[derive(Clone, Debug)]
enum Exec {
    /// Candidate trees, the minimum-depth one first.
    Trees(Vec<MatchedEliminationTree>),
    Circuit(CircuitPlan),
}

#[derive(Clone, Debug)]
pub struct PlanTerm {
    /// The spasm term; its `mtd` or `mtw` field holds the primary witness.
    pub term: SpasmTerm,
    pub strategy: Strategy,
    /// Depth or width of the primary witness.
    pub parameter: usize,
    /// Whether the witness came from a lift instead of a budgeted search.
    pub lifted: bool,
    exec: Exec,
}

impl PlanTerm {
    pub fn exponent(&self) -> usize {
        match self.strategy {
            Strategy::MtdAlg1 => self.parameter.div_ceil(2),
            Strategy::MtwCircuit => (self.parameter + 1).div_ceil(2),
        }
    }

    /// `|Hom(quotient, h)|`. With several candidate trees the one with the
    /// smallest estimated work on `h` runs.
    pub fn hom_count(&self, h: &Graph) -> Result<BigUint> {
        match &self.exec {
            Exec::Trees(ts) => {
                let q = &self.term.quotient;
                let prof = HostProfile::of(h);
                let best = ts
                    .iter()
                    .min_by(|a, b| {
                        estimated_work(q, a.tree(), &prof).total_cmp(&estimated_work(
                            q,
                            b.tree(),
                            &prof,
                        ))
                    })
                    .expect("at least one tree");
                count_hom_mtd(q, best, h)
            }
            Exec::Circuit(p) => Ok(count_with_plan(p, h)),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CountPlan {
    pub pattern: Graph,
    pub mode: Mode,
    pub terms: Vec<PlanTerm>,
    /// Max over terms of `⌈depth/2⌉` or `⌈(width+1)/2⌉`.
    pub predicted_exponent: usize,
}

impl CountPlan {
    /// Human-readable summary, one line per term.
    pub fn summary(&self) -> String {
        let mut s = format!(
            "terms={} exponent={}\n",
            self.terms.len(),
            self.predicted_exponent
        );
        for t in &self.terms {
            let what = if t.strategy == Strategy::MtdAlg1 {
                "depth"
            } else {
                "width"
            };
            s.push_str(&format!(
                "{} coeff {} {} {}={}{}\n",
                describe(&t.term.quotient),
                t.term.coefficient,
                t.strategy,
                what,
                t.parameter,
                if t.lifted { " (lifted)" } else { "" }
            ));
        }
        s
    }
}

fn mtd_witness(q: &Graph, budget: usize) -> Result<(MatchedEliminationTree, bool)> {
    if let Some((_, t)) = exact_mtd(q, budget)? {
        return Ok((t, false));
    }
    let (_, td) = exact_td(q)?;
    let lifted = lift_td_to_mtd(q, &td)?;
    // The lift is only an upper bound; keep a shallower tree if one exists.
    let shallower = exact_mtd(q, lifted.depth().saturating_sub(1))?;
    Ok((shallower.map(|(_, t)| t).unwrap_or(lifted), true))
}

fn mtw_witness(q: &Graph, budget: usize) -> Result<(MatchedTreeDecomposition, bool)> {
    if let Some((_, d)) = exact_mtw(q, budget)? {
        return Ok((d, false));
    }
    let (_, order) = exact_tw(q)?;
    let lifted = lift_tw_to_mtw(q, &td_from_elimination_order(q, &order)?)?;
    let narrower = match lifted.width() {
        0 | 1 => None,
        w => exact_mtw(q, w - 1).ok().flatten(),
    };
    Ok((narrower.map(|(_, d)| d).unwrap_or(lifted), true))
}

/// Extra trees at depths just above the minimum that leave fewer vertices
/// unanchored per path; on sparse hosts they can beat the shallowest tree.
fn alternative_trees(q: &Graph, t: &MatchedEliminationTree) -> Result<Vec<MatchedEliminationTree>> {
    let mut out = Vec::new();
    let mut frees = unanchored_per_path(q, t.tree());
    for b in t.depth() + 1..=(t.depth() + 2).min(q.vertex_count()) {
        if frees <= 1 {
            break;
        }
        if let Some(alt) = mtd_witness_within(q, b)? {
            let f = unanchored_per_path(q, alt.tree());
            if f < frees {
                frees = f;
                out.push(alt);
            }
        }
    }
    Ok(out)
}

fn plan_term(mut term: SpasmTerm, mode: Mode, budget: usize) -> Result<PlanTerm> {
    let q = term.quotient.clone();
    match mode {
        Mode::ConstantSpace => {
            let (t, lifted) = match term.mtd.take() {
                Some(t) if t.depth() <= budget => (t, false),
                _ => mtd_witness(&q, budget)?,
            };
            let mut trees = vec![t.clone()];
            trees.extend(alternative_trees(&q, &t)?);
            let parameter = t.depth();
            term.mtd = Some(t);
            Ok(PlanTerm {
                term,
                strategy: Strategy::MtdAlg1,
                parameter,
                lifted,
                exec: Exec::Trees(trees),
            })
        }
        Mode::PolySpace => {
            let (d, lifted) = match term.mtw.take() {
                Some(d) if d.width() <= budget => (d, false),
                _ => mtw_witness(&q, budget)?,
            };
            let exec = Exec::Circuit(CircuitPlan::new(&q, &d, &[])?);
            let parameter = d.width();
            term.mtw = Some(d);
            Ok(PlanTerm {
                term,
                strategy: Strategy::MtwCircuit,
                parameter,
                lifted,
                exec,
            })
        }
    }
}

/// Plan over already computed spasm terms (for instance loaded from a cache).
/// Witnesses already on the terms are reused when within budget.
pub fn plan_from_terms(pattern: &Graph, terms: Vec<SpasmTerm>, mode: Mode) -> Result<CountPlan> {
    let budget = match mode {
        Mode::ConstantSpace => DEPTH_BUDGET,
        Mode::PolySpace => WIDTH_BUDGET,
    };
    let terms = terms
        .into_iter()
        .map(|t| plan_term(t, mode, budget))
        .collect::<Result<Vec<_>>>()?;
    let predicted_exponent = terms.iter().map(PlanTerm::exponent).max().unwrap_or(0);
    Ok(CountPlan {
        pattern: pattern.clone(),
        mode,
        terms,
        predicted_exponent,
    })
}

/// Spasm expansion of a connected pattern with a witness for every term.
pub fn plan(pattern: &Graph, mode: Mode) -> Result<CountPlan> {
    plan_from_terms(pattern, spasm_with_coefficients(pattern)?, mode)
}

/// Combines per-term homomorphism counts into the subgraph count.
pub fn combine(plan: &CountPlan, homs: &[BigUint]) -> Result<BigUint> {
    let mut total = BigRational::zero();
    for (t, h) in plan.terms.iter().zip(homs) {
        total += &t.term.coefficient * BigInt::from(h.clone());
    }
    if !total.denom().is_one() || total.is_negative() {
        return Err(Error::Consistency(format!(
            "subgraph count evaluated to {total}"
        )));
    }
    Ok(total
        .to_integer()
        .to_biguint()
        .expect("checked non-negative"))
}

/// `Sub(pattern, h)`: the coefficient-weighted sum of the terms' counts.
pub fn count_subgraphs(plan: &CountPlan, h: &Graph) -> Result<BigUint> {
    let homs = plan
        .terms
        .iter()
        .map(|t| t.hom_count(h))
        .collect::<Result<Vec<_>>>()?;
    combine(plan, &homs)
}

/// Single-term plan for the pattern itself, for direct homomorphism counts.
pub fn hom_plan(pattern: &Graph, mode: Mode) -> Result<PlanTerm> {
    let term = SpasmTerm {
        quotient: pattern.clone(),
        coefficient: BigRational::one(),
        mtd: None,
        mtw: None,
    };
    let budget = match mode {
        Mode::ConstantSpace => DEPTH_BUDGET,
        Mode::PolySpace => WIDTH_BUDGET,
    };
    plan_term(term, mode, budget)
}

/// `|Hom(pattern, h)|`. Components are counted separately and multiplied; an
/// isolated pattern vertex contributes a factor `|V(h)|`.
pub fn count_homs(pattern: &Graph, h: &Graph, mode: Mode) -> Result<BigUint> {
    let mut total = BigUint::one();
    for comp in pattern.components() {
        let c = if comp.len() == 1 {
            BigUint::from(h.vertex_count())
        } else {
            hom_plan(&pattern.induced_subgraph(&comp), mode)?.hom_count(h)?
        };
        if c.is_zero() {
            return Ok(c);
        }
        total *= c;
    }
    Ok(total)
}
