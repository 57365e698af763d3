//! Elimination trees and tree decompositions, plain and matched.

mod elimtree;
mod minors;
mod treedecomp;

pub use elimtree::{
    exact_mtd, exact_td, lift_td_to_mtd, mtd_witness_within, unanchored_per_path, verify_elim_tree,
    verify_matched_elim_tree, EliminationTree, MatchedEliminationTree, PathState,
};
pub use minors::{forbidden_mtd3_free, has_induced_subgraph, is_induced_minor};
pub use treedecomp::{
    bag_matching, exact_mtw, exact_mtw_covering, exact_tw, lift_tw_to_mtw,
    td_from_elimination_order, verify_matched_td, verify_td, MatchedTreeDecomposition,
    TreeDecomposition, MTW_WORK_LIMIT,
};

/// Largest pattern handled by the exact searches.
pub const EXACT_LIMIT: usize = 12;
