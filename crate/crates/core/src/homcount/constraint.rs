//! Symmetry-breaking predicates on homomorphisms.
//!
//! Host vertex ids double as a total order, so `Less(a, b)` asks for
//! `σ(a) < σ(b)` as integers.

use alloc::vec::Vec;
use core::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Constraint {
    /// `σ(a) < σ(b)`.
    Less(usize, usize),
    /// `σ(a) = min { σ(x) : x ∈ set }`; `a` is expected to belong to `set`.
    MinOf(usize, Vec<usize>),
}

impl Constraint {
    /// Pattern vertices the predicate reads.
    pub fn vertices(&self) -> Vec<usize> {
        let mut v = match self {
            Constraint::Less(a, b) => alloc::vec![*a, *b],
            Constraint::MinOf(a, set) => {
                let mut v = set.clone();
                v.push(*a);
                v
            }
        };
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn holds(&self, sigma: &[usize]) -> bool {
        match self {
            Constraint::Less(a, b) => sigma[*a] < sigma[*b],
            Constraint::MinOf(a, set) => set.iter().all(|&x| sigma[*a] <= sigma[x]),
        }
    }

    /// The same predicate after renaming pattern vertex `v` to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Constraint {
        match self {
            Constraint::Less(a, b) => Constraint::Less(perm[*a], perm[*b]),
            Constraint::MinOf(a, set) => {
                Constraint::MinOf(perm[*a], set.iter().map(|&x| perm[x]).collect())
            }
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::Less(a, b) => write!(f, "s({a}) < s({b})"),
            Constraint::MinOf(a, set) => {
                write!(f, "s({a}) = min(")?;
                for (i, x) in set.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "s({x})")?;
                }
                f.write_str(")")
            }
        }
    }
}

pub fn all_hold(cs: &[Constraint], sigma: &[usize]) -> bool {
    cs.iter().all(|c| c.holds(sigma))
}
