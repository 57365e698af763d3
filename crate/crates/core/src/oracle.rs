//! Brute-force reference counts. Deliberately naive: plain backtracking over
//! maps with adjacency checks and nothing else.

use alloc::vec;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::homcount::{all_hold, Constraint};

pub const ORACLE_PATTERN_LIMIT: usize = 8;
pub const ORACLE_HOST_LIMIT: usize = 14;

fn guard(g: &Graph, h: &Graph) -> Result<()> {
    if g.vertex_count() > ORACLE_PATTERN_LIMIT {
        return Err(Error::TooLarge {
            n: g.vertex_count(),
            limit: ORACLE_PATTERN_LIMIT,
        });
    }
    h.check_size(ORACLE_HOST_LIMIT)
}

/// Walks every map `V(g) → V(h)` consistent with `keep`, calling `leaf` on
/// complete maps. `keep(i, x, map)` decides whether `i ↦ x` may extend `map`.
fn walk(
    g: &Graph,
    h: &Graph,
    keep: &dyn Fn(usize, usize, &[usize]) -> bool,
    leaf: &mut dyn FnMut(&[usize]),
) {
    let mut map = vec![0usize; g.vertex_count()];
    fn go(
        g: &Graph,
        h: &Graph,
        i: usize,
        map: &mut [usize],
        keep: &dyn Fn(usize, usize, &[usize]) -> bool,
        leaf: &mut dyn FnMut(&[usize]),
    ) {
        if i == g.vertex_count() {
            leaf(map);
            return;
        }
        for x in 0..h.vertex_count() {
            if keep(i, x, &map[..i]) {
                map[i] = x;
                go(g, h, i + 1, map, keep, leaf);
            }
        }
    }
    go(g, h, 0, &mut map, keep, leaf);
}

fn edge_ok(g: &Graph, h: &Graph, i: usize, x: usize, map: &[usize]) -> bool {
    (0..i).all(|j| !g.has_edge(i, j) || h.has_edge(x, map[j]))
}

/// Number of homomorphisms `g → h` whose vertex map satisfies every
/// constraint in `filter`.
pub fn oracle_hom(g: &Graph, h: &Graph, filter: &[Constraint]) -> Result<u64> {
    guard(g, h)?;
    let mut count = 0u64;
    walk(g, h, &|i, x, m| edge_ok(g, h, i, x, m), &mut |m| {
        if all_hold(filter, m) {
            count += 1;
        }
    });
    Ok(count)
}

fn injective_homs(g: &Graph, h: &Graph) -> u64 {
    let mut count = 0u64;
    walk(
        g,
        h,
        &|i, x, m| !m.contains(&x) && edge_ok(g, h, i, x, m),
        &mut |_| count += 1,
    );
    count
}

/// Number of subgraphs of `h` isomorphic to `g`: injective homomorphisms
/// divided by those from `g` to itself.
pub fn oracle_sub(g: &Graph, h: &Graph) -> Result<u64> {
    guard(g, h)?;
    let auts = injective_homs(g, g);
    let emb = injective_homs(g, h);
    debug_assert_eq!(emb % auts, 0);
    Ok(emb / auts)
}

/// Injective homomorphisms `g → h` satisfying `filter`. Mapped into a host
/// with `|V(g)|` vertices these are exactly the multilinear monomials of the
/// constrained homomorphism polynomial.
pub fn oracle_injective_hom(g: &Graph, h: &Graph, filter: &[Constraint]) -> Result<u64> {
    guard(g, h)?;
    let mut count = 0u64;
    walk(
        g,
        h,
        &|i, x, m| !m.contains(&x) && edge_ok(g, h, i, x, m),
        &mut |m| {
            if all_hold(filter, m) {
                count += 1;
            }
        },
    );
    Ok(count)
}

/// Number of automorphisms, by enumeration.
pub fn oracle_automorphisms(g: &Graph) -> Result<u64> {
    guard(g, g)?;
    Ok(injective_homs(g, g))
}

/// Does `h` contain an induced subgraph isomorphic to `g`?
pub fn oracle_induced_exists(g: &Graph, h: &Graph) -> Result<bool> {
    guard(g, h)?;
    let mut found = false;
    walk(
        g,
        h,
        &|i, x, m| !m.contains(&x) && (0..i).all(|j| g.has_edge(i, j) == h.has_edge(x, m[j])),
        &mut |_| found = true,
    );
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::named::pattern_from_str as p;

    #[test]
    fn hom_values() {
        assert_eq!(
            oracle_hom(&p("clique:2").unwrap(), &p("clique:3").unwrap(), &[]).unwrap(),
            6
        );
        assert_eq!(
            oracle_hom(&p("cycle:4").unwrap(), &p("clique:3").unwrap(), &[]).unwrap(),
            18
        );
        assert_eq!(
            oracle_hom(&p("cycle:3").unwrap(), &p("clique:3").unwrap(), &[]).unwrap(),
            6
        );
    }

    #[test]
    fn sub_values() {
        assert_eq!(
            oracle_sub(&p("cycle:4").unwrap(), &p("clique:4").unwrap()).unwrap(),
            3
        );
        assert_eq!(
            oracle_sub(&p("path:3").unwrap(), &p("clique:3").unwrap()).unwrap(),
            3
        );
        assert_eq!(
            oracle_sub(&p("cycle:6").unwrap(), &p("cycle:6").unwrap()).unwrap(),
            1
        );
    }

    #[test]
    fn induced_values() {
        let c6 = p("cycle:6").unwrap();
        assert!(!oracle_induced_exists(&c6, &p("clique:6").unwrap()).unwrap());
        assert!(!oracle_induced_exists(&c6, &c6.with_edges(&[(0, 3)]).unwrap()).unwrap());
        assert!(!oracle_induced_exists(&c6, &p("cycle:7").unwrap()).unwrap());
        assert!(oracle_induced_exists(&c6, &c6.disjoint_union(&Graph::empty(1))).unwrap());
    }

    #[test]
    fn filtered_hom() {
        let k2 = p("clique:2").unwrap();
        let k3 = p("clique:3").unwrap();
        assert_eq!(oracle_hom(&k2, &k3, &[Constraint::Less(0, 1)]).unwrap(), 3);
    }

    #[test]
    fn guards() {
        assert!(oracle_hom(&p("path:9").unwrap(), &p("path:2").unwrap(), &[]).is_err());
        assert!(oracle_sub(&p("path:2").unwrap(), &p("path:15").unwrap()).is_err());
    }
}
