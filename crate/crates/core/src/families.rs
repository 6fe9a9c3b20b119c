//! Hereditary graph families and brute-force membership checks.
//!
//! Checks run on the 1-skeleton through neighbour bitmasks. The exponential
//! ones (longest path, circumference) are only attempted for
//! `n <= BRUTE_FORCE_MAX`; larger graphs rely on the caller's assertion.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};

pub const BRUTE_FORCE_MAX: usize = 12;

/// A graph family with its parameter, as asserted by the caller.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    Forest,
    /// Maximum degree at most `Δ`; `None` means "use the graph's own maximum degree".
    MaxDegree(Option<usize>),
    Planar,
    SquareFree,
    Girth5,
    /// No path with `t` edges.
    NoPath(usize),
    /// No cycle longer than `t`.
    NoLongCycle(usize),
    TriangleFree,
}

/// The parameter-free tag of a family, used in bound ids.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilyKind {
    Forest,
    MaxDegree,
    Planar,
    SquareFree,
    Girth5,
    NoPath,
    NoLongCycle,
    TriangleFree,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 8] = [
        FamilyKind::Forest,
        FamilyKind::MaxDegree,
        FamilyKind::Planar,
        FamilyKind::SquareFree,
        FamilyKind::Girth5,
        FamilyKind::NoPath,
        FamilyKind::NoLongCycle,
        FamilyKind::TriangleFree,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Forest => "forest",
            FamilyKind::MaxDegree => "max_degree",
            FamilyKind::Planar => "planar",
            FamilyKind::SquareFree => "square_free",
            FamilyKind::Girth5 => "girth5",
            FamilyKind::NoPath => "no_path",
            FamilyKind::NoLongCycle => "no_long_cycle",
            FamilyKind::TriangleFree => "triangle_free",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

impl Family {
    pub fn kind(self) -> FamilyKind {
        match self {
            Family::Forest => FamilyKind::Forest,
            Family::MaxDegree(_) => FamilyKind::MaxDegree,
            Family::Planar => FamilyKind::Planar,
            Family::SquareFree => FamilyKind::SquareFree,
            Family::Girth5 => FamilyKind::Girth5,
            Family::NoPath(_) => FamilyKind::NoPath,
            Family::NoLongCycle(_) => FamilyKind::NoLongCycle,
            Family::TriangleFree => FamilyKind::TriangleFree,
        }
    }

    /// Membership of `g`'s 1-skeleton; `None` when it cannot be decided by
    /// brute force (planarity always, exponential checks above the size cap).
    pub fn check(self, g: &SimplicialComplex) -> Option<bool> {
        let n = g.n_vertices();
        let cheap = matches!(self, Family::Forest | Family::MaxDegree(_));
        if !cheap && n > BRUTE_FORCE_MAX {
            return None;
        }
        let adj = g.adjacency_masks()?;
        Some(match self {
            Family::Forest => g.edge_count() + g.components().len() == n,
            Family::MaxDegree(None) => true,
            Family::MaxDegree(Some(delta)) => adj.iter().all(|m| m.count_ones() as usize <= delta),
            Family::Planar => return None,
            Family::SquareFree => !has_four_cycle(&adj),
            Family::Girth5 => !has_triangle(&adj) && !has_four_cycle(&adj),
            Family::NoPath(t) => longest_path_edges(&adj) < t,
            Family::NoLongCycle(t) => circumference(&adj) <= t,
            Family::TriangleFree => !has_triangle(&adj),
        })
    }

    /// Every family that `g` provably belongs to (with the tightest parameters).
    pub fn detect(g: &SimplicialComplex) -> Vec<Family> {
        let n = g.n_vertices();
        let Some(adj) = g.adjacency_masks() else {
            return Vec::new();
        };
        let mut out = Vec::new();
        if g.edge_count() + g.components().len() == n {
            out.push(Family::Forest);
        }
        out.push(Family::MaxDegree(None));
        if n > BRUTE_FORCE_MAX {
            return out;
        }
        let tri = has_triangle(&adj);
        let c4 = has_four_cycle(&adj);
        if !c4 {
            out.push(Family::SquareFree);
        }
        if !tri && !c4 {
            out.push(Family::Girth5);
        }
        if !tri {
            out.push(Family::TriangleFree);
        }
        out.push(Family::NoPath(longest_path_edges(&adj) + 1));
        out.push(Family::NoLongCycle(circumference(&adj).max(2)));
        out
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::MaxDegree(Some(d)) => write!(f, "max_degree={d}"),
            Family::NoPath(t) => write!(f, "no_path={t}"),
            Family::NoLongCycle(t) => write!(f, "no_long_cycle={t}"),
            other => f.write_str(other.kind().name()),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, value) = match s.split_once('=') {
            Some((n, v)) => (n.trim(), Some(v.trim())),
            None => (s.trim(), None),
        };
        let bad = || Error::malformed(format!("bad family `{s}`"));
        let num =
            |v: Option<&str>| -> Result<usize> { v.ok_or_else(bad)?.parse().map_err(|_| bad()) };
        let kind = FamilyKind::from_name(name).ok_or_else(bad)?;
        Ok(match kind {
            FamilyKind::Forest => Family::Forest,
            FamilyKind::MaxDegree => Family::MaxDegree(value.map(|_| num(value)).transpose()?),
            FamilyKind::Planar => Family::Planar,
            FamilyKind::SquareFree => Family::SquareFree,
            FamilyKind::Girth5 => Family::Girth5,
            FamilyKind::NoPath => Family::NoPath(num(value)?),
            FamilyKind::NoLongCycle => Family::NoLongCycle(num(value)?),
            FamilyKind::TriangleFree => Family::TriangleFree,
        })
    }
}

pub fn has_triangle(adj: &[u64]) -> bool {
    (0..adj.len()).any(|u| {
        let mut m = adj[u] & !((2u64 << u) - 1);
        while m != 0 {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            if adj[u] & adj[v] & !((2u64 << v) - 1) != 0 {
                return true;
            }
        }
        false
    })
}

/// A 4-cycle subgraph exists iff two vertices share two neighbours.
pub fn has_four_cycle(adj: &[u64]) -> bool {
    (0..adj.len()).any(|u| (u + 1..adj.len()).any(|v| (adj[u] & adj[v]).count_ones() >= 2))
}

/// Edges on a longest simple path, by dynamic programming over vertex subsets.
pub fn longest_path_edges(adj: &[u64]) -> usize {
    let n = adj.len();
    if n == 0 {
        return 0;
    }
    // ends[mask]: vertices v such that some path visiting exactly `mask` ends at v.
    let mut ends = vec![0u64; 1 << n];
    let mut best = 0;
    for v in 0..n {
        ends[1 << v] = 1 << v;
    }
    for mask in 1usize..(1 << n) {
        let e = ends[mask];
        if e == 0 {
            continue;
        }
        best = best.max(mask.count_ones() as usize - 1);
        let mut it = e;
        while it != 0 {
            let v = it.trailing_zeros() as usize;
            it &= it - 1;
            let mut next = adj[v] & !(mask as u64);
            while next != 0 {
                let w = next.trailing_zeros() as usize;
                next &= next - 1;
                ends[mask | (1 << w)] |= 1 << w;
            }
        }
    }
    best
}

/// Length of a longest cycle, or 0 for a forest.
pub fn circumference(adj: &[u64]) -> usize {
    let n = adj.len();
    let mut best = 0;
    for s in 0..n {
        // Paths starting at s through vertices > s only; s is the cycle's minimum.
        let allowed: u64 = !((2u64 << s) - 1) & if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let bits: Vec<usize> = (0..n).filter(|v| allowed >> v & 1 == 1).collect();
        let m = bits.len();
        let mut ends = vec![0u64; 1 << m];
        for (i, v) in bits.iter().enumerate() {
            if adj[s] >> v & 1 == 1 {
                ends[1 << i] |= 1 << v;
            }
        }
        for sub in 1usize..(1 << m) {
            let e = ends[sub];
            if e == 0 {
                continue;
            }
            let len = sub.count_ones() as usize + 1;
            if len >= 3 && e & adj[s] != 0 {
                best = best.max(len);
            }
            let mut it = e;
            while it != 0 {
                let v = it.trailing_zeros() as usize;
                it &= it - 1;
                for (i, w) in bits.iter().enumerate() {
                    if sub >> i & 1 == 0 && adj[v] >> w & 1 == 1 {
                        ends[sub | (1 << i)] |= 1 << w;
                    }
                }
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: u32, edges: &[(u32, u32)]) -> SimplicialComplex {
        SimplicialComplex::graph(&(0..n).collect::<Vec<_>>(), edges).unwrap()
    }

    fn cycle(n: u32) -> SimplicialComplex {
        g(
            n,
            &(0..n)
                .map(|i| (i.min((i + 1) % n), i.max((i + 1) % n)))
                .collect::<Vec<_>>(),
        )
    }

    #[test]
    fn parse_roundtrip() {
        for s in [
            "forest",
            "max_degree=3",
            "max_degree",
            "planar",
            "square_free",
            "girth5",
            "no_path=4",
            "no_long_cycle=5",
            "triangle_free",
        ] {
            let f: Family = s.parse().unwrap();
            assert_eq!(f.to_string(), s);
        }
        assert!("no_path".parse::<Family>().is_err());
        assert!("bogus".parse::<Family>().is_err());
    }

    #[test]
    fn cycles() {
        let c5 = cycle(5);
        let adj = c5.adjacency_masks().unwrap();
        assert_eq!(circumference(&adj), 5);
        assert_eq!(longest_path_edges(&adj), 4);
        assert!(Family::Girth5.check(&c5).unwrap());
        assert!(!Family::Girth5.check(&cycle(4)).unwrap());
        assert!(Family::SquareFree.check(&cycle(3)).unwrap());
        assert!(!Family::TriangleFree.check(&cycle(3)).unwrap());
        assert!(!Family::Forest.check(&c5).unwrap());
        assert!(Family::NoLongCycle(5).check(&c5).unwrap());
        assert!(!Family::NoLongCycle(4).check(&c5).unwrap());
        assert!(Family::NoPath(5).check(&c5).unwrap());
        assert!(!Family::NoPath(4).check(&c5).unwrap());
    }

    #[test]
    fn forest_and_path() {
        let p4 = g(5, &[(0, 1), (1, 2), (2, 3)]);
        assert!(Family::Forest.check(&p4).unwrap());
        let adj = p4.adjacency_masks().unwrap();
        assert_eq!(longest_path_edges(&adj), 3);
        assert_eq!(circumference(&adj), 0);
        assert!(Family::MaxDegree(Some(2)).check(&p4).unwrap());
        assert!(!Family::MaxDegree(Some(1)).check(&p4).unwrap());
        assert_eq!(Family::Planar.check(&p4), None);
    }

    #[test]
    fn brute_force_cap() {
        let big = cycle(13);
        assert_eq!(Family::Girth5.check(&big), None);
        assert_eq!(Family::Forest.check(&big), Some(false));
    }

    #[test]
    fn k4_circumference() {
        let k4 = g(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        let adj = k4.adjacency_masks().unwrap();
        assert_eq!(circumference(&adj), 4);
        assert_eq!(longest_path_edges(&adj), 3);
        assert!(has_triangle(&adj) && has_four_cycle(&adj));
    }
}
