//! Super-level-set persistent homology of 2-D scalar grids.
//!
//! The fast path ([`compute_diagram`]) runs two union-find sweeps: one over
//! pixels for dimension 0 and one over the dual grid of squares for
//! dimension 1. [`oracle_diagram`] computes the same diagram by boundary
//! matrix reduction and is kept as an independent reference.
//!
//! Conventions:
//!
//! * births are at least deaths, since the sweep runs from high to low values;
//! * the one surviving component is reported as an essential pair whose death
//!   is the global minimum of the grid;
//! * finite pairs with zero persistence are not reported.

mod complex;
mod oracle;
mod union_find;
mod wasserstein;

use std::cmp::Ordering;
use std::fmt::Write as _;

pub use complex::{build_complex, Cell, CubicalComplex};
pub use oracle::{filtration_order, oracle_diagram, ORACLE_CELL_LIMIT};
pub use union_find::{persistence_h0, persistence_h1};
pub use wasserstein::{wasserstein1, wasserstein1_total, MATCHING_POINT_LIMIT};

use crate::filtration::ScalarGrid;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PersistencePair {
    pub dim: u8,
    pub birth: f64,
    pub death: f64,
    pub essential: bool,
}

impl PersistencePair {
    pub fn finite(dim: u8, birth: f64, death: f64) -> Self {
        Self {
            dim,
            birth,
            death,
            essential: false,
        }
    }

    pub fn essential(dim: u8, birth: f64, death: f64) -> Self {
        Self {
            dim,
            birth,
            death,
            essential: true,
        }
    }

    pub fn persistence(&self) -> f64 {
        self.birth - self.death
    }

    /// Dump order: dimension ascending, then birth and death descending.
    fn dump_cmp(&self, other: &Self) -> Ordering {
        self.dim
            .cmp(&other.dim)
            .then(other.birth.total_cmp(&self.birth))
            .then(other.death.total_cmp(&self.death))
            .then(self.essential.cmp(&other.essential))
    }
}

/// A multiset of persistence pairs across dimensions.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PersistenceDiagram {
    pairs: Vec<PersistencePair>,
}

impl PersistenceDiagram {
    pub fn new(pairs: Vec<PersistencePair>) -> Self {
        Self { pairs }
    }

    pub fn pairs(&self) -> &[PersistencePair] {
        &self.pairs
    }

    pub fn push(&mut self, pair: PersistencePair) {
        self.pairs.push(pair);
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn dimension(&self, dim: u8) -> impl Iterator<Item = &PersistencePair> + '_ {
        self.pairs.iter().filter(move |p| p.dim == dim)
    }

    /// Union of two diagrams as multisets.
    pub fn union(&self, other: &Self) -> Self {
        let mut pairs = self.pairs.clone();
        pairs.extend_from_slice(&other.pairs);
        Self { pairs }
    }

    pub fn sorted(&self) -> Self {
        let mut pairs = self.pairs.clone();
        pairs.sort_by(PersistencePair::dump_cmp);
        Self { pairs }
    }

    /// Equality as multisets, comparing coordinates exactly.
    pub fn multiset_eq(&self, other: &Self) -> bool {
        self.sorted().pairs == other.sorted().pairs
    }

    /// Text dump, one `dim birth death essential_flag` line per pair.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for p in self.sorted().pairs {
            let _ = writeln!(out, "{} {} {} {}", p.dim, p.birth, p.death, u8::from(p.essential));
        }
        out
    }
}

impl FromIterator<PersistencePair> for PersistenceDiagram {
    fn from_iter<I: IntoIterator<Item = PersistencePair>>(iter: I) -> Self {
        Self {
            pairs: iter.into_iter().collect(),
        }
    }
}

/// Persistence diagram of `g` in dimensions 0 and 1.
pub fn compute_diagram(g: &ScalarGrid) -> PersistenceDiagram {
    let c = build_complex(g);
    let mut pairs = persistence_h0(&c);
    pairs.extend(persistence_h1(&c));
    PersistenceDiagram { pairs }
}

/// Betti numbers `(b0, b1)` of the super-level set at `tau`, read off the
/// diagram: a finite pair is alive when `birth >= tau > death`, an essential
/// pair whenever `birth >= tau`.
pub fn betti_at(d: &PersistenceDiagram, tau: f64) -> (usize, usize) {
    let mut betti = [0usize; 2];
    for p in &d.pairs {
        let alive = if p.essential {
            p.birth >= tau
        } else {
            p.birth >= tau && tau > p.death
        };
        if alive && (p.dim as usize) < 2 {
            betti[p.dim as usize] += 1;
        }
    }
    (betti[0], betti[1])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(h: usize, w: usize, v: &[f64]) -> ScalarGrid {
        ScalarGrid::new(h, w, v.to_vec()).unwrap()
    }

    fn both(g: &ScalarGrid) -> (PersistenceDiagram, PersistenceDiagram) {
        let fast = compute_diagram(g);
        let slow = oracle_diagram(&build_complex(g)).unwrap();
        (fast, slow)
    }

    const RING: [f64; 9] = [1., 1., 1., 1., 0., 1., 1., 1., 1.];

    #[rustfmt::skip]
    const TWO_RINGS: [f64; 25] = [
        1., 1., 1., 0., 0.,
        1., 0., 1., 0., 0.,
        1., 1., 1., 1., 1.,
        0., 0., 1., 0., 1.,
        0., 0., 1., 1., 1.,
    ];

    #[test]
    fn constant_patch() {
        let (fast, slow) = both(&grid(28, 28, &[0.6; 784]));
        assert_eq!(fast.pairs(), &[PersistencePair::essential(0, 0.6, 0.6)]);
        assert!(fast.multiset_eq(&slow));
    }

    #[test]
    fn valley_matches_oracle() {
        let (fast, slow) = both(&grid(1, 3, &[1.0, 0.0, 1.0]));
        let expected = PersistenceDiagram::new(vec![
            PersistencePair::finite(0, 1.0, 0.0),
            PersistencePair::essential(0, 1.0, 0.0),
        ]);
        assert!(fast.multiset_eq(&expected));
        assert!(slow.multiset_eq(&expected));
    }

    #[test]
    fn staircase_matches_oracle() {
        let (fast, slow) = both(&grid(2, 2, &[1.0, 0.5, 0.25, 0.0]));
        let expected = PersistenceDiagram::new(vec![PersistencePair::essential(0, 1.0, 0.0)]);
        assert!(fast.multiset_eq(&expected));
        assert!(slow.multiset_eq(&expected));
    }

    #[test]
    fn ring_matches_oracle() {
        let (fast, slow) = both(&grid(3, 3, &RING));
        let expected = PersistenceDiagram::new(vec![
            PersistencePair::essential(0, 1.0, 0.0),
            PersistencePair::finite(1, 1.0, 0.0),
        ]);
        assert!(fast.multiset_eq(&expected), "{}", fast.dump());
        assert!(slow.multiset_eq(&expected), "{}", slow.dump());
    }

    #[test]
    fn two_rings_match_oracle() {
        let (fast, slow) = both(&grid(5, 5, &TWO_RINGS));
        let loops: Vec<_> = fast.dimension(1).collect();
        assert_eq!(loops.len(), 2);
        assert!(loops.iter().all(|p| (p.birth, p.death) == (1.0, 0.0)));
        assert!(fast.multiset_eq(&slow));
    }

    #[test]
    fn betti_examples() {
        let ring = compute_diagram(&grid(3, 3, &RING));
        assert_eq!(betti_at(&ring, 1.0), (1, 1));
        assert_eq!(betti_at(&ring, 0.5), (1, 1));
        assert_eq!(betti_at(&ring, 0.0), (1, 0));
        let empty = PersistenceDiagram::default();
        assert_eq!(betti_at(&empty, 0.3), (0, 0));
    }

    #[test]
    fn dump_format_is_sorted() {
        let d = PersistenceDiagram::new(vec![
            PersistencePair::finite(1, 0.5, 0.25),
            PersistencePair::finite(0, 0.5, 0.0),
            PersistencePair::essential(0, 1.0, 0.0),
            PersistencePair::finite(0, 0.5, 0.25),
        ]);
        assert_eq!(d.dump(), "0 1 0 1\n0 0.5 0.25 0\n0 0.5 0 0\n1 0.5 0.25 0\n");
    }
}
