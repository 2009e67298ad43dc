//! Sweep-based persistence: union-find with the elder rule.

use super::complex::CubicalComplex;
use super::PersistencePair;

/// Disjoint sets where every root remembers the peak value (and the index of
/// the element that carried it) of its component. When two components meet,
/// the one with the higher peak survives; equal peaks go to the smaller index.
#[derive(Debug, Clone)]
pub(crate) struct ElderForest {
    parent: Vec<usize>,
    rank: Vec<u8>,
    peak: Vec<f64>,
    origin: Vec<usize>,
}

impl ElderForest {
    pub(crate) fn new(peaks: Vec<f64>) -> Self {
        let n = peaks.len();
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
            peak: peaks,
            origin: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut node: usize) -> usize {
        let mut root = node;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[node] != root {
            let next = self.parent[node];
            self.parent[node] = root;
            node = next;
        }
        root
    }

    /// Joins the components of `a` and `b`, returning the peak of the one
    /// that dies, or `None` if they were already joined.
    pub(crate) fn merge(&mut self, a: usize, b: usize) -> Option<f64> {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return None;
        }
        let a_is_elder = match self.peak[ra].total_cmp(&self.peak[rb]) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Less => false,
            std::cmp::Ordering::Equal => self.origin[ra] < self.origin[rb],
        };
        let (elder, younger) = if a_is_elder { (ra, rb) } else { (rb, ra) };
        let dying = self.peak[younger];
        let (survivor_peak, survivor_origin) = (self.peak[elder], self.origin[elder]);

        let (hi, lo) = if self.rank[ra] >= self.rank[rb] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[lo] = hi;
        if self.rank[hi] == self.rank[lo] {
            self.rank[hi] = self.rank[hi].saturating_add(1);
        }
        self.peak[hi] = survivor_peak;
        self.origin[hi] = survivor_origin;
        Some(dying)
    }
}

/// Dimension-0 pairs of the super-level filtration, including the essential
/// class `(global max, global min)`. Pairs with zero persistence are omitted.
pub fn persistence_h0(c: &CubicalComplex) -> Vec<PersistencePair> {
    let values = c.vertex_values();
    let (h, w) = (c.height(), c.width());
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));

    let mut present = vec![false; values.len()];
    let mut forest = ElderForest::new(values.to_vec());
    let mut pairs = Vec::new();
    for &v in &order {
        present[v] = true;
        let (y, x) = (v / w, v % w);
        let neighbours = [
            (y > 0).then(|| v - w),
            (y + 1 < h).then(|| v + w),
            (x > 0).then(|| v - 1),
            (x + 1 < w).then(|| v + 1),
        ];
        for u in neighbours.into_iter().flatten() {
            if !present[u] {
                continue;
            }
            let edge = values[u].min(values[v]);
            if let Some(birth) = forest.merge(u, v) {
                if birth > edge {
                    pairs.push(PersistencePair::finite(0, birth, edge));
                }
            }
        }
    }
    pairs.push(PersistencePair::essential(
        0,
        values[order[0]],
        values[*order.last().expect("grids are non-empty")],
    ));
    pairs
}

/// Dimension-1 pairs of the super-level filtration.
///
/// A loop of the super-level set at `tau` is a bounded component of its
/// complement. The complement is swept as a sub-level filtration on the dual
/// graph: squares are nodes born at their value, one extra node stands for
/// the outside of the grid and never dies, and two nodes are joined once the
/// edge they share has left the super-level set. A dual merge at edge value
/// `e` that kills a component whose lowest square is `s` is the loop born at
/// `e` and filled at `s`.
pub fn persistence_h1(c: &CubicalComplex) -> Vec<PersistencePair> {
    let squares = c.square_values();
    if squares.is_empty() {
        return Vec::new();
    }
    let outside = squares.len();
    // negated so that the lowest square is the eldest
    let mut peaks: Vec<f64> = squares.iter().map(|&s| -s).collect();
    peaks.push(f64::INFINITY);
    let mut forest = ElderForest::new(peaks);

    let edges = c.edge_values();
    let mut dual: Vec<(usize, usize, usize)> = (0..edges.len())
        .filter_map(|e| match c.edge_cofaces(e) {
            (Some(a), Some(b)) => Some((e, a, b)),
            (Some(a), None) | (None, Some(a)) => Some((e, a, outside)),
            (None, None) => None,
        })
        .collect();
    dual.sort_by(|a, b| edges[a.0].total_cmp(&edges[b.0]).then(a.0.cmp(&b.0)));

    let mut pairs = Vec::new();
    for (e, a, b) in dual {
        if let Some(peak) = forest.merge(a, b) {
            let (birth, death) = (edges[e], -peak);
            if birth > death {
                pairs.push(PersistencePair::finite(1, birth, death));
            }
        }
    }
    pairs
}
