use crate::filtration::ScalarGrid;

/// Cell of a [`CubicalComplex`], addressed by dimension and a per-dimension
/// row-major index.
///
/// Edges are numbered horizontal first (`row * (W - 1) + col`, joining
/// `(row, col)` and `(row, col + 1)`), then vertical (`H * (W - 1) + row * W + col`,
/// joining `(row, col)` and `(row + 1, col)`). Squares use `row * (W - 1) + col`
/// for their top-left corner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub dim: u8,
    pub index: usize,
}

/// V-construction cubical complex of a grid: pixels are vertices, 4-neighbours
/// are joined by edges, and every 2x2 block spans a square. Each cell carries
/// the minimum value of its vertices, so the super-level set at `tau` is the
/// subcomplex of cells with value `>= tau`.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicalComplex {
    height: usize,
    width: usize,
    vertices: Vec<f64>,
    edges: Vec<f64>,
    squares: Vec<f64>,
}

pub fn build_complex(g: &ScalarGrid) -> CubicalComplex {
    let (h, w) = (g.height(), g.width());
    let mut edges = Vec::with_capacity(h * w.saturating_sub(1) + h.saturating_sub(1) * w);
    for y in 0..h {
        for x in 0..w - 1 {
            edges.push(g.get(y, x).min(g.get(y, x + 1)));
        }
    }
    for y in 0..h - 1 {
        for x in 0..w {
            edges.push(g.get(y, x).min(g.get(y + 1, x)));
        }
    }
    let mut squares = Vec::with_capacity(h.saturating_sub(1) * w.saturating_sub(1));
    for y in 0..h - 1 {
        for x in 0..w - 1 {
            let top = g.get(y, x).min(g.get(y, x + 1));
            let bottom = g.get(y + 1, x).min(g.get(y + 1, x + 1));
            squares.push(top.min(bottom));
        }
    }
    CubicalComplex {
        height: h,
        width: w,
        vertices: g.values().to_vec(),
        edges,
        squares,
    }
}

impl CubicalComplex {
    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn vertex_values(&self) -> &[f64] {
        &self.vertices
    }

    pub fn edge_values(&self) -> &[f64] {
        &self.edges
    }

    pub fn square_values(&self) -> &[f64] {
        &self.squares
    }

    pub fn num_cells(&self) -> usize {
        self.vertices.len() + self.edges.len() + self.squares.len()
    }

    pub(crate) fn horizontal_edges(&self) -> usize {
        self.height * (self.width - 1)
    }

    pub fn value(&self, cell: Cell) -> f64 {
        match cell.dim {
            0 => self.vertices[cell.index],
            1 => self.edges[cell.index],
            2 => self.squares[cell.index],
            d => panic!("no cells of dimension {d} in a 2-D complex"),
        }
    }

    /// The two endpoints of edge `e` as vertex indices.
    pub fn edge_vertices(&self, e: usize) -> (usize, usize) {
        let w = self.width;
        let nh = self.horizontal_edges();
        if e < nh {
            let (y, x) = (e / (w - 1), e % (w - 1));
            (y * w + x, y * w + x + 1)
        } else {
            let v = e - nh;
            (v, v + w)
        }
    }

    /// The four edges bounding square `s`: top, bottom, left, right.
    pub fn square_edges(&self, s: usize) -> [usize; 4] {
        let w = self.width;
        let nh = self.horizontal_edges();
        let (y, x) = (s / (w - 1), s % (w - 1));
        [
            y * (w - 1) + x,
            (y + 1) * (w - 1) + x,
            nh + y * w + x,
            nh + y * w + x + 1,
        ]
    }

    /// Squares on either side of edge `e`; `None` marks the outside of the grid.
    pub(crate) fn edge_cofaces(&self, e: usize) -> (Option<usize>, Option<usize>) {
        let (h, w) = (self.height, self.width);
        let nh = self.horizontal_edges();
        if e < nh {
            let (y, x) = (e / (w - 1), e % (w - 1));
            let above = (y >= 1).then(|| (y - 1) * (w - 1) + x);
            let below = (y + 1 < h).then(|| y * (w - 1) + x);
            (above, below)
        } else {
            let v = e - nh;
            let (y, x) = (v / w, v % w);
            let left = (x >= 1).then(|| y * (w - 1) + x - 1);
            let right = (x + 1 < w).then(|| y * (w - 1) + x);
            (left, right)
        }
    }

    /// Cell counts `(V, E, F)` of the super-level subcomplex at `tau`.
    pub fn counts_at(&self, tau: f64) -> (usize, usize, usize) {
        let count = |vals: &[f64]| vals.iter().filter(|&&v| v >= tau).count();
        (
            count(&self.vertices),
            count(&self.edges),
            count(&self.squares),
        )
    }

    pub fn global_max(&self) -> f64 {
        self.vertices.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn global_min(&self) -> f64 {
        self.vertices.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(h: usize, w: usize, v: &[f64]) -> ScalarGrid {
        ScalarGrid::new(h, w, v.to_vec()).unwrap()
    }

    #[test]
    fn single_edge() {
        let c = build_complex(&grid(1, 2, &[0.3, 0.8]));
        assert_eq!(c.vertex_values().len(), 2);
        assert_eq!(c.edge_values(), &[0.3]);
        assert!(c.square_values().is_empty());
    }

    #[test]
    fn two_by_two_minima() {
        let c = build_complex(&grid(2, 2, &[1.0, 0.5, 0.25, 0.0]));
        assert_eq!(c.square_values(), &[0.0]);
        let mut edges = c.edge_values().to_vec();
        edges.sort_by(f64::total_cmp);
        assert_eq!(edges, vec![0.0, 0.0, 0.25, 0.5]);
    }

    #[test]
    fn cell_counts_match_formula() {
        for (h, w) in [(1, 1), (3, 3), (4, 7), (6, 2)] {
            let c = build_complex(&grid(h, w, &vec![0.0; h * w]));
            assert_eq!(c.vertex_values().len(), h * w);
            assert_eq!(c.edge_values().len(), h * (w - 1) + (h - 1) * w);
            assert_eq!(c.square_values().len(), (h - 1) * (w - 1));
        }
        let c = build_complex(&grid(3, 3, &[0.0; 9]));
        assert_eq!(c.num_cells(), 9 + 12 + 4);
    }

    #[test]
    fn incidence_is_consistent() {
        let c = build_complex(&grid(3, 4, &[0.0; 12]));
        for s in 0..6 {
            for e in c.square_edges(s) {
                let (a, b) = c.edge_cofaces(e);
                assert!(a == Some(s) || b == Some(s));
            }
        }
        // each interior edge has two cofaces, each border edge one
        let inner = (0..c.edge_values().len())
            .filter(|&e| matches!(c.edge_cofaces(e), (Some(_), Some(_))))
            .count();
        let border = (0..c.edge_values().len())
            .filter(|&e| matches!(c.edge_cofaces(e), (None, Some(_)) | (Some(_), None)))
            .count();
        assert_eq!((inner, border), (7, 10));
    }
}
