//! Reference persistence by standard column reduction of the boundary
//! matrix over Z/2. Used to check the sweep-based fast path.

use super::complex::{Cell, CubicalComplex};
use super::{PersistenceDiagram, PersistencePair};
use crate::error::{Error, Result};

pub const ORACLE_CELL_LIMIT: usize = 10_000;

/// Cells in filtration order: value descending, then dimension ascending,
/// then index ascending.
pub fn filtration_order(c: &CubicalComplex) -> Vec<Cell> {
    let mut cells: Vec<Cell> = (0..c.vertex_values().len())
        .map(|index| Cell { dim: 0, index })
        .chain((0..c.edge_values().len()).map(|index| Cell { dim: 1, index }))
        .chain((0..c.square_values().len()).map(|index| Cell { dim: 2, index }))
        .collect();
    cells.sort_by(|a, b| {
        c.value(*b)
            .total_cmp(&c.value(*a))
            .then(a.dim.cmp(&b.dim))
            .then(a.index.cmp(&b.index))
    });
    cells
}

fn boundary(c: &CubicalComplex, cell: Cell) -> Vec<Cell> {
    match cell.dim {
        0 => Vec::new(),
        1 => {
            let (a, b) = c.edge_vertices(cell.index);
            vec![Cell { dim: 0, index: a }, Cell { dim: 0, index: b }]
        }
        _ => c
            .square_edges(cell.index)
            .into_iter()
            .map(|index| Cell { dim: 1, index })
            .collect(),
    }
}

/// Adds `other` into `col` over Z/2. Both are sorted ascending.
fn add_column(col: &mut Vec<usize>, other: &[usize]) {
    let mut out = Vec::with_capacity(col.len() + other.len());
    let (mut i, mut j) = (0, 0);
    while i < col.len() && j < other.len() {
        match col[i].cmp(&other[j]) {
            std::cmp::Ordering::Less => {
                out.push(col[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(other[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&col[i..]);
    out.extend_from_slice(&other[j..]);
    *col = out;
}

pub fn oracle_diagram(c: &CubicalComplex) -> Result<PersistenceDiagram> {
    let cells = c.num_cells();
    if cells > ORACLE_CELL_LIMIT {
        return Err(Error::ComplexTooLarge {
            cells,
            limit: ORACLE_CELL_LIMIT,
        });
    }
    let order = filtration_order(c);
    let mut position = [
        vec![0usize; c.vertex_values().len()],
        vec![0usize; c.edge_values().len()],
        vec![0usize; c.square_values().len()],
    ];
    for (pos, cell) in order.iter().enumerate() {
        position[cell.dim as usize][cell.index] = pos;
    }

    let mut columns: Vec<Vec<usize>> = order
        .iter()
        .map(|&cell| {
            let mut col: Vec<usize> = boundary(c, cell)
                .into_iter()
                .map(|f| position[f.dim as usize][f.index])
                .collect();
            col.sort_unstable();
            col
        })
        .collect();

    let mut pivot_owner: Vec<Option<usize>> = vec![None; order.len()];
    for j in 0..columns.len() {
        while let Some(&low) = columns[j].last() {
            match pivot_owner[low] {
                Some(k) => {
                    let (head, tail) = columns.split_at_mut(j);
                    add_column(&mut tail[0], &head[k]);
                }
                None => {
                    pivot_owner[low] = Some(j);
                    break;
                }
            }
        }
    }

    let global_min = c.global_min();
    let mut diagram = PersistenceDiagram::default();
    for (i, &cell) in order.iter().enumerate() {
        let birth = c.value(cell);
        match pivot_owner[i] {
            Some(j) => {
                let death = c.value(order[j]);
                if birth > death {
                    diagram.push(PersistencePair::finite(cell.dim, birth, death));
                }
            }
            // a creator that is never destroyed
            None if columns[i].is_empty() => {
                diagram.push(PersistencePair::essential(cell.dim, birth, global_min));
            }
            None => {}
        }
    }
    Ok(diagram)
}
