//! 1-Wasserstein distance between persistence diagrams, solved exactly as
//! an assignment problem over points plus diagonal slots.

use super::PersistenceDiagram;
use crate::error::{Error, Result};

pub const MATCHING_POINT_LIMIT: usize = 128;

fn linf(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).abs().max((a.1 - b.1).abs())
}

/// L-infinity distance from a point to the diagonal.
fn to_diagonal(p: (f64, f64)) -> f64 {
    (p.0 - p.1).abs() / 2.0
}

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method
/// with row/column potentials). Returns the total cost.
fn assignment_cost(cost: &[Vec<f64>]) -> f64 {
    let n = cost.len();
    if n == 0 {
        return 0.0;
    }
    // 1-based with a sentinel column 0
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let reduced = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if reduced < minv[j] {
                    minv[j] = reduced;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    (1..=n).map(|j| cost[row_of[j] - 1][j - 1]).sum()
}

/// 1-Wasserstein distance between the dimension-`dim` parts of two diagrams
/// with L-infinity ground distance. Points may be matched to the diagonal.
/// Essential pairs are matched like any other point, using their recorded
/// finite death.
pub fn wasserstein1(a: &PersistenceDiagram, b: &PersistenceDiagram, dim: u8) -> Result<f64> {
    let pa: Vec<(f64, f64)> = a.dimension(dim).map(|p| (p.birth, p.death)).collect();
    let pb: Vec<(f64, f64)> = b.dimension(dim).map(|p| (p.birth, p.death)).collect();
    for points in [&pa, &pb] {
        if points.len() > MATCHING_POINT_LIMIT {
            return Err(Error::DiagramTooLarge {
                dim,
                points: points.len(),
                limit: MATCHING_POINT_LIMIT,
            });
        }
    }
    let (n, m) = (pa.len(), pb.len());
    let size = n + m;
    let mut cost = vec![vec![0.0; size]; size];
    for (i, row) in cost.iter_mut().enumerate() {
        for (j, c) in row.iter_mut().enumerate() {
            *c = match (i < n, j < m) {
                (true, true) => linf(pa[i], pb[j]),
                (true, false) => to_diagonal(pa[i]),
                (false, true) => to_diagonal(pb[j]),
                (false, false) => 0.0,
            };
        }
    }
    Ok(assignment_cost(&cost))
}

/// Sum of [`wasserstein1`] over dimensions 0 and 1.
pub fn wasserstein1_total(a: &PersistenceDiagram, b: &PersistenceDiagram) -> Result<f64> {
    Ok(wasserstein1(a, b, 0)? + wasserstein1(a, b, 1)?)
}
