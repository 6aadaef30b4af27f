use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{Cell, FilteredComplex};

pub const DEFAULT_POINT_BUDGET: usize = 256;

/// Finite set of points in Euclidean space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    points: Vec<Vec<f64>>,
}

impl PointCloud {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::Shape("points of mixed dimension".into()));
        }
        if points.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Data("non-finite coordinate".into()));
        }
        Ok(Self { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.points[i]
            .iter()
            .zip(&self.points[j])
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// Vietoris–Rips filtration with the `d(u, v) <= 2ε` rule: an edge enters at
/// half its length, a triangle at its longest edge. Simplices above
/// `max_scale` are left out.
pub fn build_vr_filtration(pc: &PointCloud, max_dim: u8, max_scale: f64) -> Result<FilteredComplex> {
    build_vr_filtration_with_budget(pc, max_dim, max_scale, DEFAULT_POINT_BUDGET)
}

#[allow(clippy::needless_range_loop)]
pub fn build_vr_filtration_with_budget(
    pc: &PointCloud,
    max_dim: u8,
    max_scale: f64,
    budget: usize,
) -> Result<FilteredComplex> {
    if max_dim > 2 {
        return Err(Error::Param(format!("max_dim {max_dim} > 2")));
    }
    if max_scale.is_nan() || max_scale < 0.0 {
        return Err(Error::Param(format!("max_scale {max_scale} must be >= 0")));
    }
    let n = pc.len();
    if n > budget {
        return Err(Error::Size(format!("{n} points exceed the budget of {budget}")));
    }

    let mut cells: Vec<Cell> = (0..n).map(|i| Cell::new(i, 0, vec![], 0.0)).collect();
    let mut next_id = n;
    // edge_id[i][j] for i < j, when the edge is present
    let mut edge = vec![vec![None; n]; n];
    if max_dim >= 1 {
        for i in 0..n {
            for j in i + 1..n {
                let value = pc.distance(i, j) / 2.0;
                if value <= max_scale {
                    edge[i][j] = Some((next_id, value));
                    cells.push(Cell::new(next_id, 1, vec![i, j], value));
                    next_id += 1;
                }
            }
        }
    }
    if max_dim >= 2 {
        for i in 0..n {
            for j in i + 1..n {
                let Some((ij, vij)) = edge[i][j] else { continue };
                for k in j + 1..n {
                    let (Some((jk, vjk)), Some((ik, vik))) = (edge[j][k], edge[i][k]) else {
                        continue;
                    };
                    cells.push(Cell::new(next_id, 2, vec![ij, jk, ik], vij.max(vjk).max(vik)));
                    next_id += 1;
                }
            }
        }
    }
    FilteredComplex::from_cells(cells)
}
