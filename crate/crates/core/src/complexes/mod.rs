//! Filtered cell complexes: cubical complexes of grayscale images and
//! Vietoris–Rips complexes of finite point clouds.

mod cubical;
mod rips;

use std::cmp::Ordering;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use cubical::build_cubical_filtration;
pub use rips::{build_vr_filtration, build_vr_filtration_with_budget, PointCloud, DEFAULT_POINT_BUDGET};

/// A cube or simplex with its filtration value. `boundary` holds the ids of
/// its codimension-one faces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub id: usize,
    pub dim: u8,
    pub boundary: Vec<usize>,
    pub value: f64,
}

impl Cell {
    pub fn new(id: usize, dim: u8, boundary: Vec<usize>, value: f64) -> Self {
        Self {
            id,
            dim,
            boundary,
            value,
        }
    }
}

/// The filtration order: value, then dimension, then id.
pub fn filtration_order(a: &Cell, b: &Cell) -> Ordering {
    a.value
        .total_cmp(&b.value)
        .then(a.dim.cmp(&b.dim))
        .then(a.id.cmp(&b.id))
}

/// Cells in filtration order, with each boundary also available as sorted
/// positions into that order.
#[derive(Debug, Clone, PartialEq)]
pub struct FilteredComplex {
    cells: Vec<Cell>,
    columns: Vec<Vec<usize>>,
}

impl FilteredComplex {
    /// Sorts `cells` into filtration order after checking that faces exist,
    /// have the right dimension and never come later than their cofaces.
    pub fn from_cells(mut cells: Vec<Cell>) -> Result<Self> {
        cells.sort_by(filtration_order);
        let cx = Self::from_ordered(cells)?;
        cx.check_filtration()?;
        Ok(cx)
    }

    /// Keeps the given order. Only structure is checked here;
    /// [`FilteredComplex::check_filtration`] validates the order itself.
    pub fn from_ordered(cells: Vec<Cell>) -> Result<Self> {
        let max_id = cells.iter().map(|c| c.id).max().unwrap_or(0);
        let positions: Box<dyn Fn(usize) -> Option<usize>> = if max_id < 4 * cells.len() + 16 {
            let mut table = vec![usize::MAX; max_id + 1];
            for (pos, c) in cells.iter().enumerate() {
                if table[c.id] != usize::MAX {
                    return Err(Error::Contract(format!("duplicate cell id {}", c.id)));
                }
                table[c.id] = pos;
            }
            Box::new(move |id| table.get(id).copied().filter(|&p| p != usize::MAX))
        } else {
            let mut map = HashMap::with_capacity(cells.len());
            for (pos, c) in cells.iter().enumerate() {
                if map.insert(c.id, pos).is_some() {
                    return Err(Error::Contract(format!("duplicate cell id {}", c.id)));
                }
            }
            Box::new(move |id| map.get(&id).copied())
        };

        let mut columns = Vec::with_capacity(cells.len());
        for c in &cells {
            if !c.value.is_finite() {
                return Err(Error::Contract(format!("cell {} has non-finite value", c.id)));
            }
            if (c.dim == 0) != c.boundary.is_empty() {
                return Err(Error::Contract(format!(
                    "cell {} of dimension {} has {} faces",
                    c.id,
                    c.dim,
                    c.boundary.len()
                )));
            }
            let mut col = Vec::with_capacity(c.boundary.len());
            for &f in &c.boundary {
                let pos = positions(f).ok_or_else(|| Error::Contract(format!("cell {} has unknown face {f}", c.id)))?;
                if cells[pos].dim + 1 != c.dim {
                    return Err(Error::Contract(format!(
                        "face {f} of cell {} has dimension {}",
                        c.id, cells[pos].dim
                    )));
                }
                col.push(pos);
            }
            col.sort_unstable();
            if col.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Contract(format!("cell {} repeats a face", c.id)));
            }
            columns.push(col);
        }
        Ok(Self { cells, columns })
    }

    /// Every face precedes its coface and has value no larger than it, so
    /// each prefix of the order is a subcomplex and sublevel sets nest.
    pub fn check_filtration(&self) -> Result<()> {
        for (pos, (cell, col)) in self.cells.iter().zip(&self.columns).enumerate() {
            for &f in col {
                if f >= pos {
                    return Err(Error::Contract(format!(
                        "face {} appears after cell {}",
                        self.cells[f].id, cell.id
                    )));
                }
                if self.cells[f].value > cell.value {
                    return Err(Error::Contract(format!(
                        "face {} has value {} above cell {} at {}",
                        self.cells[f].id, self.cells[f].value, cell.id, cell.value
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// Boundary of the cell at `pos`, as ascending positions.
    pub fn column(&self, pos: usize) -> &[usize] {
        &self.columns[pos]
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn count_dim(&self, dim: u8) -> usize {
        self.cells.iter().filter(|c| c.dim == dim).count()
    }

    pub fn max_dim(&self) -> Option<u8> {
        self.cells.iter().map(|c| c.dim).max()
    }

    pub fn max_value(&self) -> Option<f64> {
        self.cells.last().map(|c| c.value)
    }

    /// Debug dump: a JSON list of cells.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.cells).expect("finite values serialize")
    }
}
