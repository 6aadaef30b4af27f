use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::imaging::{BinaryImage, Center};
use crate::learn::{accuracy, fit_tree_with, Dataset, TreeParams};
use crate::vectorize::{filtration_block, FiltrationSpec};

use super::FeatureSettings;

/// The eight compass directions, counterclockwise from `(1, 0)`.
pub fn default_directions() -> Vec<[f64; 2]> {
    vec![
        [1.0, 0.0],
        [1.0, 1.0],
        [0.0, 1.0],
        [-1.0, 1.0],
        [-1.0, 0.0],
        [-1.0, -1.0],
        [0.0, -1.0],
        [1.0, -1.0],
    ]
}

/// A 3×3 lattice at the quarter points of a `side × side` image, plus the
/// middle pixel when the lattice misses it (it never does for the quarter
/// points, so this is 9 centers).
pub fn default_centers(side: usize) -> Vec<[i64; 2]> {
    let at = |k: usize| (k * side.saturating_sub(1) / 4) as i64;
    let mut centers = Vec::with_capacity(10);
    let mid = Center::middle(side.max(1), side.max(1));
    let lattice = (1..=3).flat_map(|y| (1..=3).map(move |x| [at(x), at(y)]));
    for c in lattice.chain([[mid.x, mid.y]]) {
        if !centers.contains(&c) {
            centers.push(c);
        }
    }
    centers
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub direction: [f64; 2],
    pub center: [i64; 2],
    pub validation_accuracy: f64,
}

impl GridPoint {
    fn key_cmp(&self, other: &Self) -> Ordering {
        let d = self.direction[0]
            .total_cmp(&other.direction[0])
            .then(self.direction[1].total_cmp(&other.direction[1]));
        d.then(self.center.cmp(&other.center))
    }

    pub fn filtrations(&self) -> Vec<FiltrationSpec> {
        vec![
            FiltrationSpec::height(self.direction[0], self.direction[1]),
            FiltrationSpec::radial(self.center[0], self.center[1]),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    /// One row per evaluated (direction, center), directions outermost.
    pub table: Vec<GridPoint>,
    pub best: GridPoint,
    /// Centers left out because they fall outside the image.
    pub skipped_centers: Vec<[i64; 2]>,
    pub fit_size: usize,
    pub validation_size: usize,
}

impl GridResult {
    pub fn table_csv(&self) -> String {
        let mut s = String::from("direction_x,direction_y,center_x,center_y,validation_accuracy\n");
        for p in &self.table {
            s += &format!(
                "{},{},{},{},{}\n",
                crate::fmt::g17(p.direction[0]),
                crate::fmt::g17(p.direction[1]),
                p.center[0],
                p.center[1],
                crate::fmt::g17(p.validation_accuracy)
            );
        }
        s
    }
}

/// Picks the maximum; equal accuracies go to the lexicographically smallest
/// (direction, center).
fn argmax(table: &[GridPoint]) -> Option<&GridPoint> {
    table.iter().reduce(
        |best, p| match p.validation_accuracy.total_cmp(&best.validation_accuracy) {
            Ordering::Greater => p,
            Ordering::Equal if p.key_cmp(best) == Ordering::Less => p,
            _ => best,
        },
    )
}

/// Scores every (direction, center) pair by fitting a decision tree on the
/// `fit` samples with height + radial features and measuring accuracy on
/// the `validation` samples. Only those samples are ever filtered.
#[allow(clippy::too_many_arguments)]
pub fn grid_search(
    images: &[BinaryImage],
    labels: &[u8],
    fit: &[usize],
    validation: &[usize],
    directions: &[[f64; 2]],
    centers: &[[i64; 2]],
    features: &FeatureSettings,
    tree: TreeParams,
    seed: u64,
) -> Result<GridResult> {
    let (width, height) = images.first().map_or((0, 0), |i| (i.width(), i.height()));
    let (kept, skipped): (Vec<[i64; 2]>, Vec<[i64; 2]>) = centers
        .iter()
        .partition(|&&[x, y]| Center::new(x, y).inside(width, height));
    for c in &skipped {
        log::warn!(
            "grid center ({}, {}) lies outside the {width}x{height} image, skipped",
            c[0],
            c[1]
        );
    }
    if directions.is_empty() || kept.is_empty() {
        return Err(crate::Error::Config("grid search has no usable points".into()));
    }

    let filtrations: Vec<FiltrationSpec> = directions
        .iter()
        .map(|&[x, y]| FiltrationSpec::height(x, y))
        .chain(kept.iter().map(|&[x, y]| FiltrationSpec::radial(x, y)))
        .collect();
    let used: Vec<usize> = fit.iter().chain(validation).copied().collect();
    // blocks[s][f]: features of filtration f on used sample s
    let blocks: Vec<Vec<Vec<f64>>> = used
        .par_iter()
        .map(|&i| {
            filtrations
                .iter()
                .map(|f| filtration_block(&images[i], f, &features.dims, &features.vectorizers))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let n_fit = fit.len();
    let n_dir = directions.len();

    let points: Vec<(usize, usize)> = (0..n_dir).flat_map(|d| (0..kept.len()).map(move |c| (d, c))).collect();
    let table = points
        .par_iter()
        .map(|&(d, c)| {
            let rows = |range: std::ops::Range<usize>| -> Vec<Vec<f64>> {
                range
                    .map(|s| [blocks[s][d].as_slice(), &blocks[s][n_dir + c]].concat())
                    .collect()
            };
            let width = blocks.first().map_or(0, |b| b[d].len() + b[n_dir + c].len());
            let schema: Vec<String> = (0..width).map(|i| format!("x{i}")).collect();
            let train = Dataset::new(rows(0..n_fit), fit.iter().map(|&i| labels[i]).collect(), schema.clone())?;
            let val = Dataset::new(
                rows(n_fit..used.len()),
                validation.iter().map(|&i| labels[i]).collect(),
                schema,
            )?;
            let model = fit_tree_with(&train, (0..train.len()).collect(), tree, seed)?;
            Ok(GridPoint {
                direction: directions[d],
                center: kept[c],
                validation_accuracy: accuracy(&model, &val)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let best = argmax(&table).expect("grid is nonempty").clone();
    Ok(GridResult {
        table,
        best,
        skipped_centers: skipped,
        fit_size: fit.len(),
        validation_size: validation.len(),
    })
}
