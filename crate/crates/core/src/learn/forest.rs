//! Bagged ensembles of CART trees.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stream_rng;

use super::tree::{fit_tree_with, MaxFeatures, TreeModel, TreeParams};
use super::{Classifier, Dataset};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_samples_split: usize,
    pub max_features: MaxFeatures,
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_depth: 10,
            min_samples_split: 2,
            max_features: MaxFeatures::Sqrt,
            bootstrap: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub trees: Vec<TreeModel>,
    pub schema: Vec<String>,
    pub params: ForestParams,
    pub seed: u64,
}

impl ForestModel {
    /// Number of trees voting for class 1.
    pub fn votes(&self, x: &[f64]) -> usize {
        self.trees.iter().filter(|t| t.predict(x) == 1).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format {
            offset: 0,
            msg: format!("forest model: {e}"),
        })
    }
}

impl Classifier for ForestModel {
    /// Majority vote; an even split goes to 0.
    fn predict(&self, x: &[f64]) -> u8 {
        u8::from(2 * self.votes(x) > self.trees.len())
    }

    fn schema(&self) -> &[String] {
        &self.schema
    }
}

/// Tree `t` draws its bootstrap sample and its own seed from stream `t` of
/// `seed`, so the result does not depend on thread scheduling.
pub fn fit_forest(train: &Dataset, params: &ForestParams, seed: u64) -> Result<ForestModel> {
    if params.n_trees == 0 {
        return Err(Error::Param("n_trees must be at least 1".into()));
    }
    if train.is_empty() {
        return Err(Error::Data("cannot fit a forest on an empty dataset".into()));
    }
    let tree_params = TreeParams {
        max_depth: params.max_depth,
        min_samples_split: params.min_samples_split,
        max_features: params.max_features,
    };
    let n = train.len();
    let trees = (0..params.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(seed, t as u64);
            let tree_seed: u64 = rng.gen();
            let idx = if params.bootstrap {
                (0..n).map(|_| rng.gen_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            fit_tree_with(train, idx, tree_params, tree_seed)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ForestModel {
        trees,
        schema: train.schema.clone(),
        params: *params,
        seed,
    })
}
