//! Greedy CART with Gini impurity.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stream_rng;

use super::{Classifier, Dataset};

/// Gini impurity `1 - Σ p_c²` of a class histogram.
pub fn gini(counts: [usize; 2]) -> f64 {
    let n = (counts[0] + counts[1]) as f64;
    if n == 0.0 {
        return 0.0;
    }
    let (p0, p1) = (counts[0] as f64 / n, counts[1] as f64 / n);
    1.0 - p0 * p0 - p1 * p1
}

/// How many features a split may look at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxFeatures {
    All,
    Sqrt,
    Fixed(usize),
}

impl MaxFeatures {
    pub fn resolve(self, n_features: usize) -> usize {
        let k = match self {
            MaxFeatures::All => n_features,
            MaxFeatures::Sqrt => (n_features as f64).sqrt().ceil() as usize,
            MaxFeatures::Fixed(k) => k,
        };
        k.clamp(1, n_features.max(1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_samples_split: usize,
    pub max_features: MaxFeatures,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self {
            max_depth: 10,
            min_samples_split: 2,
            max_features: MaxFeatures::All,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Node {
    /// `x[feature] <= threshold` goes left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        class: u8,
        counts: [usize; 2],
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeModel {
    pub nodes: Vec<Node>,
    pub schema: Vec<String>,
    pub params: TreeParams,
    pub seed: u64,
}

impl TreeModel {
    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format {
            offset: 0,
            msg: format!("tree model: {e}"),
        })
    }
}

impl Classifier for TreeModel {
    fn predict(&self, x: &[f64]) -> u8 {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf { class, .. } => return class,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if x[feature] <= threshold { left } else { right },
            }
        }
    }

    fn schema(&self) -> &[String] {
        &self.schema
    }
}

/// Majority class; ties go to 0.
fn majority(counts: [usize; 2]) -> u8 {
    u8::from(counts[1] > counts[0])
}

fn histogram(ds: &Dataset, idx: &[usize]) -> [usize; 2] {
    let ones = idx.iter().filter(|&&i| ds.labels[i] == 1).count();
    [idx.len() - ones, ones]
}

/// `Σ_c n_c²/n` for both children as an exact fraction `(num, den)`.
/// Maximizing it is the same as minimizing the weighted Gini impurity.
fn purity_score(left: [usize; 2], right: [usize; 2]) -> (u128, u128) {
    let sq = |c: [usize; 2]| (c[0] as u128).pow(2) + (c[1] as u128).pow(2);
    let (nl, nr) = ((left[0] + left[1]) as u128, (right[0] + right[1]) as u128);
    (sq(left) * nr + sq(right) * nl, nl * nr)
}

fn better(a: (u128, u128), b: (u128, u128)) -> bool {
    a.0 * b.1 > b.0 * a.1
}

struct Best {
    feature: usize,
    threshold: f64,
    score: (u128, u128),
}

/// Midpoint strictly below `hi`, so `<=` keeps `lo` left and `hi` right.
fn midpoint(lo: f64, hi: f64) -> f64 {
    let mid = lo + (hi - lo) / 2.0;
    if mid >= hi {
        lo
    } else {
        mid
    }
}

fn best_split(ds: &Dataset, idx: &[usize], features: &[usize], parent: [usize; 2]) -> Option<Best> {
    let n = idx.len() as u128;
    let parent_sq = (parent[0] as u128).pow(2) + (parent[1] as u128).pow(2);
    // a split must beat leaving the node alone
    let mut best: Option<Best> = None;
    let mut order: Vec<usize> = idx.to_vec();
    for &f in features {
        order.sort_by(|&a, &b| ds.features[a][f].total_cmp(&ds.features[b][f]));
        let mut left = [0usize; 2];
        for w in 0..order.len() - 1 {
            left[ds.labels[order[w]] as usize] += 1;
            let (lo, hi) = (ds.features[order[w]][f], ds.features[order[w + 1]][f]);
            if lo >= hi {
                continue;
            }
            let right = [parent[0] - left[0], parent[1] - left[1]];
            let score = purity_score(left, right);
            let beats_parent = better(score, (parent_sq, n));
            let beats_best = best.as_ref().is_none_or(|b| better(score, b.score));
            if beats_parent && beats_best {
                best = Some(Best {
                    feature: f,
                    threshold: midpoint(lo, hi),
                    score,
                });
            }
        }
    }
    best
}

struct Builder<'a, R> {
    ds: &'a Dataset,
    params: TreeParams,
    n_candidates: usize,
    rng: R,
    nodes: Vec<Node>,
}

impl<R: Rng> Builder<'_, R> {
    fn grow(&mut self, idx: Vec<usize>, depth: usize) -> usize {
        let counts = histogram(self.ds, &idx);
        let at = self.nodes.len();
        self.nodes.push(Node::Leaf {
            class: majority(counts),
            counts,
        });
        let pure = counts[0] == 0 || counts[1] == 0;
        if pure || depth >= self.params.max_depth || idx.len() < self.params.min_samples_split.max(2) {
            return at;
        }
        let n_features = self.ds.n_features();
        let features: Vec<usize> = if self.n_candidates >= n_features {
            (0..n_features).collect()
        } else {
            let mut f = sample(&mut self.rng, n_features, self.n_candidates).into_vec();
            f.sort_unstable();
            f
        };
        let Some(split) = best_split(self.ds, &idx, &features, counts) else {
            return at;
        };
        let (left_idx, right_idx): (Vec<usize>, Vec<usize>) = idx
            .iter()
            .partition(|&&i| self.ds.features[i][split.feature] <= split.threshold);
        let left = self.grow(left_idx, depth + 1);
        let right = self.grow(right_idx, depth + 1);
        self.nodes[at] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        at
    }
}

/// Fits a tree on the rows `idx` of `train` (repeats allowed).
pub fn fit_tree_with(train: &Dataset, idx: Vec<usize>, params: TreeParams, seed: u64) -> Result<TreeModel> {
    if idx.is_empty() {
        return Err(Error::Data("cannot fit a tree on an empty dataset".into()));
    }
    let mut builder = Builder {
        ds: train,
        params,
        n_candidates: params.max_features.resolve(train.n_features()),
        rng: stream_rng(seed, 0),
        nodes: Vec::new(),
    };
    builder.grow(idx, 0);
    Ok(TreeModel {
        nodes: builder.nodes,
        schema: train.schema.clone(),
        params,
        seed,
    })
}

/// CART on all features: at each node the (feature, midpoint threshold) with
/// the lowest weighted Gini impurity, lowest feature index and then lowest
/// threshold winning ties. Growth stops on purity, at `max_depth`, below
/// `min_samples_split`, or when no split lowers the impurity.
pub fn fit_tree(train: &Dataset, max_depth: usize, min_samples_split: usize, seed: u64) -> Result<TreeModel> {
    let params = TreeParams {
        max_depth,
        min_samples_split,
        max_features: MaxFeatures::All,
    };
    fit_tree_with(train, (0..train.len()).collect(), params, seed)
}
