//! End-to-end distinguishing experiment: generate ciphertexts, search the
//! filtration grid, extract features, train, evaluate and report.
//!
//! Every stage reads and writes files under one output directory, one
//! subdirectory per configured run:
//!
//! ```text
//! <out>/config.json               resolved configuration
//! <out>/<run>/dataset.tdac|json   ciphertexts and manifest      (gen)
//! <out>/<run>/gridsearch.csv|json validation table and optimum  (gridsearch)
//! <out>/<run>/features.csv        feature matrix                (features)
//! <out>/<run>/schema.json         feature schema used
//! <out>/<run>/tree.json           decision tree                 (train)
//! <out>/<run>/forest.json         random forest
//! <out>/<run>/evaluation.json     test accuracies               (evaluate)
//! <out>/report.md|csv|json        accuracy table                (report)
//! <out>/plot_data.csv             (n, accuracy) pairs
//! <out>/timings.json              wall-clock per stage          (pipeline)
//! ```

mod grid;
mod report;
mod stages;
pub mod synthetic;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use rand::RngCore;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::gsw::GswParams;
use crate::learn::{ForestParams, MaxFeatures, TreeParams};
use crate::stream_rng;
use crate::vectorize::{FeatureSchema, FiltrationSpec, VectorizerSpec};

pub use grid::{default_centers, default_directions, grid_search, GridPoint, GridResult};
pub use report::{check, CheckOutcome, ReportRow, RunReport, REFERENCE_ROWS};
pub use stages::{
    cmd_evaluate, cmd_features, cmd_gen, cmd_gridsearch, cmd_report, cmd_train, feature_dataset, fit_and_score,
    pipeline, Accuracies, Evaluation, PipelineOutcome,
};

/// Accuracy the distinguisher has to beat.
pub const BASELINE: f64 = 0.5;
/// Required margin over [`BASELINE`] for `pipeline --check`.
pub const CHECK_MARGIN: f64 = 0.2;

/// One oracle configuration. Either `side` (resolved to the closest
/// parameters) or `n` must be set; `q`, `m` and `error_bound` only apply
/// together with `n` in honest mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side: Option<usize>,
    #[serde(default)]
    pub leaky: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_bound: Option<u64>,
}

impl RunSpec {
    pub fn leaky_side(side: usize) -> Self {
        Self {
            side: Some(side),
            leaky: true,
            ..Self::default()
        }
    }

    pub fn honest_n(n: usize) -> Self {
        Self {
            n: Some(n),
            ..Self::default()
        }
    }

    pub fn params(&self) -> Result<GswParams> {
        let cfg = |e: Error| Error::Config(e.to_string());
        match (self.n, self.side) {
            (Some(_), Some(_)) => Err(Error::Config("run sets both n and side".into())),
            (None, None) => Err(Error::Config("run needs n or side".into())),
            (None, Some(side)) => {
                if self.q.is_some() || self.m.is_some() || self.error_bound.is_some() {
                    return Err(Error::Config("q, m and error_bound need n, not side".into()));
                }
                GswParams::for_side(side, self.leaky).map_err(cfg)
            }
            (Some(n), None) if self.leaky => {
                if self.q.is_some() || self.m.is_some() || self.error_bound.is_some() {
                    return Err(Error::Config("leaky runs fix q, m and error_bound".into()));
                }
                GswParams::leaky(n).map_err(cfg)
            }
            (Some(n), None) => match self.q {
                Some(q) => GswParams::new(n, q, self.m, self.error_bound.unwrap_or(1)).map_err(cfg),
                None if self.m.is_none() && self.error_bound.is_none() => GswParams::honest(n).map_err(cfg),
                None => Err(Error::Config("m and error_bound need q".into())),
            },
        }
    }
}

/// Vectorizers and homology dimensions applied to every filtration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureSettings {
    pub dims: Vec<usize>,
    pub vectorizers: Vec<VectorizerSpec>,
}

impl Default for FeatureSettings {
    fn default() -> Self {
        let d = FeatureSchema::default();
        Self {
            dims: d.dims,
            vectorizers: d.vectorizers,
        }
    }
}

impl FeatureSettings {
    pub fn schema(&self, filtrations: Vec<FiltrationSpec>) -> FeatureSchema {
        FeatureSchema {
            filtrations,
            dims: self.dims.clone(),
            vectorizers: self.vectorizers.clone(),
        }
    }
}

/// Search space for the filtration parameters. Missing lists fall back to
/// [`default_directions`] and [`default_centers`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct GridSettings {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directions: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub centers: Option<Vec<[i64; 2]>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TreeSettings {
    pub max_depth: usize,
    pub min_samples_split: usize,
}

impl Default for TreeSettings {
    fn default() -> Self {
        let d = TreeParams::default();
        Self {
            max_depth: d.max_depth,
            min_samples_split: d.min_samples_split,
        }
    }
}

impl TreeSettings {
    pub fn params(&self) -> TreeParams {
        TreeParams {
            max_depth: self.max_depth,
            min_samples_split: self.min_samples_split,
            max_features: MaxFeatures::All,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ForestSettings {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_samples_split: usize,
}

impl Default for ForestSettings {
    fn default() -> Self {
        let d = ForestParams::default();
        Self {
            n_trees: d.n_trees,
            max_depth: d.max_depth,
            min_samples_split: d.min_samples_split,
        }
    }
}

impl ForestSettings {
    pub fn params(&self) -> ForestParams {
        ForestParams {
            n_trees: self.n_trees,
            max_depth: self.max_depth,
            min_samples_split: self.min_samples_split,
            ..ForestParams::default()
        }
    }
}

/// Everything that determines the artifacts of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub runs: Vec<RunSpec>,
    pub count_per_class: usize,
    pub seed: u64,
    pub features: FeatureSettings,
    /// Fixed filtrations. When set, grid search results are ignored.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub filtrations: Option<Vec<FiltrationSpec>>,
    pub grid: GridSettings,
    pub tree: TreeSettings,
    pub forest: ForestSettings,
    pub train_frac: f64,
    /// Share of the training portion used for fitting during grid search;
    /// the rest is the validation set.
    pub validation_train_frac: f64,
    /// Randomly permute the labels before anything sees them.
    pub shuffle_labels: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            runs: vec![RunSpec::leaky_side(29), RunSpec::leaky_side(33), RunSpec::honest_n(6)],
            count_per_class: 250,
            seed: 0,
            features: FeatureSettings::default(),
            filtrations: None,
            grid: GridSettings::default(),
            tree: TreeSettings::default(),
            forest: ForestSettings::default(),
            train_frac: 0.7,
            validation_train_frac: 0.8,
            shuffle_labels: false,
        }
    }
}

/// Command-line overrides applied on top of a config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub n: Option<usize>,
    pub side: Option<usize>,
    pub leaky: bool,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    /// `--n`/`--side` replace the run list with a single run; `--leaky` alone
    /// switches every configured run to leaky mode.
    pub fn apply(&mut self, o: &Overrides) -> Result<()> {
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        match (o.n, o.side) {
            (Some(_), Some(_)) => return Err(Error::Config("--n and --side are exclusive".into())),
            (Some(n), None) => {
                self.runs = vec![RunSpec {
                    n: Some(n),
                    leaky: o.leaky,
                    ..RunSpec::default()
                }]
            }
            (None, Some(side)) => {
                self.runs = vec![RunSpec {
                    side: Some(side),
                    leaky: o.leaky,
                    ..RunSpec::default()
                }]
            }
            (None, None) if o.leaky => {
                for r in &mut self.runs {
                    *r = RunSpec {
                        leaky: true,
                        ..r.clone()
                    };
                    if r.n.is_some() {
                        r.q = None;
                        r.m = None;
                        r.error_bound = None;
                    }
                }
            }
            (None, None) => {}
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs.is_empty() {
            return Err(Error::Config("no runs configured".into()));
        }
        if self.count_per_class < 10 {
            return Err(Error::Config(format!(
                "count_per_class {} < 10 leaves too few samples to split",
                self.count_per_class
            )));
        }
        for (name, f) in [
            ("train_frac", self.train_frac),
            ("validation_train_frac", self.validation_train_frac),
        ] {
            if !(f > 0.0 && f < 1.0) {
                return Err(Error::Config(format!("{name} {f} not in (0, 1)")));
            }
        }
        if self.forest.n_trees == 0 {
            return Err(Error::Config("forest needs at least one tree".into()));
        }
        let mut labels = Vec::new();
        for r in &self.runs {
            let label = RunLabel::new(&r.params()?);
            if labels.contains(&label) {
                return Err(Error::Config(format!("run {label} configured twice")));
            }
            labels.push(label);
        }
        let filtrations = self
            .filtrations
            .clone()
            .unwrap_or_else(|| FeatureSchema::default().filtrations);
        self.features.schema(filtrations).validate()?;
        let grid = &self.grid;
        if grid.directions.as_ref().is_some_and(Vec::is_empty) || grid.centers.as_ref().is_some_and(Vec::is_empty) {
            return Err(Error::Config("grid lists must not be empty".into()));
        }
        for &[x, y] in grid.directions.iter().flatten() {
            crate::imaging::Direction::new(x, y).map_err(|e| Error::Config(e.to_string()))?;
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes") + "\n"
    }

    pub fn seeds(&self) -> Seeds {
        Seeds::derive(self.seed)
    }

    pub fn run_contexts(&self, out: &Path) -> Result<Vec<RunContext>> {
        self.runs
            .iter()
            .map(|spec| {
                let params = spec.params()?;
                let label = RunLabel::new(&params);
                Ok(RunContext {
                    dir: out.join(label.to_string()),
                    params,
                    label,
                })
            })
            .collect()
    }
}

/// Per-stage seeds, all derived from the configured master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Seeds {
    pub data: u64,
    pub split: u64,
    pub validation: u64,
    pub tree: u64,
    pub forest: u64,
    pub labels: u64,
}

impl Seeds {
    pub fn derive(master: u64) -> Self {
        // streams far above any sample index
        let sub = |k: u64| stream_rng(master, (1 << 40) + k).next_u64();
        Self {
            data: master,
            split: sub(1),
            validation: sub(2),
            tree: sub(3),
            forest: sub(4),
            labels: sub(5),
        }
    }
}

/// Directory name of a run, e.g. `leaky-n28` or `honest-n6`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunLabel {
    pub leaky: bool,
    pub n: usize,
}

impl RunLabel {
    pub fn new(p: &GswParams) -> Self {
        Self {
            leaky: p.is_leaky(),
            n: p.n,
        }
    }

    pub fn mode(&self) -> &'static str {
        if self.leaky {
            "leaky"
        } else {
            "honest"
        }
    }
}

impl fmt::Display for RunLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-n{}", self.mode(), self.n)
    }
}

#[derive(Debug, Clone)]
pub struct RunContext {
    pub params: GswParams,
    pub label: RunLabel,
    pub dir: PathBuf,
}

impl RunContext {
    pub fn path(&self, file: &str) -> PathBuf {
        self.dir.join(file)
    }
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read_text(path)?).map_err(|e| Error::Format {
        offset: 0,
        msg: format!("{}: {e}", path.display()),
    })
}

pub(crate) fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("value serializes") + "\n"
}
