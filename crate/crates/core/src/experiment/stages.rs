use std::path::Path;
use std::time::Instant;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gsw::format::{read_file, read_manifest, write_dataset};
use crate::gsw::{generate_dataset, GswParams};
use crate::imaging::BinaryImage;
use crate::learn::{accuracy, fit_forest, fit_tree_with, stratified_split_indices, Dataset, ForestModel, TreeModel};
use crate::stream_rng;
use crate::vectorize::{extract_features, write_feature_csv, FeatureSchema, FiltrationSpec};

use super::grid::{default_centers, default_directions, grid_search, GridResult};
use super::report::{check, CheckOutcome, RunReport};
use super::{read_json, read_text, to_json, write_text, ExperimentConfig, RunContext, Seeds};

const DATASET: &str = "dataset.tdac";
const MANIFEST: &str = "dataset.json";
const GRID_CSV: &str = "gridsearch.csv";
const GRID_JSON: &str = "gridsearch.json";
const FEATURES: &str = "features.csv";
const SCHEMA: &str = "schema.json";
const TREE: &str = "tree.json";
const FOREST: &str = "forest.json";
pub(super) const EVALUATION: &str = "evaluation.json";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Accuracies {
    pub decision_tree: f64,
    pub random_forest: f64,
}

impl Accuracies {
    pub fn higher(&self) -> f64 {
        self.decision_tree.max(self.random_forest)
    }
}

/// Test-set outcome of one run, as written to `evaluation.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub run: String,
    pub leaky: bool,
    pub params: GswParams,
    pub count_per_class: usize,
    pub filtrations: Vec<FiltrationSpec>,
    pub validation_accuracy: Option<f64>,
    pub train_size: usize,
    pub test_size: usize,
    pub accuracy: Accuracies,
    pub seeds: Seeds,
    pub config_hash: String,
}

/// Features of every image under `schema`, computed in parallel.
pub fn feature_dataset(images: &[BinaryImage], labels: &[u8], schema: &FeatureSchema) -> Result<Dataset> {
    schema.validate()?;
    let rows = images
        .par_iter()
        .map(|img| extract_features(img, schema).map(|f| f.values))
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(rows, labels.to_vec(), schema.column_names())
}

fn fit_models(train: &Dataset, cfg: &ExperimentConfig, seeds: &Seeds) -> Result<(TreeModel, ForestModel)> {
    let tree = fit_tree_with(train, (0..train.len()).collect(), cfg.tree.params(), seeds.tree)?;
    let forest = fit_forest(train, &cfg.forest.params(), seeds.forest)?;
    Ok((tree, forest))
}

fn score(tree: &TreeModel, forest: &ForestModel, test: &Dataset) -> Result<Accuracies> {
    Ok(Accuracies {
        decision_tree: accuracy(tree, test)?,
        random_forest: accuracy(forest, test)?,
    })
}

/// Stratified train/test split of `ds`, both classifiers fit on the training
/// side and scored on the test side.
pub fn fit_and_score(
    ds: &Dataset,
    cfg: &ExperimentConfig,
    seeds: &Seeds,
) -> Result<(TreeModel, ForestModel, Accuracies)> {
    let (train, test) = stratified_split_indices(&ds.labels, cfg.train_frac, seeds.split)?;
    let (tree, forest) = fit_models(&ds.subset(&train), cfg, seeds)?;
    let acc = score(&tree, &forest, &ds.subset(&test))?;
    Ok((tree, forest, acc))
}

/// The labels every stage sees: as generated, or permuted for a null run.
fn effective_labels(raw: Vec<u8>, cfg: &ExperimentConfig, seeds: &Seeds) -> Vec<u8> {
    let mut labels = raw;
    if cfg.shuffle_labels {
        labels.shuffle(&mut stream_rng(seeds.labels, 0));
    }
    labels
}

fn load_images(ctx: &RunContext, cfg: &ExperimentConfig, seeds: &Seeds) -> Result<(Vec<BinaryImage>, Vec<u8>)> {
    let manifest = read_manifest(&ctx.path(MANIFEST))?;
    if manifest.params != ctx.params || manifest.seed != seeds.data {
        return Err(Error::Config(format!(
            "{} was generated with different parameters or seed; rerun gen",
            ctx.path(MANIFEST).display()
        )));
    }
    let file = read_file(&ctx.path(DATASET))?;
    if file.rows != ctx.params.side || file.cols != ctx.params.side {
        return Err(Error::Data(format!(
            "dataset holds {}x{} matrices, expected side {}",
            file.rows, file.cols, ctx.params.side
        )));
    }
    let raw = file.samples.iter().map(|s| s.label).collect();
    let images = file.samples.iter().map(|s| BinaryImage::from_matrix(&s.bits)).collect();
    Ok((images, effective_labels(raw, cfg, seeds)))
}

/// Writes `dataset.tdac` and `dataset.json` for every run.
pub fn cmd_gen(cfg: &ExperimentConfig, out: &Path) -> Result<()> {
    write_text(&out.join("config.json"), &cfg.to_json())?;
    let seeds = cfg.seeds();
    for ctx in cfg.run_contexts(out)? {
        log::info!("{}: generating {} samples per class", ctx.label, cfg.count_per_class);
        let ds = generate_dataset(&ctx.params, cfg.count_per_class, seeds.data)?;
        std::fs::create_dir_all(&ctx.dir).map_err(|e| Error::io(&ctx.dir, e))?;
        write_dataset(&ds, &ctx.path(DATASET), &ctx.path(MANIFEST))?;
    }
    Ok(())
}

/// Grid search on the training portion of every run.
pub fn cmd_gridsearch(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<GridResult>> {
    let seeds = cfg.seeds();
    let mut results = Vec::new();
    for ctx in cfg.run_contexts(out)? {
        let (images, labels) = load_images(&ctx, cfg, &seeds)?;
        let (train, _) = stratified_split_indices(&labels, cfg.train_frac, seeds.split)?;
        let train_labels: Vec<u8> = train.iter().map(|&i| labels[i]).collect();
        let (fit, val) = stratified_split_indices(&train_labels, cfg.validation_train_frac, seeds.validation)?;
        let fit: Vec<usize> = fit.iter().map(|&i| train[i]).collect();
        let val: Vec<usize> = val.iter().map(|&i| train[i]).collect();
        let directions = cfg.grid.directions.clone().unwrap_or_else(default_directions);
        let centers = cfg
            .grid
            .centers
            .clone()
            .unwrap_or_else(|| default_centers(ctx.params.side));
        let result = grid_search(
            &images,
            &labels,
            &fit,
            &val,
            &directions,
            &centers,
            &cfg.features,
            cfg.tree.params(),
            seeds.tree,
        )?;
        log::info!(
            "{}: best direction {:?}, center {:?}, validation accuracy {:.4}",
            ctx.label,
            result.best.direction,
            result.best.center,
            result.best.validation_accuracy
        );
        write_text(&ctx.path(GRID_CSV), &result.table_csv())?;
        write_text(&ctx.path(GRID_JSON), &to_json(&result))?;
        results.push(result);
    }
    Ok(results)
}

/// Filtrations for a run: fixed in the config, else the grid optimum, else
/// the defaults.
fn chosen_filtrations(ctx: &RunContext, cfg: &ExperimentConfig) -> Result<(Vec<FiltrationSpec>, Option<f64>)> {
    if let Some(f) = &cfg.filtrations {
        return Ok((f.clone(), None));
    }
    let grid_path = ctx.path(GRID_JSON);
    if grid_path.exists() {
        let grid: GridResult = read_json(&grid_path)?;
        return Ok((grid.best.filtrations(), Some(grid.best.validation_accuracy)));
    }
    Ok((FeatureSchema::default().filtrations, None))
}

/// Writes `features.csv` and `schema.json` for every run.
pub fn cmd_features(cfg: &ExperimentConfig, out: &Path) -> Result<()> {
    let seeds = cfg.seeds();
    for ctx in cfg.run_contexts(out)? {
        let (images, labels) = load_images(&ctx, cfg, &seeds)?;
        let (filtrations, _) = chosen_filtrations(&ctx, cfg)?;
        let schema = cfg.features.schema(filtrations);
        let ds = feature_dataset(&images, &labels, &schema)?;
        let rows: Vec<(Vec<f64>, u8)> = ds.features.into_iter().zip(ds.labels).collect();
        let mut buf = Vec::new();
        write_feature_csv(&mut buf, &ds.schema, &rows)?;
        write_text(&ctx.path(FEATURES), &String::from_utf8(buf).expect("CSV is UTF-8"))?;
        write_text(&ctx.path(SCHEMA), &to_json(&schema))?;
    }
    Ok(())
}

fn load_features(ctx: &RunContext) -> Result<Dataset> {
    let schema: FeatureSchema = read_json(&ctx.path(SCHEMA))?;
    let ds = Dataset::read_csv(&ctx.path(FEATURES))?;
    if ds.schema != schema.column_names() {
        return Err(Error::Config(format!(
            "{} does not match {}",
            ctx.path(FEATURES).display(),
            ctx.path(SCHEMA).display()
        )));
    }
    Ok(ds)
}

/// Fits both classifiers on the training split of every run.
pub fn cmd_train(cfg: &ExperimentConfig, out: &Path) -> Result<()> {
    let seeds = cfg.seeds();
    for ctx in cfg.run_contexts(out)? {
        let ds = load_features(&ctx)?;
        let (train, _) = stratified_split_indices(&ds.labels, cfg.train_frac, seeds.split)?;
        let (tree, forest) = fit_models(&ds.subset(&train), cfg, &seeds)?;
        write_text(&ctx.path(TREE), &(tree.to_json() + "\n"))?;
        write_text(&ctx.path(FOREST), &(forest.to_json() + "\n"))?;
    }
    Ok(())
}

/// Scores the trained models on the held-out split of every run.
pub fn cmd_evaluate(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<Evaluation>> {
    let seeds = cfg.seeds();
    let hash = cfg.hash();
    let mut evaluations = Vec::new();
    for ctx in cfg.run_contexts(out)? {
        let ds = load_features(&ctx)?;
        let tree = TreeModel::from_json(&read_text(&ctx.path(TREE))?)?;
        let forest = ForestModel::from_json(&read_text(&ctx.path(FOREST))?)?;
        let (train, test) = stratified_split_indices(&ds.labels, cfg.train_frac, seeds.split)?;
        let acc = score(&tree, &forest, &ds.subset(&test)).map_err(|e| match e {
            Error::Shape(msg) => Error::Config(format!("models do not fit the features: {msg}")),
            other => other,
        })?;
        let (filtrations, validation_accuracy) = chosen_filtrations(&ctx, cfg)?;
        let eval = Evaluation {
            run: ctx.label.to_string(),
            leaky: ctx.label.leaky,
            params: ctx.params,
            count_per_class: cfg.count_per_class,
            filtrations,
            validation_accuracy,
            train_size: train.len(),
            test_size: test.len(),
            accuracy: acc,
            seeds,
            config_hash: hash.clone(),
        };
        log::info!(
            "{}: decision tree {:.4}, random forest {:.4}",
            ctx.label,
            acc.decision_tree,
            acc.random_forest
        );
        write_text(&ctx.path(EVALUATION), &to_json(&eval))?;
        evaluations.push(eval);
    }
    Ok(evaluations)
}

/// Collects every run's evaluation into `report.md`, `report.csv`,
/// `report.json` and `plot_data.csv`. Runs without an evaluation show up as
/// gaps and make this fail after the files are written.
pub fn cmd_report(cfg: &ExperimentConfig, out: &Path) -> Result<RunReport> {
    let mut evaluations = Vec::new();
    let mut gaps = Vec::new();
    for ctx in cfg.run_contexts(out)? {
        let path = ctx.path(EVALUATION);
        if path.exists() {
            evaluations.push(read_json::<Evaluation>(&path)?);
        } else {
            gaps.push(ctx.label.to_string());
        }
    }
    let report = RunReport::new(cfg, evaluations, gaps);
    write_text(&out.join("report.md"), &report.markdown())?;
    write_text(&out.join("report.csv"), &report.csv())?;
    write_text(&out.join("report.json"), &to_json(&report))?;
    write_text(&out.join("plot_data.csv"), &report.plot_data())?;
    if !report.gaps.is_empty() {
        return Err(Error::Data(format!(
            "missing evaluations for {}",
            report.gaps.join(", ")
        )));
    }
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
struct StageTiming {
    stage: &'static str,
    seconds: f64,
}

#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub report: RunReport,
    pub check: CheckOutcome,
}

/// All stages in order. Wall-clock times go to `timings.json`, the only
/// artifact that differs between identical runs.
pub fn pipeline(cfg: &ExperimentConfig, out: &Path) -> Result<PipelineOutcome> {
    let start = Instant::now();
    let mut timings = Vec::new();
    let mut timed = |stage: &'static str, f: &dyn Fn() -> Result<()>| -> Result<()> {
        let t = Instant::now();
        f()?;
        timings.push(StageTiming {
            stage,
            seconds: t.elapsed().as_secs_f64(),
        });
        Ok(())
    };
    timed("gen", &|| cmd_gen(cfg, out))?;
    if cfg.filtrations.is_none() {
        timed("gridsearch", &|| cmd_gridsearch(cfg, out).map(drop))?;
    }
    timed("features", &|| cmd_features(cfg, out))?;
    timed("train", &|| cmd_train(cfg, out))?;
    timed("evaluate", &|| cmd_evaluate(cfg, out).map(drop))?;
    let report = cmd_report(cfg, out)?;
    let total = start.elapsed().as_secs_f64();
    let json = serde_json::json!({ "stages": timings, "total_seconds": total });
    write_text(&out.join("timings.json"), &to_json(&json))?;
    let check = check(&report);
    Ok(PipelineOutcome { report, check })
}
