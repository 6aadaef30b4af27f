//! CART decision trees and random forests for binary labels, plus the
//! dataset plumbing around them.

mod forest;
mod tree;

use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stream_rng;

pub use forest::{fit_forest, ForestModel, ForestParams};
pub use tree::{fit_tree, fit_tree_with, gini, MaxFeatures, Node, TreeModel, TreeParams};

/// Labeled feature rows sharing one column schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<u8>,
    pub schema: Vec<String>,
}

impl Dataset {
    pub fn new(features: Vec<Vec<f64>>, labels: Vec<u8>, schema: Vec<String>) -> Result<Self> {
        if features.len() != labels.len() {
            return Err(Error::Shape(format!(
                "{} rows but {} labels",
                features.len(),
                labels.len()
            )));
        }
        if let Some((i, row)) = features.iter().enumerate().find(|(_, r)| r.len() != schema.len()) {
            return Err(Error::Shape(format!(
                "row {i} has {} values, schema has {}",
                row.len(),
                schema.len()
            )));
        }
        if features.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Data("non-finite feature value".into()));
        }
        if let Some(l) = labels.iter().find(|&&l| l > 1) {
            return Err(Error::Data(format!("label {l} is not binary")));
        }
        Ok(Self {
            features,
            labels,
            schema,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.schema.len()
    }

    pub fn class_counts(&self) -> [usize; 2] {
        let ones = self.labels.iter().filter(|&&l| l == 1).count();
        [self.len() - ones, ones]
    }

    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            features: indices.iter().map(|&i| self.features[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            schema: self.schema.clone(),
        }
    }

    /// Reads the feature CSV layout: schema columns then a final `label`.
    pub fn read_csv(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_reader(file)
    }

    pub fn from_csv_reader<R: std::io::Read>(input: R) -> Result<Self> {
        let mut reader = csv::Reader::from_reader(input);
        let fmt_err = |e: csv::Error| {
            let offset = e.position().map_or(0, |p| p.byte());
            Error::Format {
                offset,
                msg: e.to_string(),
            }
        };
        let header = reader.headers().map_err(fmt_err)?.clone();
        let cols: Vec<String> = header.iter().map(str::to_string).collect();
        match cols.last() {
            Some(last) if last == "label" => {}
            _ => {
                return Err(Error::Format {
                    offset: 0,
                    msg: "last column must be \"label\"".into(),
                })
            }
        }
        let schema = cols[..cols.len() - 1].to_vec();
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for record in reader.records() {
            let record = record.map_err(fmt_err)?;
            let offset = record.position().map_or(0, |p| p.byte());
            let parse_err = |what: &str| Error::Format {
                offset,
                msg: format!("unparsable {what} in row {}", labels.len() + 1),
            };
            let mut row = Vec::with_capacity(schema.len());
            for field in record.iter().take(schema.len()) {
                row.push(field.parse::<f64>().map_err(|_| parse_err("value"))?);
            }
            labels.push(record[schema.len()].parse::<u8>().map_err(|_| parse_err("label"))?);
            features.push(row);
        }
        Self::new(features, labels, schema)
    }
}

/// Indices of a stratified split: each class contributes
/// `round(count * train_frac)` samples to the training side, clamped so both
/// sides keep at least one sample of every class. Both index lists are sorted.
pub fn stratified_split_indices(labels: &[u8], train_frac: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(train_frac > 0.0 && train_frac < 1.0) {
        return Err(Error::Param(format!("train fraction {train_frac} not in (0, 1)")));
    }
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in 0..=1u8 {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if idx.len() < 2 {
            return Err(Error::Data(format!(
                "class {class} has {} samples, need at least 2 to split",
                idx.len()
            )));
        }
        idx.shuffle(&mut stream_rng(seed, u64::from(class)));
        let n_train = ((idx.len() as f64 * train_frac).round() as usize).clamp(1, idx.len() - 1);
        train.extend_from_slice(&idx[..n_train]);
        test.extend_from_slice(&idx[n_train..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

pub fn stratified_split(ds: &Dataset, train_frac: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    let (train, test) = stratified_split_indices(&ds.labels, train_frac, seed)?;
    Ok((ds.subset(&train), ds.subset(&test)))
}

/// Anything that labels a feature row.
pub trait Classifier {
    fn predict(&self, x: &[f64]) -> u8;
    fn schema(&self) -> &[String];
}

pub fn predict_all<C: Classifier + ?Sized>(model: &C, ds: &Dataset) -> Result<Vec<u8>> {
    if ds.schema != model.schema() {
        return Err(Error::Shape(format!(
            "dataset has {} columns {:?}…, model expects {}",
            ds.n_features(),
            ds.schema.first(),
            model.schema().len()
        )));
    }
    Ok(ds.features.iter().map(|x| model.predict(x)).collect())
}

/// Fraction of correctly labeled rows.
pub fn accuracy<C: Classifier + ?Sized>(model: &C, test: &Dataset) -> Result<f64> {
    if test.is_empty() {
        return Err(Error::Data("accuracy of an empty test set".into()));
    }
    let predicted = predict_all(model, test)?;
    let correct = predicted.iter().zip(&test.labels).filter(|(p, l)| p == l).count();
    Ok(correct as f64 / test.len() as f64)
}
