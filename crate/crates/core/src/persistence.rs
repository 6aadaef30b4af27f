//! Persistent homology over Z/2 by boundary-matrix column reduction.

use serde::{Deserialize, Serialize};

use crate::complexes::FilteredComplex;
use crate::error::{Error, Result};
use crate::fmt::g17;

/// One interval. `death` is `f64::INFINITY` for essential classes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bar {
    pub birth: f64,
    pub death: f64,
}

impl Bar {
    pub fn new(birth: f64, death: f64) -> Self {
        Self { birth, death }
    }

    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }

    pub fn is_essential(&self) -> bool {
        self.death.is_infinite()
    }

    /// Half-open containment `birth <= t < death`.
    pub fn contains(&self, t: f64) -> bool {
        self.birth <= t && t < self.death
    }
}

/// Bars in homology dimensions 0 and 1, each sorted by `(birth, death)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PersistenceDiagram {
    pub h0: Vec<Bar>,
    pub h1: Vec<Bar>,
}

impl PersistenceDiagram {
    pub fn new(mut h0: Vec<Bar>, mut h1: Vec<Bar>) -> Self {
        sort_bars(&mut h0);
        sort_bars(&mut h1);
        Self { h0, h1 }
    }

    pub fn dim(&self, k: usize) -> &[Bar] {
        match k {
            0 => &self.h0,
            1 => &self.h1,
            _ => &[],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.h0.is_empty() && self.h1.is_empty()
    }

    pub fn bars(&self) -> impl Iterator<Item = &Bar> {
        self.h0.iter().chain(&self.h1)
    }

    /// `{"h0": [[b, d], …], "h1": …}` with `null` for an infinite death and
    /// every number printed with 17 significant digits.
    pub fn to_json(&self) -> String {
        let render = |bars: &[Bar]| {
            let items: Vec<String> = bars
                .iter()
                .map(|b| {
                    let death = if b.death.is_infinite() {
                        "null".to_string()
                    } else {
                        g17(b.death)
                    };
                    format!("[{},{}]", g17(b.birth), death)
                })
                .collect();
            format!("[{}]", items.join(","))
        };
        format!("{{\"h0\":{},\"h1\":{}}}", render(&self.h0), render(&self.h1))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Raw {
            h0: Vec<(f64, Option<f64>)>,
            h1: Vec<(f64, Option<f64>)>,
        }
        let raw: Raw = serde_json::from_str(text).map_err(|e| Error::Format {
            offset: e.column() as u64,
            msg: e.to_string(),
        })?;
        let conv = |v: Vec<(f64, Option<f64>)>| {
            v.into_iter()
                .map(|(b, d)| Bar::new(b, d.unwrap_or(f64::INFINITY)))
                .collect()
        };
        Ok(Self::new(conv(raw.h0), conv(raw.h1)))
    }
}

fn sort_bars(bars: &mut [Bar]) {
    bars.sort_by(|a, b| a.birth.total_cmp(&b.birth).then(a.death.total_cmp(&b.death)));
}

/// Birth/death pairing of a reduced boundary matrix, in filtration positions.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Pairing {
    pub pairs: Vec<(usize, usize)>,
    pub essential: Vec<usize>,
}

/// `a ^= b` for sorted sparse Z/2 columns.
fn add_column(a: &mut Vec<usize>, b: &[usize], scratch: &mut Vec<usize>) {
    scratch.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                scratch.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                scratch.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    scratch.extend_from_slice(&a[i..]);
    scratch.extend_from_slice(&b[j..]);
    std::mem::swap(a, scratch);
}

/// Left-to-right reduction: add earlier columns with the same lowest entry
/// until every nonzero column has a distinct low.
pub fn reduce_standard(cx: &FilteredComplex) -> Pairing {
    let n = cx.len();
    let mut columns: Vec<Vec<usize>> = (0..n).map(|j| cx.column(j).to_vec()).collect();
    let mut owner = vec![usize::MAX; n];
    let mut scratch = Vec::new();
    let mut paired = vec![false; n];
    let mut pairs = Vec::new();
    for j in 0..n {
        let mut col = std::mem::take(&mut columns[j]);
        while let Some(&low) = col.last() {
            let k = owner[low];
            if k == usize::MAX {
                break;
            }
            add_column(&mut col, &columns[k], &mut scratch);
        }
        if let Some(&low) = col.last() {
            owner[low] = j;
            paired[low] = true;
            paired[j] = true;
            pairs.push((low, j));
        }
        columns[j] = col;
    }
    let essential = (0..n).filter(|&j| !paired[j]).collect();
    pairs.sort_unstable();
    Pairing { pairs, essential }
}

/// Reduction with clearing: columns are processed from the top dimension
/// down, and a column known to be a birth (the low of a reduced column one
/// dimension up) is zeroed without work. Same pairing as
/// [`reduce_standard`].
pub fn reduce_clearing(cx: &FilteredComplex) -> Pairing {
    let n = cx.len();
    let top = cx.max_dim().unwrap_or(0);
    let mut columns: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut owner = vec![usize::MAX; n];
    let mut cleared = vec![false; n];
    let mut paired = vec![false; n];
    let mut pairs = Vec::new();
    let mut scratch = Vec::new();
    for dim in (1..=top).rev() {
        for j in 0..n {
            if cx.cells()[j].dim != dim || cleared[j] {
                continue;
            }
            let mut col = cx.column(j).to_vec();
            while let Some(&low) = col.last() {
                let k = owner[low];
                if k == usize::MAX {
                    break;
                }
                add_column(&mut col, &columns[k], &mut scratch);
            }
            if let Some(&low) = col.last() {
                owner[low] = j;
                cleared[low] = true;
                paired[low] = true;
                paired[j] = true;
                pairs.push((low, j));
            }
            columns[j] = col;
        }
    }
    let essential = (0..n).filter(|&j| !paired[j]).collect();
    pairs.sort_unstable();
    Pairing { pairs, essential }
}

/// Turns a pairing into a diagram, reporting filtration values and dropping
/// zero-persistence pairs. Only dimensions 0 and 1 are kept.
pub fn diagram_from_pairing(cx: &FilteredComplex, pairing: &Pairing) -> PersistenceDiagram {
    let cells = cx.cells();
    let mut h = [Vec::new(), Vec::new()];
    for &(b, d) in &pairing.pairs {
        let (birth, death) = (cells[b].value, cells[d].value);
        let k = cells[b].dim as usize;
        if k < 2 && birth != death {
            h[k].push(Bar::new(birth, death));
        }
    }
    for &e in &pairing.essential {
        let k = cells[e].dim as usize;
        if k < 2 {
            h[k].push(Bar::new(cells[e].value, f64::INFINITY));
        }
    }
    let [h0, h1] = h;
    PersistenceDiagram::new(h0, h1)
}

/// Persistence diagram of a filtered complex.
///
/// The complex must list every face before its cofaces with non-decreasing
/// values along the way; anything else is a contract error.
pub fn compute_persistence(cx: &FilteredComplex) -> Result<PersistenceDiagram> {
    cx.check_filtration()?;
    for w in cx.cells().windows(2) {
        if w[1].value < w[0].value {
            return Err(Error::Contract(format!(
                "cell {} (value {}) follows cell {} (value {})",
                w[1].id, w[1].value, w[0].id, w[0].value
            )));
        }
    }
    Ok(diagram_from_pairing(cx, &reduce_clearing(cx)))
}

/// Replaces every infinite death by `replacement`.
pub fn finitize(pd: &PersistenceDiagram, replacement: f64) -> Result<PersistenceDiagram> {
    if let Some(v) = pd
        .bars()
        .flat_map(|b| [b.birth, b.death])
        .filter(|v| v.is_finite())
        .find(|&v| v > replacement)
    {
        return Err(Error::Param(format!(
            "replacement {replacement} is below diagram value {v}"
        )));
    }
    let fix = |bars: &[Bar]| {
        bars.iter()
            .map(|b| {
                if b.is_essential() {
                    Bar::new(b.birth, replacement)
                } else {
                    *b
                }
            })
            .collect()
    };
    Ok(PersistenceDiagram::new(fix(&pd.h0), fix(&pd.h1)))
}
