use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::complexes::build_cubical_filtration;
use crate::error::{Error, Result};
use crate::fmt::g17;
use crate::imaging::{height_filtration, radial_filtration, BinaryImage, Center, Direction, GrayImage};
use crate::persistence::{compute_persistence, finitize, PersistenceDiagram};

use super::{
    betti_curve, bottleneck_amplitude, heat_kernel, lp_amplitude, persistence_entropy, wasserstein_amplitude, Norm,
    Range,
};

/// A filtration applied to the binary image before computing persistence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FiltrationSpec {
    /// Height along `direction` (normalized internally).
    Height { direction: [f64; 2] },
    /// Radial from `center`, or from the middle pixel when absent.
    Radial {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<[i64; 2]>,
    },
}

impl FiltrationSpec {
    pub fn height(x: f64, y: f64) -> Self {
        FiltrationSpec::Height { direction: [x, y] }
    }

    pub fn radial(x: i64, y: i64) -> Self {
        FiltrationSpec::Radial { center: Some([x, y]) }
    }

    pub fn radial_middle() -> Self {
        FiltrationSpec::Radial { center: None }
    }

    pub fn apply(&self, img: &BinaryImage) -> Result<GrayImage> {
        match *self {
            FiltrationSpec::Height { direction: [x, y] } => Ok(height_filtration(img, Direction::new(x, y)?)),
            FiltrationSpec::Radial { center } => {
                let c = match center {
                    Some([x, y]) => Center::new(x, y),
                    None => Center::middle(img.width(), img.height()),
                };
                radial_filtration(img, c)
            }
        }
    }

    /// Value range of the filtration over a `width x height` grid, used as
    /// the default Betti-curve window.
    pub fn grid_range(&self, width: usize, height: usize) -> Result<Range> {
        let full = BinaryImage::new(width, height, vec![1; width * height])?;
        let g = self.apply(&full)?;
        let lo = g.values().iter().copied().fold(f64::INFINITY, f64::min);
        let hi = g.max_value();
        if lo < hi {
            Range::new(lo, hi)
        } else {
            Range::new(lo, lo + 1.0)
        }
    }
}

impl fmt::Display for FiltrationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiltrationSpec::Height { direction: [x, y] } => write!(f, "height({x};{y})"),
            FiltrationSpec::Radial { center: Some([x, y]) } => write!(f, "radial({x};{y})"),
            FiltrationSpec::Radial { center: None } => write!(f, "radial(mid)"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum VectorizerSpec {
    Entropy,
    Amplitude {
        norm: Norm,
    },
    Wasserstein {
        p: f64,
    },
    Bottleneck,
    /// `samples` points over `range`, or over the filtration's value range.
    BettiCurve {
        samples: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        range: Option<[f64; 2]>,
    },
    /// L2 norm of the heat-kernel image.
    HeatKernel {
        sigma: f64,
        resolution: usize,
    },
}

impl VectorizerSpec {
    pub fn width(&self) -> usize {
        match self {
            VectorizerSpec::BettiCurve { samples, .. } => *samples,
            _ => 1,
        }
    }
}

impl fmt::Display for VectorizerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VectorizerSpec::Entropy => write!(f, "entropy"),
            VectorizerSpec::Amplitude { norm: Norm::L1 } => write!(f, "amplitude_l1"),
            VectorizerSpec::Amplitude { norm: Norm::L2 } => write!(f, "amplitude_l2"),
            VectorizerSpec::Wasserstein { p } => write!(f, "wasserstein_p{p}"),
            VectorizerSpec::Bottleneck => write!(f, "bottleneck"),
            VectorizerSpec::BettiCurve { samples, .. } => write!(f, "betti{samples}"),
            VectorizerSpec::HeatKernel { sigma, resolution } => write!(f, "heat_s{sigma}_r{resolution}"),
        }
    }
}

/// Which features to compute: every filtration × homology dimension ×
/// vectorizer, concatenated in that order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureSchema {
    pub filtrations: Vec<FiltrationSpec>,
    #[serde(default = "default_dims")]
    pub dims: Vec<usize>,
    #[serde(default = "default_vectorizers")]
    pub vectorizers: Vec<VectorizerSpec>,
}

fn default_dims() -> Vec<usize> {
    vec![0, 1]
}

fn default_vectorizers() -> Vec<VectorizerSpec> {
    vec![VectorizerSpec::Entropy]
}

impl Default for FeatureSchema {
    /// Height along `(-1, 1)` and radial from the middle, entropy of H0 and
    /// H1: four features.
    fn default() -> Self {
        Self::entropy(vec![FiltrationSpec::height(-1.0, 1.0), FiltrationSpec::radial_middle()])
    }
}

/// One column of a feature vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FeatureKey {
    pub filtration: String,
    pub dim: usize,
    pub vectorizer: String,
    pub component: usize,
}

impl fmt::Display for FeatureKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.h{}.{}", self.filtration, self.dim, self.vectorizer)?;
        if self.vectorizer.starts_with("betti") {
            write!(f, ".{}", self.component)?;
        }
        Ok(())
    }
}

impl FeatureSchema {
    pub fn entropy(filtrations: Vec<FiltrationSpec>) -> Self {
        Self {
            filtrations,
            dims: default_dims(),
            vectorizers: default_vectorizers(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let schema: Self = serde_json::from_str(text).map_err(|e| Error::Config(format!("feature schema: {e}")))?;
        schema.validate()?;
        Ok(schema)
    }

    pub fn validate(&self) -> Result<()> {
        if self.filtrations.is_empty() || self.dims.is_empty() || self.vectorizers.is_empty() {
            return Err(Error::Config("schema needs filtrations, dims and vectorizers".into()));
        }
        if let Some(d) = self.dims.iter().find(|&&d| d > 1) {
            return Err(Error::Config(format!("homology dimension {d} is not computed")));
        }
        for v in &self.vectorizers {
            let ok = match *v {
                VectorizerSpec::Wasserstein { p } => p >= 1.0,
                VectorizerSpec::BettiCurve { samples, range } => samples >= 2 && range.is_none_or(|[a, b]| a < b),
                VectorizerSpec::HeatKernel { sigma, resolution } => sigma > 0.0 && resolution >= 2,
                _ => true,
            };
            if !ok {
                return Err(Error::Config(format!("invalid vectorizer settings: {v:?}")));
            }
        }
        for f in &self.filtrations {
            if let FiltrationSpec::Height { direction: [x, y] } = f {
                Direction::new(*x, *y).map_err(|e| Error::Config(e.to_string()))?;
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.filtrations.len() * self.block_len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn block_len(&self) -> usize {
        self.dims.len() * self.vectorizers.iter().map(VectorizerSpec::width).sum::<usize>()
    }

    pub fn keys(&self) -> Vec<FeatureKey> {
        let mut keys = Vec::with_capacity(self.len());
        for f in &self.filtrations {
            for &dim in &self.dims {
                for v in &self.vectorizers {
                    for component in 0..v.width() {
                        keys.push(FeatureKey {
                            filtration: f.to_string(),
                            dim,
                            vectorizer: v.to_string(),
                            component,
                        });
                    }
                }
            }
        }
        keys
    }

    pub fn column_names(&self) -> Vec<String> {
        self.keys().iter().map(ToString::to_string).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub schema: Vec<FeatureKey>,
}

/// Cubical persistence of one filtered image, with essential classes closed
/// off at the image's maximum value.
pub fn finite_diagram(gray: &GrayImage) -> Result<PersistenceDiagram> {
    let pd = compute_persistence(&build_cubical_filtration(gray))?;
    finitize(&pd, gray.max_value())
}

/// The features one filtration contributes, in schema order.
pub fn filtration_block(
    img: &BinaryImage,
    filtration: &FiltrationSpec,
    dims: &[usize],
    vectorizers: &[VectorizerSpec],
) -> Result<Vec<f64>> {
    let gray = filtration.apply(img)?;
    let pd = finite_diagram(&gray)?;
    let mut out = Vec::new();
    for &k in dims {
        for v in vectorizers {
            match *v {
                VectorizerSpec::Entropy => out.push(persistence_entropy(&pd, k)),
                VectorizerSpec::Amplitude { norm } => out.push(lp_amplitude(&pd, k, norm)),
                VectorizerSpec::Wasserstein { p } => out.push(wasserstein_amplitude(&pd, k, p)?),
                VectorizerSpec::Bottleneck => out.push(bottleneck_amplitude(&pd, k)),
                VectorizerSpec::BettiCurve { samples, range } => {
                    let range = match range {
                        Some([a, b]) => Range::new(a, b)?,
                        None => filtration.grid_range(img.width(), img.height())?,
                    };
                    out.extend(betti_curve(&pd, k, samples, range)?.samples);
                }
                VectorizerSpec::HeatKernel { sigma, resolution } => {
                    out.push(heat_kernel(&pd, k, sigma, resolution, None)?.l2_norm())
                }
            }
        }
    }
    Ok(out)
}

pub fn extract_features(img: &BinaryImage, schema: &FeatureSchema) -> Result<FeatureVector> {
    schema.validate()?;
    let mut values = Vec::with_capacity(schema.len());
    for f in &schema.filtrations {
        values.extend(filtration_block(img, f, &schema.dims, &schema.vectorizers)?);
    }
    debug_assert_eq!(values.len(), schema.len());
    Ok(FeatureVector {
        values,
        schema: schema.keys(),
    })
}

/// CSV with one row per sample and a trailing `label` column; numbers use
/// 17 significant digits.
pub fn write_feature_csv<W: Write>(out: W, columns: &[String], rows: &[(Vec<f64>, u8)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let to_err = |e: csv::Error| Error::Data(format!("writing CSV: {e}"));
    let mut header: Vec<&str> = columns.iter().map(String::as_str).collect();
    header.push("label");
    w.write_record(&header).map_err(to_err)?;
    for (values, label) in rows {
        if values.len() != columns.len() {
            return Err(Error::Shape(format!(
                "{} values for {} columns",
                values.len(),
                columns.len()
            )));
        }
        let mut record: Vec<String> = values.iter().map(|&v| g17(v)).collect();
        record.push(label.to_string());
        w.write_record(&record).map_err(to_err)?;
    }
    w.flush().map_err(|e| Error::Data(format!("writing CSV: {e}")))
}
