//! Persistence diagrams to numbers.
//!
//! All functions here read one homology dimension of a diagram whose deaths
//! are finite (see [`crate::persistence::finitize`]).

mod features;

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::persistence::{Bar, PersistenceDiagram};

pub use features::{
    extract_features, filtration_block, finite_diagram, write_feature_csv, FeatureKey, FeatureSchema, FeatureVector,
    FiltrationSpec, VectorizerSpec,
};

fn lifetimes(bars: &[Bar]) -> impl Iterator<Item = f64> + '_ {
    bars.iter().map(Bar::persistence)
}

/// Shannon entropy (natural log) of the normalized bar lengths,
/// `-Σ (l_i / L) ln(l_i / L)`. Zero for an empty diagram or zero total length.
pub fn persistence_entropy(pd: &PersistenceDiagram, k: usize) -> f64 {
    let bars = pd.dim(k);
    let total: f64 = lifetimes(bars).sum();
    if total <= 0.0 {
        return 0.0;
    }
    let h = -lifetimes(bars)
        .filter(|&l| l > 0.0)
        .map(|l| {
            let p = l / total;
            p * p.ln()
        })
        .sum::<f64>();
    // a single bar gives -0.0
    h.max(0.0) + 0.0
}

/// `(√2/2) (Σ l_i^p)^(1/p)`.
pub fn wasserstein_amplitude(pd: &PersistenceDiagram, k: usize, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::Param(format!("order p={p} must be >= 1")));
    }
    let sum: f64 = lifetimes(pd.dim(k)).map(|l| l.powf(p)).sum();
    Ok(FRAC_1_SQRT_2 * sum.powf(1.0 / p))
}

/// `(√2/2) max_i l_i`, the `p → ∞` limit.
pub fn bottleneck_amplitude(pd: &PersistenceDiagram, k: usize) -> f64 {
    FRAC_1_SQRT_2 * lifetimes(pd.dim(k)).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    L1,
    L2,
}

/// Distance to the empty diagram in the L1 or L2 norm. Agrees with
/// [`wasserstein_amplitude`] at `p = 1, 2`.
pub fn lp_amplitude(pd: &PersistenceDiagram, k: usize, norm: Norm) -> f64 {
    let bars = pd.dim(k);
    let raw = match norm {
        Norm::L1 => lifetimes(bars).sum::<f64>(),
        Norm::L2 => lifetimes(bars).map(|l| l * l).sum::<f64>().sqrt(),
    };
    FRAC_1_SQRT_2 * raw
}

/// Closed interval `[min, max]` with `min < max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub min: f64,
    pub max: f64,
}

impl Range {
    pub fn new(min: f64, max: f64) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) || min >= max {
            return Err(Error::Param(format!("degenerate range [{min}, {max}]")));
        }
        Ok(Self { min, max })
    }

    /// `n` evenly spaced points including both ends.
    pub fn samples(&self, n: usize) -> Vec<f64> {
        let step = (self.max - self.min) / (n - 1) as f64;
        (0..n)
            .map(|i| {
                if i == n - 1 {
                    self.max
                } else {
                    self.min + step * i as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BettiCurve {
    pub range: Range,
    pub samples: Vec<f64>,
}

/// Number of bars `[b, d)` containing each of `n_samples` evenly spaced
/// points of `range`.
pub fn betti_curve(pd: &PersistenceDiagram, k: usize, n_samples: usize, range: Range) -> Result<BettiCurve> {
    if n_samples < 2 {
        return Err(Error::Param(format!("need at least 2 samples, got {n_samples}")));
    }
    let bars = pd.dim(k);
    let samples = range
        .samples(n_samples)
        .into_iter()
        .map(|t| bars.iter().filter(|b| b.contains(t)).count() as f64)
        .collect();
    Ok(BettiCurve { range, samples })
}

/// Heat-kernel image of a diagram sampled on an `r x r` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatGrid {
    pub sigma: f64,
    pub range: Range,
    pub resolution: usize,
    /// `values[i * r + j]` is the kernel at `(x_i, x_j)`; the first axis is
    /// birth, the second death.
    pub values: Vec<f64>,
}

impl HeatGrid {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.resolution + j]
    }

    /// Riemann approximation of the L2 norm of the kernel function.
    pub fn l2_norm(&self) -> f64 {
        let cell = (self.range.max - self.range.min) / (self.resolution - 1) as f64;
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt() * cell
    }

    pub fn max_antisymmetry_error(&self) -> f64 {
        let r = self.resolution;
        (0..r)
            .flat_map(|i| (0..r).map(move |j| (i, j)))
            .map(|(i, j)| (self.get(i, j) + self.get(j, i)).abs())
            .fold(0.0, f64::max)
    }
}

/// Default heat-kernel window: the diagram's bounding box padded by `3σ`,
/// or `[-3σ, 3σ]` when the dimension is empty.
pub fn heat_range(pd: &PersistenceDiagram, k: usize, sigma: f64) -> Range {
    let (lo, hi) = pd
        .dim(k)
        .iter()
        .flat_map(|b| [b.birth, b.death])
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let (lo, hi) = if lo.is_finite() { (lo, hi) } else { (0.0, 0.0) };
    Range {
        min: lo - 3.0 * sigma,
        max: hi + 3.0 * sigma,
    }
}

/// `Σ_points G_σ(· − (b, d)) − G_σ(· − (d, b))` on the grid, with `G_σ` the
/// isotropic 2D Gaussian density. `range = None` uses [`heat_range`].
pub fn heat_kernel(
    pd: &PersistenceDiagram,
    k: usize,
    sigma: f64,
    resolution: usize,
    range: Option<Range>,
) -> Result<HeatGrid> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::Param(format!("sigma={sigma} must be positive")));
    }
    if resolution < 2 {
        return Err(Error::Param(format!("resolution {resolution} < 2")));
    }
    let range = range.unwrap_or_else(|| heat_range(pd, k, sigma));
    let axis = range.samples(resolution);
    let two_var = 2.0 * sigma * sigma;
    let norm = 1.0 / (std::f64::consts::PI * two_var);
    let gauss = |dx: f64, dy: f64| norm * (-(dx * dx + dy * dy) / two_var).exp();
    let bars = pd.dim(k);
    let mut values = Vec::with_capacity(resolution * resolution);
    for &x in &axis {
        for &y in &axis {
            values.push(
                bars.iter()
                    .map(|b| gauss(x - b.birth, y - b.death) - gauss(x - b.death, y - b.birth))
                    .sum(),
            );
        }
    }
    Ok(HeatGrid {
        sigma,
        range,
        resolution,
        values,
    })
}
