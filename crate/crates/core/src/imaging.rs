//! Binary and grayscale images, and the height and radial filtrations that
//! turn the former into the latter.
//!
//! Pixel coordinates are `(x, y) = (column, row)`, zero based.

use serde::{Deserialize, Serialize};

use crate::bits::BitMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl BinaryImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Shape("image must be nonempty".into()));
        }
        let m = BitMatrix::from_vec(height, width, pixels)?;
        Ok(Self::from_matrix(&m))
    }

    /// `pixel(x, y) = m[y][x]`.
    pub fn from_matrix(m: &BitMatrix) -> Self {
        Self {
            width: m.cols(),
            height: m.rows(),
            pixels: m.as_slice().to_vec(),
        }
    }

    pub fn to_matrix(&self) -> BitMatrix {
        BitMatrix::from_vec(self.height, self.width, self.pixels.clone()).expect("pixels are bits")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.pixels[y * self.width + x] == 1
    }

    pub fn set(&mut self, x: usize, y: usize, on: bool) {
        self.pixels[y * self.width + x] = u8::from(on);
    }

    pub fn foreground(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.height)
            .flat_map(move |y| (0..self.width).map(move |x| (x, y)))
            .filter(|&(x, y)| self.get(x, y))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrayImage {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 || values.len() != width * height {
            return Err(Error::Shape(format!(
                "{} values for a {width}x{height} image",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data("grayscale values must be finite".into()));
        }
        Ok(Self { width, height, values })
    }

    /// Row-major rows, `rows[y][x]`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let width = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != width) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Self::new(width, rows.len(), rows.concat())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.values.chunks(self.width).map(<[f64]>::to_vec).collect()
    }

    /// JSON array of rows.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.rows()).expect("finite values serialize")
    }
}

/// A unit vector in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    x: f64,
    y: f64,
}

impl Direction {
    /// Normalizes `(x, y)`; the zero vector is rejected.
    pub fn new(x: f64, y: f64) -> Result<Self> {
        let norm = x.hypot(y);
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::Param(format!("direction ({x}, {y}) cannot be normalized")));
        }
        Ok(Self {
            x: x / norm,
            y: y / norm,
        })
    }

    pub fn components(&self) -> (f64, f64) {
        (self.x, self.y)
    }

    #[inline]
    fn dot(&self, x: usize, y: usize) -> f64 {
        x as f64 * self.x + y as f64 * self.y
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Center {
    pub x: i64,
    pub y: i64,
}

impl Center {
    pub fn new(x: i64, y: i64) -> Self {
        Self { x, y }
    }

    /// The middle pixel, rounding down.
    pub fn middle(width: usize, height: usize) -> Self {
        Self::new(((width - 1) / 2) as i64, ((height - 1) / 2) as i64)
    }

    pub fn inside(&self, width: usize, height: usize) -> bool {
        (0..width as i64).contains(&self.x) && (0..height as i64).contains(&self.y)
    }

    #[inline]
    fn distance(&self, x: usize, y: usize) -> f64 {
        ((x as i64 - self.x) as f64).hypot((y as i64 - self.y) as f64)
    }
}

fn corners(width: usize, height: usize) -> [(usize, usize); 4] {
    [(0, 0), (width - 1, 0), (0, height - 1), (width - 1, height - 1)]
}

/// Foreground pixels get `⟨p, v⟩`; background pixels get the maximum of
/// `⟨p, v⟩` over the whole grid, so they enter the sublevel filtration last.
pub fn height_filtration(img: &BinaryImage, dir: Direction) -> GrayImage {
    let (w, h) = (img.width, img.height);
    // a linear function on a box peaks at a corner
    let background = corners(w, h)
        .iter()
        .map(|&(x, y)| dir.dot(x, y))
        .fold(f64::NEG_INFINITY, f64::max);
    let values = (0..h)
        .flat_map(|y| (0..w).map(move |x| (x, y)))
        .map(|(x, y)| if img.get(x, y) { dir.dot(x, y) } else { background })
        .collect();
    GrayImage {
        width: w,
        height: h,
        values,
    }
}

/// Foreground pixels get their Euclidean distance to `c`; background pixels
/// get the largest such distance on the grid.
pub fn radial_filtration(img: &BinaryImage, c: Center) -> Result<GrayImage> {
    let (w, h) = (img.width, img.height);
    if !c.inside(w, h) {
        return Err(Error::Param(format!(
            "center ({}, {}) outside the {w}x{h} grid",
            c.x, c.y
        )));
    }
    let background = corners(w, h)
        .iter()
        .map(|&(x, y)| c.distance(x, y))
        .fold(f64::NEG_INFINITY, f64::max);
    let values = (0..h)
        .flat_map(|y| (0..w).map(move |x| (x, y)))
        .map(|(x, y)| if img.get(x, y) { c.distance(x, y) } else { background })
        .collect();
    Ok(GrayImage {
        width: w,
        height: h,
        values,
    })
}
