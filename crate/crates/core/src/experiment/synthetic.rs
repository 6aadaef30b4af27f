//! Filled and hollow squares: a benchmark with a known topological signal.

use rand::Rng;

use crate::error::{Error, Result};
use crate::imaging::BinaryImage;
use crate::stream_rng;

pub const CANVAS: usize = 24;
pub const SQUARE: usize = 15;

/// `count_per_class` images of each kind, interleaved: even indices hold a
/// filled `SQUARE × SQUARE` block (label 0), odd ones its one-pixel outline
/// (label 1), each at a uniformly random position on a `CANVAS` grid.
pub fn squares(count_per_class: usize, seed: u64) -> Result<(Vec<BinaryImage>, Vec<u8>)> {
    squares_on(CANVAS, SQUARE, count_per_class, seed)
}

pub fn squares_on(
    canvas: usize,
    square: usize,
    count_per_class: usize,
    seed: u64,
) -> Result<(Vec<BinaryImage>, Vec<u8>)> {
    if square < 3 || square > canvas {
        return Err(Error::Param(format!(
            "square {square} does not fit canvas {canvas} with a hole"
        )));
    }
    let mut images = Vec::with_capacity(2 * count_per_class);
    let mut labels = Vec::with_capacity(2 * count_per_class);
    for i in 0..2 * count_per_class {
        let mut rng = stream_rng(seed, i as u64);
        let (x0, y0) = (rng.gen_range(0..=canvas - square), rng.gen_range(0..=canvas - square));
        let hollow = i % 2 == 1;
        let mut img = BinaryImage::new(canvas, canvas, vec![0; canvas * canvas])?;
        for y in y0..y0 + square {
            for x in x0..x0 + square {
                let edge = x == x0 || y == y0 || x == x0 + square - 1 || y == y0 + square - 1;
                img.set(x, y, edge || !hollow);
            }
        }
        images.push(img);
        labels.push(u8::from(hollow));
    }
    Ok((images, labels))
}
