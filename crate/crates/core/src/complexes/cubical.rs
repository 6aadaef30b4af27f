use crate::imaging::GrayImage;

use super::{Cell, FilteredComplex};

/// Cubical complex of an image, one 2-cube per pixel plus all faces.
///
/// Faces take the minimum value of the pixels containing them, which is what
/// makes every sublevel set a subcomplex.
///
/// Ids: vertices `(x, y)` on the `(w+1) x (h+1)` lattice first, then
/// horizontal edges, vertical edges, and squares, each row-major.
pub fn build_cubical_filtration(img: &GrayImage) -> FilteredComplex {
    let (w, h) = (img.width(), img.height());
    let n_vertices = (w + 1) * (h + 1);
    let n_horizontal = w * (h + 1);
    let n_vertical = (w + 1) * h;

    let vertex = |x: usize, y: usize| y * (w + 1) + x;
    let horizontal = |x: usize, y: usize| n_vertices + y * w + x;
    let vertical = |x: usize, y: usize| n_vertices + n_horizontal + y * (w + 1) + x;
    let square = |x: usize, y: usize| n_vertices + n_horizontal + n_vertical + y * w + x;

    // value of pixel (x, y), or +inf outside the image
    let pixel = |x: isize, y: isize| -> f64 {
        if x < 0 || y < 0 || x >= w as isize || y >= h as isize {
            f64::INFINITY
        } else {
            img.get(x as usize, y as usize)
        }
    };

    let mut cells = Vec::with_capacity(n_vertices + n_horizontal + n_vertical + w * h);
    for y in 0..=h {
        for x in 0..=w {
            let (xi, yi) = (x as isize, y as isize);
            let value = pixel(xi - 1, yi - 1)
                .min(pixel(xi, yi - 1))
                .min(pixel(xi - 1, yi))
                .min(pixel(xi, yi));
            cells.push(Cell::new(vertex(x, y), 0, vec![], value));
        }
    }
    for y in 0..=h {
        for x in 0..w {
            let (xi, yi) = (x as isize, y as isize);
            let value = pixel(xi, yi - 1).min(pixel(xi, yi));
            cells.push(Cell::new(
                horizontal(x, y),
                1,
                vec![vertex(x, y), vertex(x + 1, y)],
                value,
            ));
        }
    }
    for y in 0..h {
        for x in 0..=w {
            let (xi, yi) = (x as isize, y as isize);
            let value = pixel(xi - 1, yi).min(pixel(xi, yi));
            cells.push(Cell::new(
                vertical(x, y),
                1,
                vec![vertex(x, y), vertex(x, y + 1)],
                value,
            ));
        }
    }
    for y in 0..h {
        for x in 0..w {
            cells.push(Cell::new(
                square(x, y),
                2,
                vec![
                    horizontal(x, y),
                    horizontal(x, y + 1),
                    vertical(x, y),
                    vertical(x + 1, y),
                ],
                img.get(x, y),
            ));
        }
    }
    FilteredComplex::from_cells(cells).expect("cubical construction is nested by the min rule")
}
