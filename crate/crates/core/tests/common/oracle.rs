//! Brute-force persistent homology, written against the definitions only.
//!
//! The cubical complex lives on the doubled grid: cell `(i, j)` with
//! `0 <= i <= 2w`, `0 <= j <= 2h` has dimension `(i odd) + (j odd)`, pixels
//! are the `(odd, odd)` cells, and a face takes the minimum over the pixels
//! containing it. Persistent Betti numbers `β_k^{s,t}` are ranks of the maps
//! `H_k(K_s) -> H_k(K_t)` over Z/2, and bar multiplicities follow by
//! inclusion–exclusion. Nothing here calls into the engine.

#![allow(dead_code)]

/// Z/2 vector as a bit set.
#[derive(Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn zeros(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64).max(1)])
    }
    fn unit(n: usize, i: usize) -> Self {
        let mut b = Self::zeros(n);
        b.flip(i);
        b
    }
    fn flip(&mut self, i: usize) {
        self.0[i / 64] ^= 1 << (i % 64);
    }
    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
    fn xor(&mut self, o: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&o.0) {
            *a ^= b;
        }
    }
    fn lowest(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
    }
}

/// Rank over Z/2 by Gaussian elimination.
fn rank(vectors: &[Bits]) -> usize {
    let mut pivots: Vec<(usize, Bits)> = Vec::new();
    for v in vectors {
        let mut v = v.clone();
        while let Some(low) = v.lowest() {
            match pivots.iter().find(|(p, _)| *p == low) {
                Some((_, p)) => v.xor(p),
                None => {
                    pivots.push((low, v));
                    break;
                }
            }
        }
    }
    pivots.len()
}

/// Basis of the kernel of the linear map sending unit vector `j` to
/// `columns[j]` (columns over a space of size `rows`).
fn kernel(columns: &[Bits]) -> Vec<Bits> {
    let n = columns.len();
    // reduce [column | identity] pairs
    let mut reduced: Vec<(Bits, Bits)> = Vec::new();
    let mut basis = Vec::new();
    for (j, c) in columns.iter().enumerate() {
        let mut col = c.clone();
        let mut tag = Bits::unit(n, j);
        loop {
            let Some(low) = col.lowest() else {
                basis.push(tag);
                break;
            };
            match reduced.iter().find(|(r, _)| r.lowest() == Some(low)) {
                Some((r, t)) => {
                    col.xor(r);
                    tag.xor(t);
                }
                None => {
                    reduced.push((col, tag));
                    break;
                }
            }
        }
    }
    basis
}

pub struct Complex {
    /// (dimension, value, boundary as indices into `cells`)
    cells: Vec<(usize, f64, Vec<usize>)>,
}

impl Complex {
    /// Cubical complex of a `w × h` image given row-major as `values[y * w + x]`.
    pub fn cubical(w: usize, h: usize, values: &[f64]) -> Self {
        let (gw, gh) = (2 * w + 1, 2 * h + 1);
        let index = |i: usize, j: usize| j * gw + i;
        let mut cells = Vec::with_capacity(gw * gh);
        for j in 0..gh {
            for i in 0..gw {
                let dim = (i % 2) + (j % 2);
                // pixels containing cell (i, j): odd coordinates within ±1
                let mut value = f64::INFINITY;
                for pj in [j.wrapping_sub(1), j, j + 1] {
                    for pi in [i.wrapping_sub(1), i, i + 1] {
                        let on_grid = pi < gw && pj < gh;
                        let near = on_grid && pi.abs_diff(i) <= 1 && pj.abs_diff(j) <= 1;
                        if near && pi % 2 == 1 && pj % 2 == 1 {
                            value = value.min(values[(pj / 2) * w + pi / 2]);
                        }
                    }
                }
                let mut boundary = Vec::new();
                if i % 2 == 1 {
                    boundary.push(index(i - 1, j));
                    boundary.push(index(i + 1, j));
                }
                if j % 2 == 1 {
                    boundary.push(index(i, j - 1));
                    boundary.push(index(i, j + 1));
                }
                cells.push((dim, value, boundary));
            }
        }
        Complex { cells }
    }

    fn cells_of(&self, dim: usize, t: f64) -> Vec<usize> {
        (0..self.cells.len())
            .filter(|&c| self.cells[c].0 == dim && self.cells[c].1 <= t)
            .collect()
    }

    fn boundary_vectors(&self, cells: &[usize], faces: &[usize]) -> Vec<Bits> {
        let pos = |f: usize| {
            faces
                .iter()
                .position(|&x| x == f)
                .expect("face present in sublevel set")
        };
        cells
            .iter()
            .map(|&c| {
                let mut b = Bits::zeros(faces.len());
                for &f in &self.cells[c].2 {
                    b.flip(pos(f));
                }
                b
            })
            .collect()
    }

    /// `β_k^{s,t}`: rank of `H_k(K_s) -> H_k(K_t)`.
    pub fn persistent_betti(&self, k: usize, s: f64, t: f64) -> usize {
        let faces_t = self.cells_of(k, t);
        let cofaces_t = self.cells_of(k + 1, t);
        let boundaries = self.boundary_vectors(&cofaces_t, &faces_t);
        let cycles_s: Vec<Bits> = {
            let cells_s = self.cells_of(k, s);
            let in_t: Vec<Bits> = cells_s
                .iter()
                .map(|&c| Bits::unit(faces_t.len(), faces_t.iter().position(|&x| x == c).unwrap()))
                .collect();
            if k == 0 {
                in_t
            } else {
                let faces_s = self.cells_of(k - 1, s);
                let d = self.boundary_vectors(&cells_s, &faces_s);
                kernel(&d)
                    .iter()
                    .map(|combo| {
                        let mut v = Bits::zeros(faces_t.len());
                        for (j, u) in in_t.iter().enumerate() {
                            if combo.get(j) {
                                v.xor(u);
                            }
                        }
                        v
                    })
                    .collect()
            }
        };
        let mut both = boundaries.clone();
        both.extend(cycles_s);
        rank(&both) - rank(&boundaries)
    }

    /// Bars `(birth, death)` of dimension `k`, essential ones with infinite
    /// death, sorted.
    pub fn bars(&self, k: usize) -> Vec<(f64, f64)> {
        let mut values: Vec<f64> = self.cells.iter().map(|c| c.1).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        let m = values.len();
        // beta(i, j) with 1-based indices, 0 meaning the empty complex
        let beta = |i: usize, j: usize| -> i64 {
            if i == 0 {
                0
            } else {
                self.persistent_betti(k, values[i - 1], values[j - 1]) as i64
            }
        };
        let mut out = Vec::new();
        for i in 1..=m {
            for j in i + 1..=m {
                let mu = beta(i, j - 1) - beta(i, j) - beta(i - 1, j - 1) + beta(i - 1, j);
                assert!(mu >= 0, "negative multiplicity");
                out.extend(std::iter::repeat_n((values[i - 1], values[j - 1]), mu as usize));
            }
            let essential = beta(i, m) - beta(i - 1, m);
            out.extend(std::iter::repeat_n((values[i - 1], f64::INFINITY), essential as usize));
        }
        out.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        out
    }
}

/// Number of connected components of the graph on `points` with an edge
/// whenever two points are at distance `<= 2 * eps`.
pub fn components_at(points: &[Vec<f64>], eps: f64) -> usize {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            let d = points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            if d <= 2.0 * eps {
                let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    (0..n).filter(|&i| root(&mut parent, i) == i).count()
}

/// Height filtration values computed from scratch: `<p, v/|v|>` on the
/// foreground, the grid maximum on the background.
pub fn height_values(w: usize, h: usize, fg: &[bool], v: (f64, f64)) -> Vec<f64> {
    let norm = (v.0 * v.0 + v.1 * v.1).sqrt();
    let f = |x: usize, y: usize| (x as f64) * (v.0 / norm) + (y as f64) * (v.1 / norm);
    let top = (0..h)
        .flat_map(|y| (0..w).map(move |x| (x, y)))
        .map(|(x, y)| f(x, y))
        .fold(f64::NEG_INFINITY, f64::max);
    (0..h * w).map(|i| if fg[i] { f(i % w, i / w) } else { top }).collect()
}

/// Radial filtration values computed from scratch.
pub fn radial_values(w: usize, h: usize, fg: &[bool], c: (i64, i64)) -> Vec<f64> {
    let f = |x: usize, y: usize| {
        let (dx, dy) = (x as i64 - c.0, y as i64 - c.1);
        ((dx * dx + dy * dy) as f64).sqrt()
    };
    let top = (0..h)
        .flat_map(|y| (0..w).map(move |x| (x, y)))
        .map(|(x, y)| f(x, y))
        .fold(f64::NEG_INFINITY, f64::max);
    (0..h * w).map(|i| if fg[i] { f(i % w, i / w) } else { top }).collect()
}
