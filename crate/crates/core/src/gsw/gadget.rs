//! Binary decomposition primitives of the GSW gadget.
//!
//! Bits are little-endian within each group of `ell`.

use crate::bits::BitMatrix;
use crate::error::{Error, Result};

use super::GswParams;

/// Expands each residue into its `ell` low bits.
pub fn bit_decomp(v: &[u64], params: &GswParams) -> Vec<u8> {
    let ell = params.ell;
    let mut out = Vec::with_capacity(v.len() * ell);
    for &x in v {
        let x = x & params.mask();
        out.extend((0..ell).map(|j| ((x >> j) & 1) as u8));
    }
    out
}

/// `Σ_j 2^j b[i*ell + j] mod q` for each group. Entries need not be bits.
pub fn bit_decomp_inverse(b: &[u64], params: &GswParams) -> Result<Vec<u64>> {
    let ell = params.ell;
    if !b.len().is_multiple_of(ell) {
        return Err(Error::Shape(format!(
            "length {} is not a multiple of ell={ell}",
            b.len()
        )));
    }
    Ok(b.chunks(ell)
        .map(|group| {
            group
                .iter()
                .enumerate()
                .fold(0u64, |acc, (j, &x)| acc.wrapping_add(x.wrapping_shl(j as u32)))
                & params.mask()
        })
        .collect())
}

/// `(v_0, 2 v_0, …, 2^{ell-1} v_0, v_1, …) mod q`.
pub fn powers_of_2(v: &[u64], params: &GswParams) -> Vec<u64> {
    let mut out = Vec::with_capacity(v.len() * params.ell);
    for &x in v {
        out.extend((0..params.ell).map(|j| x.wrapping_shl(j as u32) & params.mask()));
    }
    out
}

/// Rowwise `BitDecomp(BitDecomp⁻¹(row))`.
pub fn flatten(rows: &[Vec<u64>], params: &GswParams) -> Result<BitMatrix> {
    let cols = params.side;
    let mut data = Vec::with_capacity(rows.len() * cols);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::Shape(format!(
                "row {i} has {} columns, expected {cols}",
                row.len()
            )));
        }
        data.extend(bit_decomp(&bit_decomp_inverse(row, params)?, params));
    }
    BitMatrix::from_vec(rows.len(), cols, data)
}
