//! Toy GSW encryption oracle producing labeled binary ciphertext matrices.

pub mod format;
mod gadget;
mod params;
mod scheme;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BitMatrix;
use crate::error::{Error, Result};
use crate::stream_rng;

pub use gadget::{bit_decomp, bit_decomp_inverse, flatten, powers_of_2};
pub use params::{GswParams, LEAKY_SAMPLES};
pub use scheme::{centered, decrypt, encrypt, keygen, Ciphertext, PublicKey, SecretKey};

/// A labeled bit matrix, the unit the classifiers see.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sample {
    pub label: u8,
    pub bits: BitMatrix,
}

/// A balanced collection of encryptions of 0 and 1 under a single key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CipherDataset {
    pub params: GswParams,
    pub seed: u64,
    pub samples: Vec<Sample>,
}

impl CipherDataset {
    pub fn count_label(&self, label: u8) -> usize {
        self.samples.iter().filter(|s| s.label == label).count()
    }

    pub fn side(&self) -> usize {
        self.params.side
    }
}

/// Generates `count_per_class` encryptions of each bit, interleaved
/// (sample `i` encrypts `i % 2`). The key is derived from `seed`; sample `i`
/// draws from its own stream so the result does not depend on thread count.
pub fn generate_dataset(params: &GswParams, count_per_class: usize, seed: u64) -> Result<CipherDataset> {
    if count_per_class == 0 {
        return Err(Error::Param("count_per_class must be at least 1".into()));
    }
    let (_, pk) = keygen(params, seed)?;
    let samples = (0..2 * count_per_class)
        .into_par_iter()
        .map(|i| {
            let label = (i % 2) as u8;
            let ct = scheme::encrypt_with(&pk, label, &mut stream_rng(seed, i as u64))?;
            Ok(Sample { label, bits: ct.bits })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CipherDataset {
        params: *params,
        seed,
        samples,
    })
}
