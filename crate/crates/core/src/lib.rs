//! Topological data analysis of GSW ciphertexts.
//!
//! The crate reproduces a chosen-plaintext distinguishing experiment end to
//! end: a toy GSW encryption oracle produces square bit matrices, those are
//! read as binary images, height and radial filtrations turn them into
//! grayscale images, cubical persistent homology summarizes each image as a
//! persistence diagram, and vectorizers (entropy, amplitudes, Betti curves,
//! heat kernels) feed from-scratch CART trees and random forests.
//!
//! ```
//! use tdac::gsw::{GswParams, keygen, encrypt, decrypt};
//!
//! let params = GswParams::new(6, 64, None, 1).unwrap();
//! let (sk, pk) = keygen(&params, 7).unwrap();
//! let ct = encrypt(&pk, 1, 11).unwrap();
//! assert_eq!(ct.side(), 42);
//! assert_eq!(decrypt(&sk, &ct).unwrap(), 1);
//! ```

pub mod bits;
pub mod complexes;
pub mod error;
pub mod experiment;
pub mod fmt;
pub mod gsw;
pub mod imaging;
pub mod learn;
pub mod persistence;
pub mod vectorize;

pub use bits::BitMatrix;
pub use complexes::{build_cubical_filtration, build_vr_filtration, Cell, FilteredComplex, PointCloud};
pub use error::{Error, Result};
pub use gsw::{Ciphertext, GswParams, PublicKey, SecretKey};
pub use imaging::{BinaryImage, Center, Direction, GrayImage};
pub use learn::{Dataset, ForestModel, TreeModel};
pub use persistence::{compute_persistence, finitize, Bar, PersistenceDiagram};
pub use vectorize::{extract_features, FeatureSchema, FeatureVector};

/// Derives an independent RNG for item `index` of a seeded batch.
///
/// Every randomized step in the crate goes through this so that serial and
/// parallel execution produce identical bytes.
pub(crate) fn stream_rng(seed: u64, index: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
