use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of LWE samples used in leaky mode. A single sample means every row
/// of the masking matrix `R·A` is either zero or one fixed vector, so the
/// plaintext identity shows through in the image.
pub const LEAKY_SAMPLES: usize = 1;

/// Parameters of the toy GSW scheme.
///
/// `side = (n + 1) * ell` is the side of every ciphertext matrix and
/// `ell = log2 q`. Decryption is guaranteed whenever the accumulated noise
/// `m * error_bound` stays below `q / 4`; [`GswParams::validate`] enforces
/// exactly that.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GswParams {
    pub n: usize,
    pub q: u64,
    pub ell: usize,
    pub m: usize,
    pub side: usize,
    pub error_bound: u64,
}

impl GswParams {
    /// Validated parameters. `m = None` picks the default sample count:
    /// `2 * side` capped so that decryption stays correct.
    pub fn new(n: usize, q: u64, m: Option<usize>, error_bound: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Param("lattice dimension n must be positive".into()));
        }
        if q < 2 || !q.is_power_of_two() {
            return Err(Error::Param(format!("modulus q={q} must be a power of two >= 2")));
        }
        let ell = q.trailing_zeros() as usize;
        let side = (n + 1) * ell;
        let m = match m {
            Some(m) => m,
            None => default_samples(side, q, error_bound),
        };
        let params = Self {
            n,
            q,
            ell,
            m,
            side,
            error_bound,
        };
        params.validate()?;
        Ok(params)
    }

    /// Noiseless binary-modulus parameters with a single LWE sample; the
    /// distinguisher is expected to succeed here.
    pub fn leaky(n: usize) -> Result<Self> {
        Self::new(n, 2, Some(LEAKY_SAMPLES), 0)
    }

    /// The default honest setting for a given `n`: `q = 2^n`, noise bound 1,
    /// so ciphertexts are roughly `n^2 x n^2`.
    pub fn honest(n: usize) -> Result<Self> {
        if n >= 64 {
            return Err(Error::Param(format!("q = 2^{n} does not fit in 64 bits")));
        }
        Self::new(n, 1u64 << n, None, 1)
    }

    /// Solves for parameters whose ciphertext side is `side` (or as close as
    /// the honest constraints allow).
    ///
    /// Leaky mode uses `q = 2`, so `n = side - 1` hits the side exactly. Honest
    /// mode keeps noise bound 1, needs `q >= 8` for a nonzero sample budget,
    /// and prefers the `(n, ell)` pair closest to `side`, then the squarest
    /// one (`ell` near `n`), then the smallest `n`.
    pub fn for_side(side: usize, leaky: bool) -> Result<Self> {
        if leaky {
            if side < 2 {
                return Err(Error::Param(format!("side {side} too small")));
            }
            return Self::leaky(side - 1);
        }
        if side < 6 {
            return Err(Error::Param(format!(
                "side {side} too small for honest parameters (need ell >= 3, n >= 1)"
            )));
        }
        let mut best: Option<(usize, usize, usize, usize)> = None;
        for ell in 3..=62usize {
            for n in 1..=side {
                let got = (n + 1) * ell;
                let key = (got.abs_diff(side), ell.abs_diff(n), n, ell);
                if best.is_none_or(|b| key < b) {
                    best = Some(key);
                }
                if got > side {
                    break;
                }
            }
        }
        let (_, _, n, ell) = best.expect("search space is nonempty");
        Self::new(n, 1u64 << ell, None, 1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 {
            return Err(Error::Param("n and m must be positive".into()));
        }
        if self.q < 2 || !self.q.is_power_of_two() {
            return Err(Error::Param(format!(
                "modulus q={} must be a power of two >= 2",
                self.q
            )));
        }
        if self.ell != self.q.trailing_zeros() as usize || self.side != (self.n + 1) * self.ell {
            return Err(Error::Param("ell/side inconsistent with n and q".into()));
        }
        // the decryption row carries q/2, so the noise must stay under q/4
        let noise = (self.m as u128) * u128::from(self.error_bound);
        if 4 * noise >= u128::from(self.q) && self.error_bound > 0 {
            return Err(Error::Param(format!(
                "noise budget m*B = {noise} must be < q/4 = {}",
                self.q as f64 / 4.0
            )));
        }
        Ok(())
    }

    pub fn is_leaky(&self) -> bool {
        self.error_bound == 0
    }

    #[inline]
    pub(crate) fn mask(&self) -> u64 {
        self.q - 1
    }
}

fn default_samples(side: usize, q: u64, error_bound: u64) -> usize {
    let wanted = 2 * side;
    if error_bound == 0 {
        return wanted;
    }
    // largest m with 4 * m * B < q
    let budget = (q - 1) / (4 * error_bound);
    wanted.min(budget as usize)
}
