use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitMatrix;
use crate::error::{Error, Result};
use crate::stream_rng;

use super::gadget::{bit_decomp, flatten, powers_of_2};
use super::GswParams;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SecretKey {
    pub params: GswParams,
    /// `s ∈ Z_q^n`.
    pub s: Vec<u64>,
    /// `(1, -s_1, …, -s_n) mod q`.
    pub t: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublicKey {
    pub params: GswParams,
    /// `m x (n+1)` row-major; `A·t = e (mod q)` with small `e`.
    pub a: Vec<u64>,
}

impl PublicKey {
    pub fn row(&self, i: usize) -> &[u64] {
        let w = self.params.n + 1;
        &self.a[i * w..(i + 1) * w]
    }

    /// `A·t mod q` as centered representatives in `[-q/2, q/2)`.
    pub fn noise(&self, sk: &SecretKey) -> Vec<i64> {
        let mask = self.params.mask();
        (0..self.params.m)
            .map(|i| {
                let dot = self
                    .row(i)
                    .iter()
                    .zip(&sk.t)
                    .fold(0u64, |acc, (&a, &t)| acc.wrapping_add(a.wrapping_mul(t)))
                    & mask;
                centered(dot, self.params.q)
            })
            .collect()
    }
}

/// Centered representative of `x mod q` in `[-q/2, q/2)`.
pub fn centered(x: u64, q: u64) -> i64 {
    let x = x & (q - 1);
    if x >= q / 2 {
        -((q - x) as i64)
    } else {
        x as i64
    }
}

/// An `N x N` binary ciphertext together with the parameters it was made under.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ciphertext {
    pub bits: BitMatrix,
    pub params: GswParams,
}

impl Ciphertext {
    pub fn side(&self) -> usize {
        self.bits.rows()
    }
}

pub fn keygen(params: &GswParams, seed: u64) -> Result<(SecretKey, PublicKey)> {
    params.validate()?;
    let mut rng = stream_rng(seed, u64::MAX);
    let (n, m, q, mask) = (params.n, params.m, params.q, params.mask());

    let s: Vec<u64> = (0..n).map(|_| rng.gen::<u64>() & mask).collect();
    let mut t = Vec::with_capacity(n + 1);
    t.push(1);
    t.extend(s.iter().map(|&x| x.wrapping_neg() & mask));

    let bound = params.error_bound as i64;
    let mut a = Vec::with_capacity(m * (n + 1));
    for _ in 0..m {
        let row: Vec<u64> = (0..n).map(|_| rng.gen::<u64>() & mask).collect();
        let e = rng.gen_range(-bound..=bound);
        let b = row
            .iter()
            .zip(&s)
            .fold(e as u64, |acc, (&x, &si)| acc.wrapping_add(x.wrapping_mul(si)))
            & mask;
        a.push(b);
        a.extend(row);
    }
    debug_assert!(q >= 2);
    Ok((SecretKey { params: *params, s, t }, PublicKey { params: *params, a }))
}

/// Encrypts `mu` with randomness derived from `seed`.
pub fn encrypt(pk: &PublicKey, mu: u8, seed: u64) -> Result<Ciphertext> {
    encrypt_with(pk, mu, &mut stream_rng(seed, 0))
}

/// `Flatten(mu·I_N + BitDecomp(R·A))` with `R` uniform over `{0,1}^{N x m}`.
pub(crate) fn encrypt_with<R: Rng>(pk: &PublicKey, mu: u8, rng: &mut R) -> Result<Ciphertext> {
    if mu > 1 {
        return Err(Error::Param(format!("plaintext {mu} is not a bit")));
    }
    let p = &pk.params;
    let width = p.n + 1;
    let mut rows = Vec::with_capacity(p.side);
    for i in 0..p.side {
        let mut acc = vec![0u64; width];
        for k in 0..p.m {
            if rng.gen::<bool>() {
                for (dst, &x) in acc.iter_mut().zip(pk.row(k)) {
                    *dst = dst.wrapping_add(x);
                }
            }
        }
        let mut row: Vec<u64> = bit_decomp(&acc, p).into_iter().map(u64::from).collect();
        row[i] += u64::from(mu);
        rows.push(row);
    }
    Ok(Ciphertext {
        bits: flatten(&rows, p)?,
        params: *p,
    })
}

pub fn decrypt(sk: &SecretKey, ct: &Ciphertext) -> Result<u8> {
    let p = &sk.params;
    if ct.params != *p || ct.bits.rows() != p.side || ct.bits.cols() != p.side {
        return Err(Error::Shape(format!(
            "ciphertext {}x{} under {:?} does not match key parameters {:?}",
            ct.bits.rows(),
            ct.bits.cols(),
            ct.params,
            p
        )));
    }
    let v = powers_of_2(&sk.t, p);
    let (q, mask) = (p.q, p.mask());
    let i = v
        .iter()
        .position(|&x| 4 * u128::from(x) > u128::from(q) && 2 * u128::from(x) <= u128::from(q))
        .expect("t[0] = 1 always yields the q/2 entry");
    let x = ct
        .bits
        .row(i)
        .iter()
        .zip(&v)
        .filter(|(&b, _)| b == 1)
        .fold(0u64, |acc, (_, &vj)| acc.wrapping_add(vj))
        & mask;
    // round(x / v_i) mod 2
    let (x, vi) = (u128::from(x), u128::from(v[i]));
    Ok(((2 * x + vi) / (2 * vi) % 2) as u8)
}
