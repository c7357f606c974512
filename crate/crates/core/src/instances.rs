//! Seeded test-instance generators.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_text(rng: &mut impl Rng, n: usize, sigma: u32) -> Vec<u32> {
    (0..n).map(|_| rng.random_range(0..sigma)).collect()
}

/// Two random texts with a shared block and its location.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Planted {
    pub t1: Vec<u32>,
    pub t2: Vec<u32>,
    pub pos1: usize,
    pub pos2: usize,
    pub len: usize,
    /// Offsets inside the block where `t1` was changed.
    pub substitutions: Vec<usize>,
}

/// I.i.d. uniform texts over `[0, sigma)` of lengths `n1`, `n2`; a block of
/// length `len` of `t1` is copied into `t2`, then `k` distinct positions of
/// it are substituted in `t1` with a different symbol.
pub fn planted(rng: &mut impl Rng, n1: usize, n2: usize, len: usize, k: usize, sigma: u32) -> Result<Planted> {
    if sigma < 2 {
        return Err(Error::InvalidParameter(format!("alphabet must have at least 2 symbols, got {sigma}")));
    }
    if len > n1.min(n2) || k > len {
        return Err(Error::InvalidParameter(format!("cannot plant length {len} with {k} mismatches in {n1} x {n2}")));
    }
    let mut t1 = random_text(rng, n1, sigma);
    let mut t2 = random_text(rng, n2, sigma);
    let pos1 = rng.random_range(0..=n1 - len);
    let pos2 = rng.random_range(0..=n2 - len);
    t2[pos2..pos2 + len].copy_from_slice(&t1[pos1..pos1 + len]);
    let mut substitutions = index::sample(rng, len, k).into_vec();
    substitutions.sort_unstable();
    for &q in &substitutions {
        let c = &mut t1[pos1 + q];
        *c = (*c + rng.random_range(1..sigma)) % sigma;
    }
    Ok(Planted { t1, t2, pos1, pos2, len, substitutions })
}
