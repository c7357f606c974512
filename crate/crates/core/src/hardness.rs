//! Orthogonal-vectors gadgets.
//!
//! Each bit becomes a 7-character block: `μ(0) = 0111000`, `μ(1) = 0001000`,
//! `τ(0) = 0011000`, `τ(1) = 1111000`, and the padding block is
//! `γ = 1001000`. Blocks of `μ` and `τ` differ in one position unless both
//! bits are one, where they differ in three; so `d_H(μ(U), τ(V)) = d + 2·U·V`.
//! With `H = γ^d`, the texts `H^q μ(U₁) H^q … μ(U_N) H^q` and
//! `H^q τ(U₁) H^q … τ(U_N) H^q` share a length-`(14q+7)d` substring pair with
//! `d` mismatches iff the vectors contain an orthogonal pair, and otherwise no
//! pair of length `(7q+14)d` does.

use std::fmt::Write as _;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::lcs_k_diagonal;

const MU: [&[u32; 7]; 2] = [&[0, 1, 1, 1, 0, 0, 0], &[0, 0, 0, 1, 0, 0, 0]];
const TAU: [&[u32; 7]; 2] = [&[0, 0, 1, 1, 0, 0, 0], &[1, 1, 1, 1, 0, 0, 0]];
const GAMMA: [u32; 7] = [1, 0, 0, 1, 0, 0, 0];

/// Largest instance [`verify_gap`] accepts.
pub const ORACLE_MAX_VECTORS: usize = 12;
pub const ORACLE_MAX_DIM: usize = 6;
pub const ORACLE_MAX_Q: usize = 3;

fn encode(v: &[u8], blocks: [&[u32; 7]; 2]) -> Result<Vec<u32>> {
    let mut out = Vec::with_capacity(7 * v.len());
    for (pos, &bit) in v.iter().enumerate() {
        let block = blocks.get(bit as usize).ok_or(Error::NonBinary { symbol: bit as u32, pos })?;
        out.extend_from_slice(*block);
    }
    Ok(out)
}

pub fn mu(v: &[u8]) -> Result<Vec<u32>> {
    encode(v, MU)
}

pub fn tau(v: &[u8]) -> Result<Vec<u32>> {
    encode(v, TAU)
}

/// `H = γ^d`.
pub fn gadget(d: usize) -> Vec<u32> {
    GAMMA.repeat(d)
}

/// `N` binary vectors of a common dimension `d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OvInstance {
    vectors: Vec<Vec<u8>>,
}

impl OvInstance {
    pub fn new(vectors: Vec<Vec<u8>>) -> Result<Self> {
        if vectors.len() < 2 {
            return Err(Error::InvalidParameter(format!("need at least 2 vectors, got {}", vectors.len())));
        }
        let d = vectors[0].len();
        if d == 0 {
            return Err(Error::InvalidParameter("vector dimension must be at least 1".into()));
        }
        for v in &vectors {
            if v.len() != d {
                return Err(Error::LengthMismatch { left: d, right: v.len() });
            }
            if let Some((pos, &b)) = v.iter().enumerate().find(|(_, &b)| b > 1) {
                return Err(Error::NonBinary { symbol: b as u32, pos });
            }
        }
        Ok(OvInstance { vectors })
    }

    /// Uniformly random bits.
    pub fn random(n: usize, d: usize, rng: &mut impl Rng) -> Result<Self> {
        Self::new((0..n).map(|_| (0..d).map(|_| rng.random_range(0..2u8)).collect()).collect())
    }

    /// The `i`-th instance of `N` vectors of dimension `d`, reading the bits
    /// of `i` row by row (least significant first); `i < 2^(N·d)`.
    pub fn enumerate(n: usize, d: usize, i: u64) -> Result<Self> {
        Self::new((0..n).map(|r| (0..d).map(|c| ((i >> (r * d + c)) & 1) as u8).collect()).collect())
    }

    pub fn vectors(&self) -> &[Vec<u8>] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].len()
    }

    /// One vector per line as `0`/`1` characters.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in &self.vectors {
            for &b in v {
                out.push(if b == 1 { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }

    /// Inverse of [`Self::to_text`]; blank lines and surrounding spaces are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut vectors = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let mut row = Vec::with_capacity(line.len());
            for (pos, c) in line.chars().enumerate() {
                match c {
                    '0' => row.push(0),
                    '1' => row.push(1),
                    other => return Err(Error::NonBinary { symbol: other as u32, pos }),
                }
            }
            vectors.push(row);
        }
        Self::new(vectors)
    }
}

/// The two gadget texts with their thresholds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GadgetInstance {
    pub t1: Vec<u32>,
    pub t2: Vec<u32>,
    pub k: usize,
    pub q: usize,
    /// Guaranteed length when an orthogonal pair exists: `(14q+7)d`.
    pub ell: usize,
    /// Unreachable length when none exists: `(7q+14)d`.
    pub ell_prime: usize,
}

impl GadgetInstance {
    pub fn len(&self) -> usize {
        self.t1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t1.is_empty()
    }

    /// `t1` and `t2` as `0`/`1` character strings.
    pub fn to_strings(&self) -> (String, String) {
        let show = |t: &[u32]| t.iter().map(|&c| if c == 1 { '1' } else { '0' }).collect();
        (show(&self.t1), show(&self.t2))
    }
}

pub fn build_gadget(a: &OvInstance, q: usize) -> Result<GadgetInstance> {
    if q == 0 {
        return Err(Error::InvalidParameter("q must be at least 1".into()));
    }
    let d = a.dim();
    let pad = gadget(d).repeat(q);
    let n = a.len() * (7 * d * q + 7 * d) + 7 * d * q;
    let (mut t1, mut t2) = (Vec::with_capacity(n), Vec::with_capacity(n));
    t1.extend_from_slice(&pad);
    t2.extend_from_slice(&pad);
    for v in a.vectors() {
        t1.extend(mu(v)?);
        t1.extend_from_slice(&pad);
        t2.extend(tau(v)?);
        t2.extend_from_slice(&pad);
    }
    debug_assert_eq!(t1.len(), n);
    Ok(GadgetInstance { t1, t2, k: d, q, ell: (14 * q + 7) * d, ell_prime: (7 * q + 14) * d })
}

/// First orthogonal pair `(i, j)` with `i < j`, if any.
pub fn ov_bruteforce(a: &OvInstance) -> Option<(usize, usize)> {
    let v = a.vectors();
    (0..v.len()).flat_map(|i| (i + 1..v.len()).map(move |j| (i, j))).find(|&(i, j)| {
        v[i].iter().zip(&v[j]).all(|(&x, &y)| x & y == 0)
    })
}

/// `ℓ / ℓ' = (14q+7)/(7q+14)`.
pub fn gap_ratio(q: usize) -> f64 {
    (14 * q + 7) as f64 / (7 * q + 14) as f64
}

/// `q = ⌈3/ε⌉ − 2` (at least 1), which makes the gap ratio at least `2 − ε`.
pub fn q_for_eps(eps: f64) -> Result<usize> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    Ok(((3.0 / eps).ceil() as i64 - 2).max(1) as usize)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GapReport {
    pub orthogonal: Option<(usize, usize)>,
    /// Exact longest common substring with at most `d` mismatches.
    pub lcs_length: usize,
    pub ell: usize,
    pub ell_prime: usize,
    /// `lcs_length >= ell` for yes-instances, `lcs_length < ell_prime` for no-instances.
    pub holds: bool,
}

/// Builds the gadget and checks the length gap with the exact quadratic solver.
pub fn verify_gap(a: &OvInstance, q: usize) -> Result<GapReport> {
    if a.len() > ORACLE_MAX_VECTORS || a.dim() > ORACLE_MAX_DIM || q > ORACLE_MAX_Q {
        return Err(Error::OracleScaleExceeded(format!(
            "N = {}, d = {}, q = {} (limits {ORACLE_MAX_VECTORS}, {ORACLE_MAX_DIM}, {ORACLE_MAX_Q})",
            a.len(),
            a.dim(),
            q
        )));
    }
    let g = build_gadget(a, q)?;
    let orthogonal = ov_bruteforce(a);
    let lcs_length = lcs_k_diagonal(&g.t1, &g.t2, g.k).len;
    let holds = match orthogonal {
        Some(_) => lcs_length >= g.ell,
        None => lcs_length < g.ell_prime,
    };
    Ok(GapReport { orthogonal, lcs_length, ell: g.ell, ell_prime: g.ell_prime, holds })
}

/// A gadget rendered for files: two lines of `0`/`1`.
pub fn render(g: &GadgetInstance) -> String {
    let (a, b) = g.to_strings();
    let mut out = String::new();
    let _ = writeln!(out, "{a}");
    let _ = writeln!(out, "{b}");
    out
}
