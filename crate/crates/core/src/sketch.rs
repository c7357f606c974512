//! Hamming sketches of every power-of-two window of `T1` and `T2`, and the
//! approximate bounded-mismatch LCP query built on them.
//!
//! A sketch of a window `X` of length `2^e` is the vector of inner products
//! `r_e^i · X mod p` for `λ` sparse random vectors `r_e^i`. Sketches add, so the
//! sketch of any prefix is the sum of the sketches of its power-of-two
//! pieces. Two sketches disagree in a coordinate with probability growing with
//! the Hamming distance of the underlying strings, which the query thresholds
//! at `Δ`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;
use std::sync::Arc;

use crate::budget;
use crate::error::{Error, Result};
use crate::modmath::{correlate_mod, find_prime, is_prime};
use crate::suffix::Side;

pub const DEFAULT_LAMBDA_CONSTANT: f64 = 3.0;

/// How window inner products are computed during the table build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BuildStrategy {
    /// Pick per level by a cost estimate.
    #[default]
    Auto,
    /// Sparse accumulation over the nonzero coordinates.
    Direct,
    /// Floating-point FFT correlation with an exactness check.
    Fft,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SketchConfig {
    /// `c` in `λ = ⌈c ln n / γ²⌉`.
    pub lambda_constant: f64,
    /// Field prime; defaults to the smallest prime `>= σ`.
    pub prime: Option<u64>,
    pub strategy: BuildStrategy,
}

impl Default for SketchConfig {
    fn default() -> Self {
        SketchConfig { lambda_constant: DEFAULT_LAMBDA_CONSTANT, prime: None, strategy: BuildStrategy::Auto }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SketchParams {
    pub n: usize,
    pub k: usize,
    pub eps: f64,
    pub p: u64,
    pub delta1: f64,
    pub delta2: f64,
    pub gamma: f64,
    pub lambda: usize,
    /// `Δ`: a query accepts when at most this many coordinates disagree.
    pub threshold: f64,
}

impl SketchParams {
    /// Coordinate-disagreement probability for strings at Hamming distance `d`.
    pub fn disagreement_probability(&self, d: f64) -> f64 {
        disagreement(self.p, self.k, d)
    }

    pub fn accepts(&self, disagreeing: usize) -> bool {
        disagreeing as f64 <= self.threshold
    }
}

fn disagreement(p: u64, k: usize, d: f64) -> f64 {
    let p = p as f64;
    (p - 1.0) / p * (1.0 - (1.0 - 1.0 / (2.0 * k as f64)).powf(d))
}

pub fn derive_params(n: usize, k: usize, eps: f64, sigma: u32) -> Result<SketchParams> {
    derive_params_with(n, k, eps, sigma, &SketchConfig::default())
}

pub fn derive_params_with(n: usize, k: usize, eps: f64, sigma: u32, config: &SketchConfig) -> Result<SketchParams> {
    budget::validate(n, k, eps)?;
    if config.lambda_constant.is_nan() || config.lambda_constant <= 0.0 {
        return Err(Error::InvalidParameter(format!("lambda constant must be positive, got {}", config.lambda_constant)));
    }
    let p = match config.prime {
        Some(p) if !is_prime(p) || p < sigma as u64 => {
            return Err(Error::InvalidParameter(format!("sketch prime {p} must be a prime >= sigma = {sigma}")))
        }
        Some(p) => p,
        None => find_prime(sigma.max(2) as u128)?,
    };
    let delta1 = disagreement(p, k, k as f64);
    let delta2 = disagreement(p, k, (1.0 + eps) * k as f64);
    let gamma = (delta2 - delta1) / 2.0;
    let lambda = ((config.lambda_constant * (n as f64).ln() / (gamma * gamma)).ceil() as usize).max(1);
    let threshold = (delta1 + delta2) / 2.0 * lambda as f64;
    Ok(SketchParams { n, k, eps, p, delta1, delta2, gamma, lambda, threshold })
}

/// A sparse random vector: coordinates are nonzero with probability
/// `(p-1)/(2kp)`, each nonzero value equally likely.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SketchVector {
    pub len: usize,
    /// `(position, value)` pairs, positions increasing, values in `[1, p)`.
    pub entries: Vec<(u32, u32)>,
}

impl SketchVector {
    /// `self · window mod p`.
    pub fn dot(&self, window: &[u32], p: u64) -> u64 {
        assert_eq!(window.len(), self.len, "window length must match vector length");
        let acc: u128 = self.entries.iter().map(|&(q, c)| c as u128 * window[q as usize] as u128).sum();
        (acc % p as u128) as u64
    }

    pub fn dense(&self) -> Vec<u64> {
        let mut out = vec![0u64; self.len];
        for &(q, c) in &self.entries {
            out[q as usize] = c as u64;
        }
        out
    }
}

/// The vector `r_level^index` of a table built with `seed`. Each
/// `(level, index)` has its own ChaCha stream, so vectors can be regenerated
/// independently and in any order.
///
/// Sampling is two-stage: a coordinate is selected with probability
/// `1/(2k)` (geometric gaps), then given a uniform value in `[0, p)`.
pub fn sample_vector(seed: u64, level: u32, index: u64, len: usize, k: usize, p: u64) -> SketchVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((level as u64) << 40) | index);
    // Inverse transform: a gap is floor(ln U / ln(1 - q)) with U uniform on (0, 1].
    let scale = 1.0 / (1.0 - 1.0 / (2.0 * k as f64)).ln();
    let mut entries = Vec::with_capacity(len / (2 * k) + 8);
    let mut pos = 0u64;
    loop {
        let u = 1.0 - rng.random::<f64>();
        let gap = (u.ln() * scale).floor();
        pos = pos.saturating_add(if gap < u64::MAX as f64 { gap as u64 } else { u64::MAX });
        if pos >= len as u64 {
            break;
        }
        let value = rng.random_range(0..p);
        if value != 0 {
            entries.push((pos as u32, value as u32));
        }
        pos += 1;
    }
    SketchVector { len, entries }
}

/// All `lambda` vectors of one level.
pub fn sample_level_vectors(seed: u64, level: u32, lambda: usize, k: usize, p: u64) -> Vec<SketchVector> {
    (0..lambda as u64).map(|i| sample_vector(seed, level, i, 1 << level, k, p)).collect()
}

/// Sketch of a single window under the given vectors.
pub fn sketch_window(vectors: &[SketchVector], window: &[u32], p: u64) -> Vec<u32> {
    vectors.iter().map(|v| v.dot(window, p) as u32).collect()
}

/// Number of coordinates in which two sketches differ.
pub fn sketch_distance(a: &[u32], b: &[u32]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// Cell width is chosen so that a sum of two residues never overflows.
trait Cell:
    Copy + Default + Send + Sync + PartialOrd + std::ops::Add<Output = Self> + std::ops::Sub<Output = Self> + 'static
{
    fn from_u32(v: u32) -> Self;
    fn get(self) -> u32;
    fn buffer(scratch: &mut QueryScratch) -> &mut Vec<Self>;
}

/// Reusable buffers for [`SketchTable::lcp_approx_k_with`].
#[derive(Debug, Clone, Default)]
pub struct QueryScratch {
    u8s: Vec<u8>,
    u16s: Vec<u16>,
    u32s: Vec<u32>,
}

macro_rules! impl_cell {
    ($($t:ty => $field:ident),*) => {$(
        impl Cell for $t {
            #[inline]
            fn from_u32(v: u32) -> Self {
                v as $t
            }
            #[inline]
            fn get(self) -> u32 {
                self as u32
            }
            fn buffer(scratch: &mut QueryScratch) -> &mut Vec<Self> {
                &mut scratch.$field
            }
        }
    )*};
}
impl_cell!(u8 => u8s, u16 => u16s, u32 => u32s);

/// One level: row-major `[window][λ]`, windows of `T1` first, then `T2`.
#[derive(Debug, Clone)]
struct Level<C> {
    len: usize,
    first: usize,
    second: usize,
    cells: Vec<C>,
}

#[derive(Debug, Clone)]
enum Levels {
    U8(Vec<Level<u8>>),
    U16(Vec<Level<u16>>),
    U32(Vec<Level<u32>>),
}

macro_rules! with_levels {
    ($levels:expr, $name:ident => $body:expr) => {
        match $levels {
            Levels::U8($name) => $body,
            Levels::U16($name) => $body,
            Levels::U32($name) => $body,
        }
    };
}

#[derive(Debug, Clone)]
pub struct SketchTable {
    params: SketchParams,
    seed: u64,
    len1: usize,
    len2: usize,
    levels: Levels,
}

pub fn build_sketch_table(t1: &[u32], t2: &[u32], params: &SketchParams, seed: u64) -> Result<SketchTable> {
    build_sketch_table_with(t1, t2, params, seed, BuildStrategy::Auto)
}

pub fn build_sketch_table_with(
    t1: &[u32],
    t2: &[u32],
    params: &SketchParams,
    seed: u64,
    strategy: BuildStrategy,
) -> Result<SketchTable> {
    let p = params.p;
    if let Some(&bad) = t1.iter().chain(t2).find(|&&c| c as u64 >= p) {
        return Err(Error::SymbolOutOfRange { symbol: bad, sigma: p.min(u32::MAX as u64) as u32 });
    }
    let levels = if p < 1 << 7 {
        Levels::U8(build_levels(t1, t2, params, seed, strategy))
    } else if p < 1 << 15 {
        Levels::U16(build_levels(t1, t2, params, seed, strategy))
    } else if p < 1 << 31 {
        Levels::U32(build_levels(t1, t2, params, seed, strategy))
    } else {
        return Err(Error::InvalidParameter(format!("sketch prime {p} must stay below 2^31")));
    };
    Ok(SketchTable { params: *params, seed, len1: t1.len(), len2: t2.len(), levels })
}

/// Columns are produced in batches and transposed into rows.
const COLUMN_BATCH: usize = 64;

fn build_levels<C: Cell>(t1: &[u32], t2: &[u32], params: &SketchParams, seed: u64, strategy: BuildStrategy) -> Vec<Level<C>> {
    let lambda = params.lambda;
    let n = t1.len().max(t2.len());
    let x: Vec<u32> = t1.iter().chain(t2).copied().collect();
    let level_count = if n == 0 { 0 } else { n.ilog2() as usize + 1 };
    let mut levels = Vec::with_capacity(level_count);
    for e in 0..level_count {
        let len = 1usize << e;
        let first = (t1.len() + 1).saturating_sub(len);
        let second = (t2.len() + 1).saturating_sub(len);
        let mut cells = vec![C::default(); (first + second) * lambda];
        if first + second > 0 {
            let builder = LevelBuilder::new(&x, len, params, seed, e as u32, strategy);
            let windows = x.len() - len + 1;
            let row_of = |j: usize| -> Option<usize> {
                if j < first {
                    Some(j)
                } else if j >= t1.len() && j - t1.len() < second {
                    Some(first + j - t1.len())
                } else {
                    None
                }
            };
            for batch in (0..lambda).step_by(COLUMN_BATCH) {
                let end = (batch + COLUMN_BATCH).min(lambda);
                let columns = builder.columns(batch..end);
                for (offset, column) in columns.iter().enumerate() {
                    let i = batch + offset;
                    debug_assert_eq!(column.len(), windows);
                    for (j, &value) in column.iter().enumerate() {
                        if let Some(row) = row_of(j) {
                            cells[row * lambda + i] = C::from_u32(value);
                        }
                    }
                }
            }
        }
        levels.push(Level { len, first, second, cells });
    }
    levels
}

/// Values above this are not trusted to an f64 FFT.
const FFT_EXACT_BOUND: f64 = (1u64 << 40) as f64;
/// Relative cost of one FFT butterfly against one sparse multiply-add.
const FFT_WEIGHT: f64 = 4.0;

struct LevelBuilder<'a> {
    x: &'a [u32],
    len: usize,
    p: u64,
    k: usize,
    seed: u64,
    level: u32,
    fft: Option<FftLevel>,
}

impl<'a> LevelBuilder<'a> {
    fn new(x: &'a [u32], len: usize, params: &SketchParams, seed: u64, level: u32, strategy: BuildStrategy) -> Self {
        let p = params.p;
        let windows = x.len() - len + 1;
        let max_value = ((p - 1) as f64).powi(2) * len as f64;
        let fft_ok = max_value <= FFT_EXACT_BOUND;
        let use_fft = match strategy {
            BuildStrategy::Direct => false,
            BuildStrategy::Fft => fft_ok,
            BuildStrategy::Auto => {
                let nonzero = len as f64 * (p - 1) as f64 / (2.0 * params.k as f64 * p as f64);
                let direct = windows as f64 * nonzero.max(1.0);
                let (block, step) = FftLevel::shape(x.len(), len);
                let blocks = x.len().div_ceil(step) as f64;
                let fft = (blocks + 1.0) * block as f64 * (block as f64).log2() * FFT_WEIGHT / 2.0;
                fft_ok && fft < direct
            }
        };
        let fft = use_fft.then(|| FftLevel::new(x, len));
        LevelBuilder { x, len, p, k: params.k, seed, level, fft }
    }

    fn vector(&self, i: usize) -> SketchVector {
        sample_vector(self.seed, self.level, i as u64, self.len, self.k, self.p)
    }

    fn columns(&self, range: std::ops::Range<usize>) -> Vec<Vec<u32>> {
        match &self.fft {
            None => range.into_par_iter().map(|i| self.direct(&self.vector(i))).collect(),
            Some(fft) => {
                let starts: Vec<usize> = range.clone().step_by(2).collect();
                let pairs: Vec<(Vec<u32>, Option<Vec<u32>>)> = starts
                    .into_par_iter()
                    .map(|i| {
                        let a = self.vector(i);
                        let b = (i + 1 < range.end).then(|| self.vector(i + 1));
                        match fft.correlate_pair(&a, b.as_ref(), self.p) {
                            Some(pair) => pair,
                            None => (self.direct(&a), b.as_ref().map(|b| self.direct(b))),
                        }
                    })
                    .collect();
                pairs.into_iter().flat_map(|(a, b)| std::iter::once(a).chain(b)).collect()
            }
        }
    }

    fn direct(&self, v: &SketchVector) -> Vec<u32> {
        let windows = self.x.len() - self.len + 1;
        let p = self.p;
        let fits = (p as u128 - 1).pow(2) * v.entries.len() as u128 <= u64::MAX as u128;
        if !fits {
            if v.entries.is_empty() {
                return vec![0; windows];
            }
            let values = correlate_mod(&v.dense(), self.x, p).expect("pattern fits the text");
            return values.into_iter().map(|c| c as u32).collect();
        }
        let mut acc = vec![0u64; windows];
        for &(q, c) in &v.entries {
            let c = c as u64;
            for (a, &t) in acc.iter_mut().zip(&self.x[q as usize..q as usize + windows]) {
                *a += c * t as u64;
            }
        }
        acc.into_iter().map(|a| (a % p) as u32).collect()
    }
}

/// Overlap-save correlation against a fixed text, two real patterns per
/// complex transform.
struct FftLevel {
    len: usize,
    block: usize,
    step: usize,
    windows: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    text_blocks: Vec<Vec<Complex<f64>>>,
}

impl FftLevel {
    fn shape(text_len: usize, len: usize) -> (usize, usize) {
        let whole = (text_len + len - 1).next_power_of_two();
        let block = whole.min((4 * len).next_power_of_two().max(1024));
        (block, block - len + 1)
    }

    fn new(x: &[u32], len: usize) -> Self {
        let (block, step) = Self::shape(x.len(), len);
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(block);
        let inverse = planner.plan_fft_inverse(block);
        let windows = x.len() - len + 1;
        let text_blocks = (0..windows)
            .step_by(step)
            .map(|start| {
                let mut buf: Vec<Complex<f64>> = (0..block)
                    .map(|q| Complex::new(x.get(start + q).map_or(0.0, |&c| c as f64), 0.0))
                    .collect();
                forward.process(&mut buf);
                buf
            })
            .collect();
        FftLevel { len, block, step, windows, forward, inverse, text_blocks }
    }

    /// Columns for `a` and `b`, or `None` if any value fails the exactness check.
    fn correlate_pair(&self, a: &SketchVector, b: Option<&SketchVector>, p: u64) -> Option<(Vec<u32>, Option<Vec<u32>>)> {
        let mut kernel = vec![Complex::new(0.0, 0.0); self.block];
        for &(q, c) in &a.entries {
            kernel[self.len - 1 - q as usize].re = c as f64;
        }
        if let Some(b) = b {
            for &(q, c) in &b.entries {
                kernel[self.len - 1 - q as usize].im = c as f64;
            }
        }
        self.forward.process(&mut kernel);
        let scale = 1.0 / self.block as f64;
        let mut out_a = vec![0u32; self.windows];
        let mut out_b = b.map(|_| vec![0u32; self.windows]);
        let mut buf = vec![Complex::new(0.0, 0.0); self.block];
        let reduce = |v: f64| -> Option<u32> {
            let r = v.round();
            ((v - r).abs() <= 0.1 && r >= -0.5).then(|| (r as u64 % p) as u32)
        };
        for (idx, text) in self.text_blocks.iter().enumerate() {
            for ((o, t), k) in buf.iter_mut().zip(text).zip(&kernel) {
                *o = t * k;
            }
            self.inverse.process(&mut buf);
            let start = idx * self.step;
            for q in 0..self.step.min(self.windows - start) {
                let v = buf[self.len - 1 + q] * scale;
                out_a[start + q] = reduce(v.re)?;
                if let Some(out_b) = out_b.as_mut() {
                    out_b[start + q] = reduce(v.im)?;
                }
            }
        }
        Some((out_a, out_b))
    }
}

impl SketchTable {
    pub fn params(&self) -> &SketchParams {
        &self.params
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len1(&self) -> usize {
        self.len1
    }

    pub fn len2(&self) -> usize {
        self.len2
    }

    pub fn level_count(&self) -> usize {
        with_levels!(&self.levels, l => l.len())
    }

    /// Bytes held by the sketch cells.
    pub fn memory_bytes(&self) -> usize {
        with_levels!(&self.levels, l => l.iter().map(|lv| std::mem::size_of_val(lv.cells.as_slice())).sum())
    }

    /// The vector used for repetition `index` at `level`.
    pub fn vector(&self, level: u32, index: usize) -> SketchVector {
        sample_vector(self.seed, level, index as u64, 1 << level, self.params.k, self.params.p)
    }

    fn row_index(&self, first: usize, side: Side, pos: usize) -> usize {
        match side {
            Side::First => pos,
            Side::Second => first + pos,
        }
    }

    /// Stored sketch of the window of length `2^level` at `pos`.
    pub fn row(&self, level: u32, side: Side, pos: usize) -> Result<Vec<u32>> {
        let text_len = match side {
            Side::First => self.len1,
            Side::Second => self.len2,
        };
        if level as usize >= self.level_count() {
            return Err(Error::InvalidParameter(format!("no sketch level {level}")));
        }
        let len = 1usize << level;
        if pos + len > text_len {
            return Err(Error::PositionOutOfRange { pos: pos + len, limit: text_len });
        }
        let lambda = self.params.lambda;
        Ok(with_levels!(&self.levels, ls => {
            let lv = &ls[level as usize];
            let r = self.row_index(lv.first, side, pos);
            lv.cells[r * lambda..(r + 1) * lambda].iter().map(|c| c.get()).collect()
        }))
    }

    /// Sketch of `text[start..start+len]`: the sum of the stored sketches of
    /// its power-of-two pieces, longest first.
    pub fn sketch_of_prefix(&self, side: Side, start: usize, len: usize) -> Result<Vec<u32>> {
        let p = self.params.p;
        let mut acc = vec![0u32; self.params.lambda];
        let mut offset = 0;
        for e in (0..usize::BITS).rev() {
            if len & (1 << e) == 0 {
                continue;
            }
            let row = self.row(e, side, start + offset)?;
            for (a, r) in acc.iter_mut().zip(row) {
                *a = ((*a as u64 + r as u64) % p) as u32;
            }
            offset += 1 << e;
        }
        Ok(acc)
    }

    /// An `ℓ` with `LCP_k ≤ ℓ ≤ LCP_{(1+ε)k}` for `t1[pos1..]`, `t2[pos2..]`
    /// (with high probability).
    pub fn lcp_approx_k(&self, pos1: usize, pos2: usize) -> Result<usize> {
        if pos1 > self.len1 {
            return Err(Error::PositionOutOfRange { pos: pos1, limit: self.len1 });
        }
        if pos2 > self.len2 {
            return Err(Error::PositionOutOfRange { pos: pos2, limit: self.len2 });
        }
        Ok(self.lcp_approx_k_with(pos1, pos2, &mut QueryScratch::default()))
    }

    /// [`Self::lcp_approx_k`] without bounds checks, reusing `scratch`.
    ///
    /// Greedy over levels from the longest down: a piece of length `2^e` is
    /// appended when the extended sketches still disagree in at most `Δ`
    /// coordinates. Only the running difference of the two prefix sketches is
    /// kept.
    pub fn lcp_approx_k_with(&self, pos1: usize, pos2: usize, scratch: &mut QueryScratch) -> usize {
        let overlap = (self.len1 - pos1).min(self.len2 - pos2);
        let limit = self.params.threshold.floor() as usize;
        with_levels!(&self.levels, ls => greedy_query(ls, self.params.lambda, self.params.p as u32, limit, overlap, pos1, pos2, Cell::buffer(scratch)))
    }
}

#[allow(clippy::too_many_arguments)]
fn greedy_query<C: Cell>(
    levels: &[Level<C>],
    lambda: usize,
    p: u32,
    limit: usize,
    overlap: usize,
    pos1: usize,
    pos2: usize,
    diff: &mut Vec<C>,
) -> usize {
    // Disagreements within a chunk are counted in the cell type itself.
    const CHUNK: usize = 127;
    let p = C::from_u32(p);
    let reduce = |s: C| if s >= p { s - p } else { s };
    diff.clear();
    diff.resize(lambda, C::default());
    let mut done = 0;
    'levels: for lv in levels.iter().rev() {
        if done + lv.len > overlap {
            continue;
        }
        debug_assert!(pos1 + done < lv.first && pos2 + done < lv.second);
        let r1 = (pos1 + done) * lambda;
        let r2 = (lv.first + pos2 + done) * lambda;
        let row1 = &lv.cells[r1..r1 + lambda];
        let row2 = &lv.cells[r2..r2 + lambda];
        let mut disagree = 0usize;
        for ((d, a), b) in diff.chunks(CHUNK).zip(row1.chunks(CHUNK)).zip(row2.chunks(CHUNK)) {
            let mut here = C::default();
            for ((&d, &a), &b) in d.iter().zip(a).zip(b) {
                here = here + C::from_u32((reduce(d + a) != b) as u32);
            }
            disagree += here.get() as usize;
            if disagree > limit {
                continue 'levels;
            }
        }
        for ((d, &a), &b) in diff.iter_mut().zip(row1).zip(row2) {
            *d = reduce(reduce(*d + a) + (p - b));
        }
        done += lv.len;
    }
    done
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::suffix::SuffixContext;
    use rand::{Rng, SeedableRng};

    fn random_text(rng: &mut impl Rng, n: usize, sigma: u32) -> Vec<u32> {
        (0..n).map(|_| rng.random_range(0..sigma)).collect()
    }

    #[test]
    fn params_for_k1_eps1_p2() {
        let cfg = SketchConfig { prime: Some(2), ..SketchConfig::default() };
        let s = derive_params_with(4096, 1, 1.0, 2, &cfg).unwrap();
        assert!((s.delta1 - 0.25).abs() < 1e-12);
        assert!((s.delta2 - 0.375).abs() < 1e-12);
        assert!((s.gamma - 1.0 / 16.0).abs() < 1e-12);
        assert!((s.threshold - 5.0 / 16.0 * s.lambda as f64).abs() < 1e-9);
        // 3 · ln 4096 · 256 = 6388.04...
        let oracle = (3.0 * 12.0 * std::f64::consts::LN_2 * 256.0f64).ceil() as usize;
        assert_eq!(s.lambda, oracle);
        assert_eq!(s.lambda, 6389);
    }

    #[test]
    fn params_validity() {
        for &(n, k, eps, sigma) in &[(10, 1, 0.5, 2), (4096, 16, 1.9, 4), (100, 3, 0.01, 26), (5, 2, 1.0, 1)] {
            let s = derive_params(n, k, eps, sigma).unwrap();
            assert!(0.0 < s.delta1 && s.delta1 < s.delta2 && s.delta2 < 1.0);
            assert!(s.gamma > 0.0 && s.lambda >= 1);
            assert!(s.p >= sigma as u64 && is_prime(s.p));
        }
        assert_eq!(derive_params(100, 1, 1.0, 4).unwrap().p, 5);
        assert!(matches!(derive_params(4, 2, 1.0, 2), Err(Error::TrivialInstance { .. })));
        let bad = SketchConfig { prime: Some(4), ..SketchConfig::default() };
        assert!(derive_params_with(100, 1, 1.0, 2, &bad).is_err());
    }

    #[test]
    fn sampler_is_reproducible_and_in_range() {
        let a = sample_vector(9, 3, 17, 8, 2, 5);
        assert_eq!(a, sample_vector(9, 3, 17, 8, 2, 5));
        assert!(a.entries.iter().all(|&(q, c)| (q as usize) < 8 && (1..5).contains(&c)));
        assert!(a.entries.windows(2).all(|w| w[0].0 < w[1].0));
    }

    #[test]
    fn sampler_density() {
        // P[coordinate = a] = 1/(2kp) for each nonzero a.
        let (k, p, len) = (3usize, 7u64, 64usize);
        let mut counts = vec![0usize; p as usize];
        let trials = 4000;
        for i in 0..trials {
            for &(_, c) in &sample_vector(1, 6, i, len, k, p).entries {
                counts[c as usize] += 1;
            }
        }
        let expected = (trials as usize * len) as f64 / (2.0 * k as f64 * p as f64);
        for &c in &counts[1..] {
            assert!((c as f64 - expected).abs() < 5.0 * expected.sqrt(), "{c} vs {expected}");
        }
    }

    fn small_table(strategy: BuildStrategy, n: usize, seed: u64) -> (Vec<u32>, Vec<u32>, SketchTable) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t1 = random_text(&mut rng, n, 4);
        let t2 = random_text(&mut rng, n - 7, 4);
        let cfg = SketchConfig { lambda_constant: 0.05, ..SketchConfig::default() };
        let params = derive_params_with(n, 2, 1.0, 4, &cfg).unwrap();
        let table = build_sketch_table_with(&t1, &t2, &params, seed, strategy).unwrap();
        (t1, t2, table)
    }

    #[test]
    fn stored_values_match_direct_dot_products() {
        for strategy in [BuildStrategy::Direct, BuildStrategy::Fft, BuildStrategy::Auto] {
            let (t1, t2, table) = small_table(strategy, 300, 5);
            let p = table.params().p;
            let mut rng = ChaCha8Rng::seed_from_u64(77);
            for _ in 0..100 {
                let level = rng.random_range(0..table.level_count() as u32);
                let len = 1usize << level;
                let i = rng.random_range(0..table.params().lambda);
                let (side, text) = if rng.random_bool(0.5) { (Side::First, &t1) } else { (Side::Second, &t2) };
                let pos = rng.random_range(0..=text.len() - len);
                let v = table.vector(level, i);
                let expected: u64 = v.dense().iter().zip(&text[pos..pos + len]).map(|(&c, &x)| c * x as u64).sum::<u64>() % p;
                assert_eq!(table.row(level, side, pos).unwrap()[i] as u64, expected, "{strategy:?}");
            }
        }
    }

    #[test]
    fn strategies_agree() {
        let (_, _, a) = small_table(BuildStrategy::Direct, 200, 8);
        let (_, _, b) = small_table(BuildStrategy::Fft, 200, 8);
        for e in 0..a.level_count() as u32 {
            for pos in 0..=(200 - (1 << e)) {
                assert_eq!(a.row(e, Side::First, pos).unwrap(), b.row(e, Side::First, pos).unwrap());
            }
        }
    }

    #[test]
    fn identical_windows_identical_rows() {
        let t1 = vec![0, 1, 2, 3, 0, 1, 2, 3, 0, 1, 2, 3];
        let params = derive_params(12, 1, 1.0, 4).unwrap();
        let table = build_sketch_table(&t1, &t1, &params, 1).unwrap();
        for e in 0..table.level_count() as u32 {
            assert_eq!(table.row(e, Side::First, 0).unwrap(), table.row(e, Side::First, 4).unwrap());
            assert_eq!(table.row(e, Side::First, 2).unwrap(), table.row(e, Side::Second, 2).unwrap());
        }
    }

    #[test]
    fn prefix_sketch_decomposition() {
        let (t1, _, table) = small_table(BuildStrategy::Auto, 64, 3);
        let p = table.params().p;
        let lambda = table.params().lambda;
        assert_eq!(table.sketch_of_prefix(Side::First, 5, 0).unwrap(), vec![0; lambda]);
        assert_eq!(table.sketch_of_prefix(Side::First, 5, 8).unwrap(), table.row(3, Side::First, 5).unwrap());
        let three = table.sketch_of_prefix(Side::First, 5, 3).unwrap();
        let two = table.row(1, Side::First, 5).unwrap();
        let one = table.row(0, Side::First, 7).unwrap();
        for i in 0..lambda {
            assert_eq!(three[i], (two[i] + one[i]) % p as u32);
            let by_hand = (table.vector(1, i).dot(&t1[5..7], p) + table.vector(0, i).dot(&t1[7..8], p)) % p;
            assert_eq!(three[i] as u64, by_hand);
        }
    }

    #[test]
    fn identical_suffixes_reach_the_overlap() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let t = random_text(&mut rng, 100, 4);
        let params = derive_params(100, 2, 1.0, 4).unwrap();
        let table = build_sketch_table(&t, &t, &params, 2).unwrap();
        for pos in [0, 1, 37, 99, 100] {
            assert_eq!(table.lcp_approx_k(pos, pos).unwrap(), 100 - pos);
        }
        assert!(table.lcp_approx_k(101, 0).is_err());
    }

    #[test]
    fn planted_pair_is_sandwiched() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let (n, k, eps) = (512, 4, 1.0);
        let t1 = random_text(&mut rng, n, 4);
        let mut t2 = t1.clone();
        // k mismatches in the first 200 characters, then a block of mismatches.
        for q in [10, 60, 120, 180] {
            t2[q] = (t2[q] + 1) % 4;
        }
        for c in t2[200..240].iter_mut() {
            *c = (*c + 1) % 4;
        }
        let ctx = SuffixContext::new(&t1, &t2, 4).unwrap();
        let params = derive_params(n, k, eps, 4).unwrap();
        let table = build_sketch_table(&t1, &t2, &params, 3).unwrap();
        let got = table.lcp_approx_k(0, 0).unwrap();
        let lo = ctx.lcp_k(0, 0, k).unwrap();
        let hi = ctx.lcp_k(0, 0, budget::relaxed(k, eps)).unwrap();
        assert_eq!(lo, 200);
        assert!(lo <= got && got <= hi, "{lo} <= {got} <= {hi}");
    }

    /// The narrow-cell query against a greedy over `sketch_of_prefix` in u64
    /// arithmetic, on both sides of every cell-width boundary.
    #[test]
    fn narrow_cells_match_wide_reference() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let n = 300;
        let t1 = random_text(&mut rng, n, 4);
        let mut t2 = random_text(&mut rng, n, 4);
        t2[40..200].copy_from_slice(&t1[100..260]);
        for prime in [5, 127, 131, 32749, 32771] {
            let cfg = SketchConfig { lambda_constant: 0.05, prime: Some(prime), ..SketchConfig::default() };
            let params = derive_params_with(n, 2, 1.0, 4, &cfg).unwrap();
            let table = build_sketch_table(&t1, &t2, &params, 4).unwrap();
            let mut scratch = QueryScratch::default();
            let mut queries: Vec<(usize, usize)> = (0..150).map(|_| (rng.random_range(0..n), rng.random_range(0..n))).collect();
            queries.push((100, 40));
            for (a, b) in queries {
                let overlap = (n - a).min(n - b);
                let mut done = 0;
                for e in (0..table.level_count()).rev() {
                    let len = 1 << e;
                    if done + len > overlap {
                        continue;
                    }
                    let x = table.sketch_of_prefix(Side::First, a, done + len).unwrap();
                    let y = table.sketch_of_prefix(Side::Second, b, done + len).unwrap();
                    if params.accepts(sketch_distance(&x, &y)) {
                        done += len;
                    }
                }
                assert_eq!(table.lcp_approx_k_with(a, b, &mut scratch), done, "p = {prime}, query ({a}, {b})");
            }
        }
    }

    #[test]
    fn random_queries_are_mostly_sandwiched() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let n = 512;
        let t1 = random_text(&mut rng, n, 2);
        let t2 = random_text(&mut rng, n, 2);
        let ctx = SuffixContext::new(&t1, &t2, 2).unwrap();
        let params = derive_params(n, 2, 1.0, 2).unwrap();
        let table = build_sketch_table(&t1, &t2, &params, 9).unwrap();
        let mut violations = 0;
        let mut scratch = QueryScratch::default();
        for _ in 0..2000 {
            let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
            let got = table.lcp_approx_k_with(a, b, &mut scratch);
            assert!(got <= (n - a).min(n - b));
            let lo = ctx.lcp_k(a, b, 2).unwrap();
            let hi = ctx.lcp_k(a, b, 4).unwrap();
            violations += (got < lo || got > hi) as usize;
        }
        assert!(violations <= 20, "{violations} violations");
    }

    #[test]
    fn coordinate_disagreement_matches_formula() {
        // Per coordinate, strings at distance d disagree with probability
        // (p-1)/p · (1 - (1 - 1/(2k))^d); checked within 3 standard errors.
        let (k, p, len) = (4usize, 5u64, 64usize);
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        for d in [k, 2 * k] {
            let trials = 4000;
            let mut hits = 0;
            for t in 0..trials {
                let x = random_text(&mut rng, len, 5);
                let mut y = x.clone();
                for q in 0..d {
                    y[q * 7] = (y[q * 7] + rng.random_range(1..5)) % 5;
                }
                let v = sample_vector(t, 6, 0, len, k, p);
                hits += (v.dot(&x, p) != v.dot(&y, p)) as usize;
            }
            let freq = hits as f64 / trials as f64;
            let expected = disagreement(p, k, d as f64);
            let se = (expected * (1.0 - expected) / trials as f64).sqrt();
            assert!((freq - expected).abs() <= 3.0 * se + 1e-3, "d={d}: {freq} vs {expected}");
        }
    }

    #[test]
    fn distance_is_symmetric() {
        let a = vec![1, 2, 3, 4];
        let b = vec![1, 0, 3, 0];
        assert_eq!(sketch_distance(&a, &b), 2);
        assert_eq!(sketch_distance(&b, &a), 2);
        assert_eq!(sketch_distance(&a, &a), 0);
    }
}
