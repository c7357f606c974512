//! Projection hashing of suffixes.
//!
//! A base function `u` projects a string of length `n` onto a random multiset
//! of `m` positions; a hash `h` is a `t`-tuple of base functions from one
//! subfamily, i.e. a projection onto the union of their multisets. Suffixes
//! shorter than `n` are padded with the gap symbol `$`, the largest code.
//!
//! Every order below stores, for each pair of adjacent suffixes, the first
//! (1-based) position of the multiset at which the two padded suffixes differ,
//! or `n + 1` if their projections are equal. Because the projected LCP is a
//! monotone function of that position, range minima over these values give the
//! first differing position of any two suffixes.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::cmp::Ordering;

use crate::budget;
use crate::error::{Error, Result};
use crate::modmath::{add_mod, correlate_mod, find_prime, mul_mod, LARGEST_U64_PRIME};
use crate::rmq::SparseTable;
use crate::suffix::{Side, SuffixContext};

/// `e³ · ln 4`: the default constant in `s = ⌈c_s · t!⌉`.
pub const DEFAULT_S_FACTOR: f64 = 27.844_466_576_680_42;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LshParams {
    pub n: usize,
    pub k: usize,
    pub eps: f64,
    pub p1: f64,
    pub p2: f64,
    pub rho: f64,
    pub t: usize,
    pub m: usize,
    pub w: usize,
    pub s: usize,
}

impl LshParams {
    /// `C(w, t)`, the size of one full subfamily.
    pub fn subfamily_size(&self) -> u128 {
        binomial(self.w, self.t)
    }

    pub fn family_size(&self) -> u128 {
        self.s as u128 * self.subfamily_size()
    }
}

pub fn derive_lsh_params(n: usize, k: usize, eps: f64, s_factor: f64) -> Result<LshParams> {
    budget::validate(n, k, eps)?;
    if s_factor.is_nan() || s_factor <= 0.0 {
        return Err(Error::InvalidParameter(format!("s factor must be positive, got {s_factor}")));
    }
    let nf = n as f64;
    let p1 = 1.0 - k as f64 / nf;
    let p2 = 1.0 - (1.0 + eps) * k as f64 / nf;
    let rho = p1.ln() / p2.ln();
    let t = (nf.log2().sqrt().ceil() as usize).max(1);
    let m = (((1.0 / nf).ln() / p2.ln() / t as f64).ceil() as usize).max(1);
    let w = t * t + p1.powf(-(m as f64)).ceil() as usize;
    let t_factorial: f64 = (1..=t).map(|x| x as f64).product();
    let s = ((s_factor * t_factorial).ceil() as usize).max(1);
    Ok(LshParams { n, k, eps, p1, p2, rho, t, m, w, s })
}

pub fn binomial(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    (0..r).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// The `rank`-th `r`-subset of `0..n` in lexicographic order.
pub fn unrank_combination(n: usize, r: usize, mut rank: u128) -> Vec<usize> {
    let mut out = Vec::with_capacity(r);
    let mut next = 0;
    for slot in 0..r {
        loop {
            let rest = binomial(n - next - 1, r - slot - 1);
            if rank < rest {
                break;
            }
            rank -= rest;
            next += 1;
        }
        out.push(next);
        next += 1;
    }
    out
}

/// Projection onto a sorted multiset of 1-based positions in `[1, n]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectionFunction {
    n: usize,
    positions: Vec<u32>,
    multiplicity: Vec<u32>,
}

impl ProjectionFunction {
    pub fn new(n: usize, mut positions: Vec<u32>) -> Result<Self> {
        if let Some(&bad) = positions.iter().find(|&&q| q == 0 || q as usize > n) {
            return Err(Error::PositionOutOfRange { pos: bad as usize, limit: n });
        }
        positions.sort_unstable();
        let mut multiplicity = vec![0u32; n + 2];
        for &q in &positions {
            multiplicity[q as usize] += 1;
        }
        Ok(ProjectionFunction { n, positions, multiplicity })
    }

    /// `m` positions drawn independently and uniformly from `[1, n]`.
    pub fn sample(n: usize, m: usize, rng: &mut impl Rng) -> Self {
        let positions = (0..m).map(|_| rng.random_range(1..=n as u32)).collect();
        Self::new(n, positions).expect("sampled positions lie in range")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.positions.len()
    }

    pub fn positions(&self) -> &[u32] {
        &self.positions
    }

    #[inline]
    pub fn multiplicity(&self, q: usize) -> u32 {
        self.multiplicity.get(q).copied().unwrap_or(0)
    }

    /// Number of projected characters taken from positions before `q`.
    pub fn count_before(&self, q: u32) -> usize {
        self.positions.partition_point(|&x| x < q)
    }

    /// Projection of `s` padded with `gap` to length `n`; with a cutoff,
    /// positions beyond it read as `gap` too.
    pub fn project(&self, s: &[u32], gap: u32, cutoff: Option<usize>) -> Vec<u32> {
        let limit = cutoff.unwrap_or(usize::MAX);
        self.positions
            .iter()
            .map(|&q| {
                let q = q as usize;
                if q > limit {
                    gap
                } else {
                    s.get(q - 1).copied().unwrap_or(gap)
                }
            })
            .collect()
    }
}

pub fn sample_projection(n: usize, m: usize, seed: u64) -> ProjectionFunction {
    ProjectionFunction::sample(n, m, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// The `n1 + n2` suffixes: ids `0..n1` are suffixes of `T1`, the rest of `T2`.
#[derive(Debug, Clone, Copy)]
pub struct Suffixes {
    pub n: usize,
    pub n1: usize,
    pub n2: usize,
    offset: usize,
}

impl Suffixes {
    pub fn of(ctx: &SuffixContext) -> Self {
        Suffixes { n: ctx.pad(), n1: ctx.len1(), n2: ctx.len2(), offset: ctx.second_offset() }
    }

    pub fn count(&self) -> usize {
        self.n1 + self.n2
    }

    pub fn id(&self, side: Side, pos: usize) -> u32 {
        match side {
            Side::First => pos as u32,
            Side::Second => (self.n1 + pos) as u32,
        }
    }

    pub fn locate(&self, id: u32) -> (Side, usize) {
        let id = id as usize;
        if id < self.n1 {
            (Side::First, id)
        } else {
            (Side::Second, id - self.n1)
        }
    }

    #[inline]
    pub fn joined(&self, id: u32) -> usize {
        let id = id as usize;
        if id < self.n1 {
            id
        } else {
            self.offset + id - self.n1
        }
    }

    #[inline]
    pub fn len(&self, id: u32) -> usize {
        let id = id as usize;
        if id < self.n1 {
            self.n1 - id
        } else {
            self.n2 - (id - self.n1)
        }
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    #[inline]
    pub fn is_first(&self, id: u32) -> bool {
        (id as usize) < self.n1
    }

    /// Order among suffixes with equal projections: shorter first, `T1` before `T2`.
    #[inline]
    fn tie(&self, a: u32, b: u32) -> Ordering {
        (self.len(a), !self.is_first(a)).cmp(&(self.len(b), !self.is_first(b)))
    }
}

/// Which preprocessing builds a base order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    /// Layered Karp–Rabin refinement over `√m` blocks of positions.
    Fingerprint,
    /// Comparison sort walking the mismatch stream until a position of the multiset.
    Kangaroo,
}

/// Fingerprints when `√m ≤ n log₂ n / m`, the kangaroo walk otherwise.
pub fn choose_method(m: usize, n: usize) -> Method {
    let n = n as f64;
    let m = m as f64;
    if m.sqrt() <= n * n.log2().max(0.0) / m {
        Method::Fingerprint
    } else {
        Method::Kangaroo
    }
}

/// `⌈3 n ln n / m⌉`: the probe cap under which a capped kangaroo comparison
/// errs with probability at most `n^-3`.
pub fn theory_probe_cap(n: usize, m: usize) -> usize {
    (3.0 * n as f64 * (n as f64).ln() / m as f64).ceil().max(1.0) as usize
}

/// Smallest admissible fingerprint prime `>= n^5`, capped at the largest 64-bit prime.
pub fn fingerprint_prime(n: usize) -> u64 {
    let target = (n.max(2) as u128).checked_pow(5).unwrap_or(u128::MAX);
    if target > LARGEST_U64_PRIME as u128 {
        LARGEST_U64_PRIME
    } else {
        find_prime(target).expect("target is below the largest 64-bit prime")
    }
}

/// A base order: the suffixes sorted by `u(S)` with first-difference support.
#[derive(Debug, Clone)]
pub struct BaseOrder {
    n: usize,
    order: Vec<u32>,
    rank: Vec<u32>,
    diff: Vec<u32>,
    rmq: SparseTable,
    /// Fingerprint classes found to mix different projections (verify mode only).
    pub collisions: usize,
}

impl BaseOrder {
    fn from_parts(n: usize, order: Vec<u32>, diff: Vec<u32>, collisions: usize) -> Self {
        let mut rank = vec![0u32; order.len()];
        for (r, &id) in order.iter().enumerate() {
            rank[id as usize] = r as u32;
        }
        let rmq = SparseTable::new(&diff);
        BaseOrder { n, order, rank, diff, rmq, collisions }
    }

    pub fn order(&self) -> &[u32] {
        &self.order
    }

    /// `diff[i]` relates `order[i-1]` and `order[i]`; `diff[0]` is unused.
    pub fn adjacent_diffs(&self) -> &[u32] {
        &self.diff
    }

    /// First position of the multiset where suffixes `a` and `b` differ, `n + 1` if none.
    #[inline]
    pub fn first_diff(&self, a: u32, b: u32) -> u32 {
        if a == b {
            return self.n as u32 + 1;
        }
        let (x, y) = (self.rank[a as usize] as usize, self.rank[b as usize] as usize);
        let (lo, hi) = if x < y { (x, y) } else { (y, x) };
        self.rmq.min(lo + 1, hi + 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MethodChoice {
    #[default]
    Auto,
    Force(Method),
}

/// Practical knobs; the defaults follow the analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct LshConfig {
    pub s_factor: f64,
    /// Cap on hash functions per subfamily, sampled uniformly among the `C(w, t)` tuples.
    pub family_budget: Option<usize>,
    pub method: MethodChoice,
    /// Stop kangaroo comparisons after this many mismatches (then treat as equal).
    pub probe_cap: Option<usize>,
    /// Check every fingerprint class character by character and repair collisions.
    pub verify_fingerprints: bool,
    /// Fingerprint prime; defaults to [`fingerprint_prime`].
    pub fingerprint_prime: Option<u64>,
}

impl Default for LshConfig {
    fn default() -> Self {
        LshConfig {
            s_factor: DEFAULT_S_FACTOR,
            family_budget: None,
            method: MethodChoice::Auto,
            probe_cap: None,
            verify_fingerprints: false,
            fingerprint_prime: None,
        }
    }
}

/// Sorts the suffixes by `u(S)` with the kangaroo walk.
pub fn preprocess_kangaroo(u: &ProjectionFunction, ctx: &SuffixContext, probe_cap: Option<usize>) -> BaseOrder {
    let ids = Suffixes::of(ctx);
    let joined = ctx.joined();
    let n = ids.n;
    let compare = |a: u32, b: u32| -> (Ordering, u32) {
        let (ja, jb) = (ids.joined(a), ids.joined(b));
        let walk = ctx.joined_mismatches(ja, jb, n).take(probe_cap.unwrap_or(usize::MAX));
        for o in walk {
            if u.multiplicity(o + 1) > 0 {
                return (joined[ja + o].cmp(&joined[jb + o]), o as u32 + 1);
            }
        }
        (ids.tie(a, b), n as u32 + 1)
    };
    let mut order: Vec<u32> = (0..ids.count() as u32).collect();
    if probe_cap.is_some() {
        // A capped comparison may be intransitive; merge sort tolerates that.
        merge_sort_by(&mut order, |&a, &b| compare(a, b).0);
    } else {
        order.sort_unstable_by(|&a, &b| compare(a, b).0);
    }
    let mut diff = vec![0u32; order.len()];
    for i in 1..order.len() {
        diff[i] = compare(order[i - 1], order[i]).1;
    }
    BaseOrder::from_parts(n, order, diff, 0)
}

/// Sorts the suffixes by `u(S)` by layered fingerprint refinement: the sorted
/// multiset is cut into about `√m` consecutive blocks; for each block a
/// Karp–Rabin fingerprint of every suffix's block projection comes from one
/// modular correlation, each group is split by fingerprint and the classes
/// are ordered by comparing representatives character by character.
pub fn preprocess_fingerprint(
    u: &ProjectionFunction,
    ctx: &SuffixContext,
    fp_prime: u64,
    rng: &mut impl Rng,
    verify: bool,
) -> Result<BaseOrder> {
    let ids = Suffixes::of(ctx);
    let n = ids.n;
    let required = fingerprint_prime(n);
    if fp_prime < required {
        return Err(Error::FingerprintPrimeTooSmall { got: fp_prime, required });
    }
    let joined = ctx.joined();
    let total = ids.count();
    let mut order: Vec<u32> = (0..total as u32).collect();
    // 0 marks "same group so far".
    let mut diff = vec![0u32; total];
    let mut collisions = 0;
    let m = u.m();
    let blocks = (m as f64).sqrt().ceil().max(1.0) as usize;
    let block_len = m.div_ceil(blocks).max(1);
    let mut fingerprint = vec![0u64; total];

    for block in u.positions().chunks(block_len) {
        let r = rng.random_range(0..fp_prime);
        let last = *block.last().expect("chunks are nonempty") as usize;
        let mut chi = vec![0u64; last];
        let mut power = r;
        for &a in block {
            let slot = &mut chi[a as usize - 1];
            *slot = add_mod(*slot, power, fp_prime);
            power = mul_mod(power, r, fp_prime);
        }
        let corr = correlate_mod(&chi, joined, fp_prime)?;
        for id in 0..total as u32 {
            fingerprint[id as usize] = corr[ids.joined(id)];
        }
        let block_cmp = |a: u32, b: u32| -> Option<(Ordering, u32)> {
            let (ja, jb) = (ids.joined(a), ids.joined(b));
            block.iter().find_map(|&q| {
                let (x, y) = (joined[ja + q as usize - 1], joined[jb + q as usize - 1]);
                (x != y).then(|| (x.cmp(&y), q))
            })
        };

        let mut start = 0;
        while start < total {
            let mut end = start + 1;
            while end < total && diff[end] == 0 {
                end += 1;
            }
            if end - start > 1 {
                collisions += refine_group(&mut order[start..end], &mut diff[start..end], &fingerprint, &block_cmp, verify);
            }
            start = end;
        }
    }

    // Remaining groups have equal projections.
    let mut start = 0;
    while start < total {
        let mut end = start + 1;
        while end < total && diff[end] == 0 {
            end += 1;
        }
        order[start..end].sort_unstable_by(|&a, &b| ids.tie(a, b));
        for d in diff[start + 1..end].iter_mut() {
            *d = n as u32 + 1;
        }
        start = end;
    }
    diff[0] = 0;
    Ok(BaseOrder::from_parts(n, order, diff, collisions))
}

/// Splits one group by fingerprint and orders the classes. `diff[0]` belongs to
/// the boundary before the group and is left alone. Returns the number of
/// repaired fingerprint collisions.
fn refine_group(
    group: &mut [u32],
    diff: &mut [u32],
    fingerprint: &[u64],
    block_cmp: &impl Fn(u32, u32) -> Option<(Ordering, u32)>,
    verify: bool,
) -> usize {
    group.sort_unstable_by_key(|&id| (fingerprint[id as usize], id));
    let mut classes: Vec<(usize, usize)> = Vec::new();
    let mut s = 0;
    while s < group.len() {
        let f = fingerprint[group[s] as usize];
        let mut e = s + 1;
        while e < group.len() && fingerprint[group[e] as usize] == f {
            e += 1;
        }
        classes.push((s, e));
        s = e;
    }
    let mut repaired = 0;
    if verify {
        // Split any class whose members do not all share the representative's projection.
        let mut exact = Vec::with_capacity(classes.len());
        for &(s, e) in &classes {
            let rep = group[s];
            if group[s + 1..e].iter().all(|&id| block_cmp(rep, id).is_none()) {
                exact.push((s, e));
                continue;
            }
            repaired += 1;
            let members = &mut group[s..e];
            members.sort_by(|&a, &b| block_cmp(a, b).map_or(a.cmp(&b), |(o, _)| o));
            let mut cs = 0;
            while cs < members.len() {
                let mut ce = cs + 1;
                while ce < members.len() && block_cmp(members[cs], members[ce]).is_none() {
                    ce += 1;
                }
                exact.push((s + cs, s + ce));
                cs = ce;
            }
        }
        classes = exact;
    }
    if classes.len() == 1 {
        return repaired;
    }
    classes.sort_by(|&(a, _), &(b, _)| block_cmp(group[a], group[b]).map_or(Ordering::Equal, |(o, _)| o));
    let reordered: Vec<u32> = classes.iter().flat_map(|&(s, e)| group[s..e].iter().copied()).collect();
    let mut at = 0;
    for (c, &(s, e)) in classes.iter().enumerate() {
        if c > 0 {
            let prev = reordered[at - 1];
            let here = reordered[at];
            // Distinct fingerprints imply distinct projections.
            diff[at] = block_cmp(prev, here).map_or(0, |(_, q)| q);
        }
        at += e - s;
    }
    group.copy_from_slice(&reordered);
    repaired
}

/// Stable top-down merge sort that never panics on inconsistent comparators.
fn merge_sort_by<T: Copy>(v: &mut [T], mut cmp: impl FnMut(&T, &T) -> Ordering) {
    let mut buf = v.to_vec();
    fn go<T: Copy>(v: &mut [T], buf: &mut [T], cmp: &mut impl FnMut(&T, &T) -> Ordering) {
        let len = v.len();
        if len <= 1 {
            return;
        }
        let mid = len / 2;
        go(&mut v[..mid], &mut buf[..mid], cmp);
        go(&mut v[mid..], &mut buf[mid..], cmp);
        let (mut i, mut j) = (0, mid);
        for slot in buf[..len].iter_mut() {
            if j >= len || (i < mid && cmp(&v[i], &v[j]) != Ordering::Greater) {
                *slot = v[i];
                i += 1;
            } else {
                *slot = v[j];
                j += 1;
            }
        }
        v.copy_from_slice(&buf[..len]);
    }
    go(v, &mut buf, &mut cmp);
}

/// A hash `h`: subfamily index and strictly increasing base-function indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct HashFunction {
    pub subfamily: usize,
    pub tuple: Vec<usize>,
}

/// Suffixes sorted by `h(S)` with adjacent first-difference positions.
#[derive(Debug, Clone)]
pub struct HashOrder {
    pub hash: HashFunction,
    n: usize,
    order: Vec<u32>,
    diff: Vec<u32>,
}

impl HashOrder {
    pub fn order(&self) -> &[u32] {
        &self.order
    }

    pub fn adjacent_diffs(&self) -> &[u32] {
        &self.diff
    }

    /// Maximal runs of suffixes whose projections agree on all positions `<= ell`.
    pub fn runs(&self, ell: usize) -> impl Iterator<Item = &[u32]> + '_ {
        let mut start = 0;
        std::iter::from_fn(move || {
            if start >= self.order.len() {
                return None;
            }
            let mut end = start + 1;
            while end < self.order.len() && self.diff[end] as usize > ell {
                end += 1;
            }
            let run = &self.order[start..end];
            start = end;
            Some(run)
        })
    }

    /// The `ell`-neighbourhood of `T1` suffix `pos1`: the `T2` suffixes of its
    /// run, in `h`-order. Length filtering is left to the caller.
    pub fn neighbourhood(&self, ids: &Suffixes, pos1: usize, ell: usize) -> Vec<u32> {
        if pos1 >= ids.n1 || ids.len(pos1 as u32) < ell {
            return Vec::new();
        }
        let at = self.order.iter().position(|&id| id == pos1 as u32).expect("every suffix is ordered");
        let mut lo = at;
        while lo > 0 && self.diff[lo] as usize > ell {
            lo -= 1;
        }
        let mut hi = at + 1;
        while hi < self.order.len() && self.diff[hi] as usize > ell {
            hi += 1;
        }
        self.order[lo..hi].iter().copied().filter(|&id| !ids.is_first(id)).collect()
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// Sorts all suffixes by `h(S)`, where `h` is the tuple of `bases`.
pub fn build_hash_order(hash: HashFunction, bases: &[&BaseOrder], ctx: &SuffixContext) -> HashOrder {
    let ids = Suffixes::of(ctx);
    let joined = ctx.joined();
    let n = ids.n;
    let first_diff = |a: u32, b: u32| bases.iter().map(|u| u.first_diff(a, b)).min().unwrap_or(n as u32 + 1);
    let compare = |a: u32, b: u32| -> Ordering {
        let q = first_diff(a, b) as usize;
        if q > n {
            ids.tie(a, b)
        } else {
            joined[ids.joined(a) + q - 1].cmp(&joined[ids.joined(b) + q - 1])
        }
    };
    let order: Vec<u32> = match bases {
        [] => {
            let mut order: Vec<u32> = (0..ids.count() as u32).collect();
            order.sort_unstable_by(|&a, &b| ids.tie(a, b));
            order
        }
        [single] => single.order().to_vec(),
        _ => {
            let mut order = bases[0].order().to_vec();
            merge_sort_by(&mut order, |&a, &b| compare(a, b));
            order
        }
    };
    let mut diff = vec![0u32; order.len()];
    for i in 1..order.len() {
        diff[i] = first_diff(order[i - 1], order[i]);
    }
    HashOrder { hash, n, order, diff }
}

/// Counters gathered while building a family.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct FamilyStats {
    pub base_functions: usize,
    pub fingerprint_bases: usize,
    pub kangaroo_bases: usize,
    pub fingerprint_collisions: usize,
    pub hash_functions: usize,
}

/// The hash family with one order per hash function.
#[derive(Debug, Clone)]
pub struct LshFamily {
    pub params: LshParams,
    pub ids: Suffixes,
    pub orders: Vec<HashOrder>,
    pub stats: FamilyStats,
}

fn stream_rng(seed: u64, tag: u64, a: u64, b: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((tag << 56) | (a << 28) | b);
    rng
}

const TAG_PROJECTION: u64 = 1;
const TAG_FINGERPRINT: u64 = 2;
const TAG_TUPLES: u64 = 3;

/// Tuples of subfamily `i`: all `C(w, t)` of them, or a uniform sample of `budget`.
pub fn subfamily_tuples(params: &LshParams, budget: Option<usize>, seed: u64, i: usize) -> Vec<Vec<usize>> {
    let total = params.subfamily_size();
    match budget {
        Some(b) if (b as u128) < total => {
            let mut rng = stream_rng(seed, TAG_TUPLES, i as u64, 0);
            let total = usize::try_from(total).expect("subfamily size fits in usize");
            let mut ranks: Vec<usize> = index::sample(&mut rng, total, b).into_vec();
            ranks.sort_unstable();
            ranks.into_iter().map(|r| unrank_combination(params.w, params.t, r as u128)).collect()
        }
        _ => (0..total).map(|r| unrank_combination(params.w, params.t, r)).collect(),
    }
}

impl LshFamily {
    /// Samples `s` subfamilies of `w` base functions, preprocesses each base
    /// function and builds one order per hash function. Base orders are
    /// dropped once their subfamily's hash orders exist.
    pub fn build(ctx: &SuffixContext, params: &LshParams, config: &LshConfig, seed: u64) -> Result<Self> {
        let ids = Suffixes::of(ctx);
        let n = params.n;
        let method = match config.method {
            MethodChoice::Auto => choose_method(params.m, n),
            MethodChoice::Force(m) => m,
        };
        let fp_prime = config.fingerprint_prime.unwrap_or_else(|| fingerprint_prime(ids.n));
        let mut stats = FamilyStats::default();
        let mut orders = Vec::new();
        for i in 0..params.s {
            let bases: Vec<BaseOrder> = (0..params.w)
                .into_par_iter()
                .map(|r| {
                    let mut rng = stream_rng(seed, TAG_PROJECTION, i as u64, r as u64);
                    let u = ProjectionFunction::sample(ids.n, params.m, &mut rng);
                    match method {
                        Method::Kangaroo => Ok(preprocess_kangaroo(&u, ctx, config.probe_cap)),
                        Method::Fingerprint => {
                            let mut rng = stream_rng(seed, TAG_FINGERPRINT, i as u64, r as u64);
                            preprocess_fingerprint(&u, ctx, fp_prime, &mut rng, config.verify_fingerprints)
                        }
                    }
                })
                .collect::<Result<_>>()?;
            stats.base_functions += bases.len();
            match method {
                Method::Fingerprint => stats.fingerprint_bases += bases.len(),
                Method::Kangaroo => stats.kangaroo_bases += bases.len(),
            }
            stats.fingerprint_collisions += bases.iter().map(|b| b.collisions).sum::<usize>();
            let tuples = subfamily_tuples(params, config.family_budget, seed, i);
            let built: Vec<HashOrder> = tuples
                .into_par_iter()
                .map(|tuple| {
                    let chosen: Vec<&BaseOrder> = tuple.iter().map(|&r| &bases[r]).collect();
                    build_hash_order(HashFunction { subfamily: i, tuple }, &chosen, ctx)
                })
                .collect();
            orders.extend(built);
        }
        stats.hash_functions = orders.len();
        Ok(LshFamily { params: *params, ids, orders, stats })
    }

    pub fn len(&self) -> usize {
        self.orders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orders.is_empty()
    }

    /// `|C_ell|`: triples `(S, S', h)` with `|S|, |S'| >= ell` colliding on `h|[ell]`.
    pub fn collision_count(&self, ell: usize) -> u64 {
        self.orders.par_iter().map(|h| self.count_in(h, ell)).sum()
    }

    fn qualified_split(&self, run: &[u32], ell: usize) -> (u64, u64) {
        let mut a = 0;
        let mut b = 0;
        for &id in run {
            if self.ids.len(id) >= ell {
                if self.ids.is_first(id) {
                    a += 1;
                } else {
                    b += 1;
                }
            }
        }
        (a, b)
    }

    fn count_in(&self, h: &HashOrder, ell: usize) -> u64 {
        h.runs(ell).map(|run| {
            let (a, b) = self.qualified_split(run, ell);
            a * b
        })
        .sum()
    }

    /// The largest `ell` with `|C_ell| >= bound`, or `None` if even `ell = 0` falls short.
    pub fn find_threshold(&self, bound: u64) -> Option<usize> {
        if self.collision_count(0) < bound {
            return None;
        }
        let (mut lo, mut hi) = (0usize, self.ids.n);
        while lo < hi {
            let mid = lo + (hi - lo).div_ceil(2);
            if self.collision_count(mid) >= bound {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        Some(lo)
    }

    /// The default bound `2n|H|`.
    pub fn default_bound(&self) -> u64 {
        2 * self.ids.n as u64 * self.orders.len() as u64
    }

    /// A uniformly random element of `C_ell` as `(pos1, pos2, hash index)`.
    pub fn sample_collision(&self, ell: usize, rng: &mut impl Rng) -> Result<(usize, usize, usize)> {
        let total = self.collision_count(ell);
        if total == 0 {
            return Err(Error::EmptyCollisionFamily(ell));
        }
        let mut target = rng.random_range(0..total);
        for (hi, h) in self.orders.iter().enumerate() {
            for run in h.runs(ell) {
                let (a, b) = self.qualified_split(run, ell);
                if target >= a * b {
                    target -= a * b;
                    continue;
                }
                let (x, y) = (target / b, target % b);
                let pick = |want_first: bool, idx: u64| -> u32 {
                    run.iter()
                        .copied()
                        .filter(|&id| self.ids.is_first(id) == want_first && self.ids.len(id) >= ell)
                        .nth(idx as usize)
                        .expect("index lies within the qualified members")
                };
                let s1 = pick(true, x);
                let s2 = pick(false, y);
                return Ok((self.ids.locate(s1).1, self.ids.locate(s2).1, hi));
            }
        }
        unreachable!("target is below the total count")
    }

    /// Every element of `C_ell` as `(pos1, pos2, hash index)`.
    pub fn enumerate_collisions(&self, ell: usize) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.orders.iter().enumerate().flat_map(move |(hi, h)| {
            h.runs(ell).flat_map(move |run| {
                let keep = move |want_first: bool| {
                    run.iter().copied().filter(move |&id| self.ids.is_first(id) == want_first && self.ids.len(id) >= ell)
                };
                keep(true).flat_map(move |s1| {
                    keep(false).map(move |s2| (self.ids.locate(s1).1, self.ids.locate(s2).1, hi))
                })
            })
        })
    }

    /// Distinct `(pos1, pos2)` pairs of `C_ell`, sorted.
    pub fn collision_pairs(&self, ell: usize) -> Vec<(usize, usize)> {
        let mut keys: Vec<u64> = self
            .enumerate_collisions(ell)
            .map(|(a, b, _)| ((a as u64) << 32) | b as u64)
            .collect();
        keys.sort_unstable();
        keys.dedup();
        keys.into_iter().map(|k| ((k >> 32) as usize, (k & 0xffff_ffff) as usize)).collect()
    }
}
