//! Joint suffix array over `T1 $^n T2 $^n` with LCP + RMQ, giving O(1)
//! longest-common-extension queries and the kangaroo method on top of them.

use crate::error::{Error, Result};
use crate::rmq::SparseTable;
use crate::text::Text;

/// Which input a suffix belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    First,
    Second,
}

#[derive(Debug, Clone)]
pub struct SuffixContext {
    joined: Vec<u32>,
    len1: usize,
    len2: usize,
    pad: usize,
    sigma: u32,
    sa: Vec<u32>,
    rank: Vec<u32>,
    lcp: Vec<u32>,
    rmq: SparseTable,
}

impl SuffixContext {
    /// Builds the context for two texts over `[0, sigma)`. The sentinel is
    /// code `sigma`; each text is followed by `n = max(|t1|, |t2|)` copies of
    /// it, so every suffix has at least `n` characters.
    pub fn new(t1: &[u32], t2: &[u32], sigma: u32) -> Result<Self> {
        if let Some(&bad) = t1.iter().chain(t2).find(|&&c| c >= sigma) {
            return Err(Error::SymbolOutOfRange { symbol: bad, sigma });
        }
        let pad = t1.len().max(t2.len());
        let mut joined = Vec::with_capacity(t1.len() + t2.len() + 2 * pad);
        joined.extend_from_slice(t1);
        joined.extend(std::iter::repeat_n(sigma, pad));
        joined.extend_from_slice(t2);
        joined.extend(std::iter::repeat_n(sigma, pad));

        let sa = suffix_array(&joined, sigma as usize + 1);
        let mut rank = vec![0u32; joined.len()];
        for (r, &p) in sa.iter().enumerate() {
            rank[p as usize] = r as u32;
        }
        let lcp = kasai(&joined, &sa, &rank);
        let rmq = SparseTable::new(&lcp);
        Ok(SuffixContext { joined, len1: t1.len(), len2: t2.len(), pad, sigma, sa, rank, lcp, rmq })
    }

    pub fn from_texts(t1: &Text, t2: &Text) -> Result<Self> {
        let sigma = t1.sigma().max(t2.sigma());
        Self::new(t1.symbols(), t2.symbols(), sigma)
    }

    pub fn joined(&self) -> &[u32] {
        &self.joined
    }

    pub fn sa(&self) -> &[u32] {
        &self.sa
    }

    pub fn rank(&self) -> &[u32] {
        &self.rank
    }

    pub fn lcp_array(&self) -> &[u32] {
        &self.lcp
    }

    pub fn len1(&self) -> usize {
        self.len1
    }

    pub fn len2(&self) -> usize {
        self.len2
    }

    /// `n = max(|t1|, |t2|)`: the sentinel block length and padded suffix length.
    pub fn pad(&self) -> usize {
        self.pad
    }

    pub fn sigma(&self) -> u32 {
        self.sigma
    }

    pub fn sentinel(&self) -> u32 {
        self.sigma
    }

    pub fn t1(&self) -> &[u32] {
        &self.joined[..self.len1]
    }

    pub fn t2(&self) -> &[u32] {
        let start = self.second_offset();
        &self.joined[start..start + self.len2]
    }

    /// Joined-string offset of the second text.
    pub fn second_offset(&self) -> usize {
        self.len1 + self.pad
    }

    pub fn joined_pos(&self, side: Side, pos: usize) -> usize {
        match side {
            Side::First => pos,
            Side::Second => self.second_offset() + pos,
        }
    }

    /// Text-local length of the suffix starting at `pos` on `side`.
    pub fn suffix_len(&self, side: Side, pos: usize) -> usize {
        match side {
            Side::First => self.len1 - pos,
            Side::Second => self.len2 - pos,
        }
    }

    /// Longest common prefix of suffixes `i` and `j` of the joined string.
    pub fn lce(&self, i: usize, j: usize) -> Result<usize> {
        let limit = self.joined.len();
        for p in [i, j] {
            if p >= limit {
                return Err(Error::PositionOutOfRange { pos: p, limit });
            }
        }
        Ok(self.lce_unchecked(i, j))
    }

    #[inline]
    pub fn lce_unchecked(&self, i: usize, j: usize) -> usize {
        if i == j {
            return self.joined.len() - i;
        }
        let (a, b) = (self.rank[i] as usize, self.rank[j] as usize);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        self.rmq.min(lo + 1, hi + 1) as usize
    }

    fn check_pair(&self, pos1: usize, pos2: usize) -> Result<()> {
        if pos1 > self.len1 {
            return Err(Error::PositionOutOfRange { pos: pos1, limit: self.len1 });
        }
        if pos2 > self.len2 {
            return Err(Error::PositionOutOfRange { pos: pos2, limit: self.len2 });
        }
        Ok(())
    }

    /// Longest common prefix of `t1[pos1..]` and `t2[pos2..]` with at most `k`
    /// mismatches, by at most `k + 1` LCE jumps.
    pub fn lcp_k(&self, pos1: usize, pos2: usize, k: usize) -> Result<usize> {
        self.check_pair(pos1, pos2)?;
        Ok(self.lcp_k_unchecked(pos1, pos2, k))
    }

    pub fn lcp_k_unchecked(&self, pos1: usize, pos2: usize, k: usize) -> usize {
        let overlap = (self.len1 - pos1).min(self.len2 - pos2);
        let a = pos1;
        let b = self.second_offset() + pos2;
        let mut offset = 0;
        let mut budget = k;
        loop {
            if offset >= overlap {
                return overlap;
            }
            offset += self.lce_unchecked(a + offset, b + offset);
            if offset >= overlap {
                return overlap;
            }
            if budget == 0 {
                return offset;
            }
            budget -= 1;
            offset += 1;
        }
    }

    /// Mismatch offsets (0-based) between `t1[pos1..]` and `t2[pos2..]`,
    /// up to the end of the shorter suffix.
    pub fn mismatches(&self, pos1: usize, pos2: usize) -> Result<MismatchStream<'_>> {
        self.check_pair(pos1, pos2)?;
        let overlap = (self.len1 - pos1).min(self.len2 - pos2);
        Ok(MismatchStream { ctx: self, a: pos1, b: self.second_offset() + pos2, offset: 0, limit: overlap })
    }

    /// Mismatch offsets between joined suffixes `a` and `b` within their first
    /// `limit` characters, sentinels included (`$` equals `$`).
    pub fn joined_mismatches(&self, a: usize, b: usize, limit: usize) -> MismatchStream<'_> {
        debug_assert!(a + limit <= self.joined.len() && b + limit <= self.joined.len());
        MismatchStream { ctx: self, a, b, offset: 0, limit }
    }
}

/// Lazily produced, strictly increasing mismatch offsets.
#[derive(Debug, Clone)]
pub struct MismatchStream<'a> {
    ctx: &'a SuffixContext,
    a: usize,
    b: usize,
    offset: usize,
    limit: usize,
}

impl Iterator for MismatchStream<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.offset >= self.limit {
            return None;
        }
        self.offset += self.ctx.lce_unchecked(self.a + self.offset, self.b + self.offset);
        if self.offset >= self.limit {
            self.offset = self.limit;
            return None;
        }
        let at = self.offset;
        self.offset += 1;
        Some(at)
    }
}

/// Prefix doubling with radix passes, O(n log n).
fn suffix_array(s: &[u32], alphabet: usize) -> Vec<u32> {
    let n = s.len();
    if n == 0 {
        return Vec::new();
    }
    let mut sa: Vec<u32> = (0..n as u32).collect();
    let mut rank: Vec<u32> = s.to_vec();
    let mut tmp = vec![0u32; n];
    let mut second = vec![0u32; n];
    let mut classes = alphabet.max(n) + 1;

    counting_sort(&mut sa, &rank, classes);
    let mut k = 1;
    loop {
        // Order by the second key: suffixes without a partner first, then by rank of i + k.
        let mut w = 0;
        for i in (n - k.min(n))..n {
            second[w] = i as u32;
            w += 1;
        }
        for &p in sa.iter() {
            if p as usize >= k {
                second[w] = p - k as u32;
                w += 1;
            }
        }
        // Stable counting sort by the first key.
        let mut count = vec![0usize; classes + 1];
        for &r in &rank {
            count[r as usize + 1] += 1;
        }
        for c in 1..count.len() {
            count[c] += count[c - 1];
        }
        for &p in &second {
            let r = rank[p as usize] as usize;
            sa[count[r]] = p;
            count[r] += 1;
        }
        tmp[sa[0] as usize] = 0;
        let key = |p: usize| {
            let hi = rank[p];
            let lo = if p + k < n { rank[p + k] as i64 } else { -1 };
            (hi, lo)
        };
        let mut distinct = 1;
        for r in 1..n {
            if key(sa[r] as usize) != key(sa[r - 1] as usize) {
                distinct += 1;
            }
            tmp[sa[r] as usize] = distinct as u32 - 1;
        }
        std::mem::swap(&mut rank, &mut tmp);
        if distinct == n {
            break;
        }
        classes = distinct;
        k *= 2;
    }
    sa
}

fn counting_sort(sa: &mut [u32], keys: &[u32], classes: usize) {
    let mut count = vec![0usize; classes + 1];
    for &c in keys {
        count[c as usize + 1] += 1;
    }
    for c in 1..count.len() {
        count[c] += count[c - 1];
    }
    for i in 0..keys.len() {
        let c = keys[i] as usize;
        sa[count[c]] = i as u32;
        count[c] += 1;
    }
}

/// Kasai's algorithm: `lcp[r]` is the LCP of `sa[r - 1]` and `sa[r]`, `lcp[0] = 0`.
fn kasai(s: &[u32], sa: &[u32], rank: &[u32]) -> Vec<u32> {
    let n = s.len();
    let mut lcp = vec![0u32; n];
    let mut h = 0usize;
    for i in 0..n {
        let r = rank[i] as usize;
        if r == 0 {
            h = 0;
            continue;
        }
        let j = sa[r - 1] as usize;
        while i + h < n && j + h < n && s[i + h] == s[j + h] {
            h += 1;
        }
        lcp[r] = h as u32;
        h = h.saturating_sub(1);
    }
    lcp
}
