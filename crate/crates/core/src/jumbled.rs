//! Binary jumbled indexing and the all-k solver.
//!
//! For a binary string the number of ones in a length-`ℓ` window changes by
//! at most one when the window slides, so every count between the minimum and
//! the maximum occurs. Reading each diagonal of the mismatch matrix as a binary
//! string turns "longest window with at most `k` mismatches" into a query on
//! the per-length minima, for every `k` at once.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Per-length minimum and maximum number of ones; index `ℓ` covers windows of length `ℓ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JumbledIndex {
    min_ones: Vec<u32>,
    max_ones: Vec<u32>,
}

impl JumbledIndex {
    /// Length of the indexed string.
    pub fn len(&self) -> usize {
        self.min_ones.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn min_ones(&self, ell: usize) -> Option<u32> {
        (ell >= 1).then(|| self.min_ones.get(ell).copied()).flatten()
    }

    pub fn max_ones(&self, ell: usize) -> Option<u32> {
        (ell >= 1).then(|| self.max_ones.get(ell).copied()).flatten()
    }

    /// Slice indexed by length; entry 0 is the empty window.
    pub fn min_table(&self) -> &[u32] {
        &self.min_ones
    }

    pub fn max_table(&self) -> &[u32] {
        &self.max_ones
    }
}

/// Sliding windows for every length: O(n²) time, O(n) extra space.
pub fn build_jumbled(s: &[u32]) -> Result<JumbledIndex> {
    if s.is_empty() {
        return Err(Error::Empty("binary string"));
    }
    if let Some((pos, &symbol)) = s.iter().enumerate().find(|(_, &c)| c > 1) {
        return Err(Error::NonBinary { symbol, pos });
    }
    Ok(index_bits(s.iter().map(|&c| c == 1)))
}

fn prefix_sums(bits: impl Iterator<Item = bool>) -> Vec<u32> {
    let mut prefix = vec![0u32];
    for b in bits {
        prefix.push(prefix.last().unwrap() + b as u32);
    }
    prefix
}

fn index_bits(bits: impl Iterator<Item = bool>) -> JumbledIndex {
    let prefix = prefix_sums(bits);
    let n = prefix.len() - 1;
    let mut min_ones = vec![0u32; n + 1];
    let mut max_ones = vec![0u32; n + 1];
    for ell in 1..=n {
        let (mut lo, mut hi) = (u32::MAX, 0);
        for w in prefix.windows(ell + 1) {
            let ones = w[ell] - w[0];
            lo = lo.min(ones);
            hi = hi.max(ones);
        }
        min_ones[ell] = lo;
        max_ones[ell] = hi;
    }
    JumbledIndex { min_ones, max_ones }
}

/// Minimum ones per window length only.
fn min_ones_of(bits: impl Iterator<Item = bool>) -> Vec<u32> {
    let prefix = prefix_sums(bits);
    (0..prefix.len())
        .map(|ell| prefix.windows(ell + 1).map(|w| w[ell] - w[0]).min().unwrap_or(0))
        .collect()
}

/// Whether some window of length `ell` holds exactly `q` ones.
pub fn jumbled_query(idx: &JumbledIndex, ell: usize, q: i64) -> Result<bool> {
    if ell == 0 || ell > idx.len() {
        return Err(Error::PositionOutOfRange { pos: ell, limit: idx.len() });
    }
    if q < 0 {
        return Ok(false);
    }
    Ok(idx.min_ones[ell] as i64 <= q && q <= idx.max_ones[ell] as i64)
}

/// `ans[k]` is the longest common substring length with at most `k`
/// mismatches, for `k = 0..=min(|t1|, |t2|)`.
pub fn lcs_all_k<T: PartialEq + Sync>(t1: &[T], t2: &[T]) -> Vec<usize> {
    let best = best_per_length(t1, t2);
    invert(&best)
}

/// `best[ℓ]`: fewest mismatches over all aligned pairs of length `ℓ`.
pub fn best_per_length<T: PartialEq + Sync>(t1: &[T], t2: &[T]) -> Vec<u32> {
    let (n1, n2) = (t1.len() as isize, t2.len() as isize);
    let longest = t1.len().min(t2.len());
    let fresh = || vec![u32::MAX; longest + 1];
    let mut best = (1 - n1..n2)
        .into_par_iter()
        .map(|shift| {
            let (i0, j0) = if shift < 0 { ((-shift) as usize, 0) } else { (0, shift as usize) };
            let len = (t1.len() - i0).min(t2.len() - j0);
            min_ones_of((0..len).map(|q| t1[i0 + q] != t2[j0 + q]))
        })
        .fold(fresh, |mut acc, diag| {
            for (a, d) in acc.iter_mut().zip(diag) {
                *a = (*a).min(d);
            }
            acc
        })
        .reduce(fresh, |mut a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                *x = (*x).min(y);
            }
            a
        });
    if let Some(first) = best.first_mut() {
        *first = 0;
    }
    best
}

/// Since `best` is non-decreasing, one pointer sweep answers every `k`.
fn invert(best: &[u32]) -> Vec<usize> {
    let longest = best.len() - 1;
    let mut ans = Vec::with_capacity(longest + 1);
    let mut ell = 0;
    for k in 0..=longest {
        while ell < longest && best[ell + 1] as usize <= k {
            ell += 1;
        }
        ans.push(ell);
    }
    ans
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::lcs_k_diagonal;
    use proptest::prelude::*;

    fn bits(s: &str) -> Vec<u32> {
        s.bytes().map(|b| (b - b'0') as u32).collect()
    }

    /// Every window of every length, counted directly.
    fn window_counts(s: &[u32]) -> Vec<std::collections::BTreeSet<u32>> {
        (0..=s.len())
            .map(|ell| {
                if ell == 0 {
                    return [0].into();
                }
                s.windows(ell).map(|w| w.iter().sum()).collect()
            })
            .collect()
    }

    #[test]
    fn index_examples() {
        let idx = build_jumbled(&bits("0110")).unwrap();
        assert_eq!((idx.min_ones(2), idx.max_ones(2)), (Some(1), Some(2)));
        assert!(jumbled_query(&idx, 2, 1).unwrap());
        assert!(!jumbled_query(&idx, 2, 0).unwrap());
        assert!(!jumbled_query(&idx, 2, -1).unwrap());
        assert!(jumbled_query(&idx, 5, 1).is_err());
        assert!(jumbled_query(&idx, 0, 0).is_err());
        let zeros = build_jumbled(&[0; 9]).unwrap();
        assert!((1..=9).all(|l| zeros.min_ones(l) == Some(0) && zeros.max_ones(l) == Some(0)));
        assert_eq!(build_jumbled(&[0, 2]), Err(Error::NonBinary { symbol: 2, pos: 1 }));
        assert!(build_jumbled(&[]).is_err());
    }

    #[test]
    fn all_k_examples() {
        assert_eq!(lcs_all_k(b"ab", b"ba"), vec![1, 1, 2]);
        let t = b"abracadabra";
        assert!(lcs_all_k(t, t).iter().all(|&l| l == t.len()));
        assert_eq!(lcs_all_k(b"aaa", b"bbb"), vec![0, 1, 2, 3]);
        assert_eq!(lcs_all_k::<u8>(b"", b"abc"), vec![0]);
    }

    proptest! {
        #[test]
        fn interval_property(s in prop::collection::vec(0u32..2, 1..200)) {
            let idx = build_jumbled(&s).unwrap();
            let counts = window_counts(&s);
            for ell in 1..=s.len() {
                let (lo, hi) = (idx.min_ones(ell).unwrap(), idx.max_ones(ell).unwrap());
                prop_assert_eq!(lo, *counts[ell].first().unwrap());
                prop_assert_eq!(hi, *counts[ell].last().unwrap());
                for q in 0..=ell as u32 {
                    prop_assert_eq!(counts[ell].contains(&q), jumbled_query(&idx, ell, q as i64).unwrap());
                }
            }
            let lo = idx.min_table();
            let hi = idx.max_table();
            prop_assert!(lo.windows(2).all(|w| w[0] <= w[1]));
            prop_assert!(hi.windows(2).all(|w| w[0] <= w[1]));
            prop_assert!(lo.iter().zip(hi).all(|(a, b)| a <= b));
        }

        #[test]
        fn all_k_matches_per_k_oracle(
            a in prop::collection::vec(0u32..3, 0..60),
            b in prop::collection::vec(0u32..3, 0..60),
        ) {
            let ans = lcs_all_k(&a, &b);
            prop_assert_eq!(ans.len(), a.len().min(b.len()) + 1);
            for (k, &len) in ans.iter().enumerate() {
                prop_assert_eq!(len, lcs_k_diagonal(&a, &b, k).len);
            }
            prop_assert!(ans.windows(2).all(|w| w[0] <= w[1]));
            let best = best_per_length(&a, &b);
            prop_assert!(best.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn equal_lengths_reach_full_length() {
        let a: Vec<u32> = (0..50).map(|i| i % 3).collect();
        let b: Vec<u32> = (0..50).map(|i| (i * 7) % 3).collect();
        assert_eq!(*lcs_all_k(&a, &b).last().unwrap(), 50);
    }
}
