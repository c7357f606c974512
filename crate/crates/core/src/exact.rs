//! Exact baselines: classic longest common substring, the quadratic
//! diagonal algorithm for k mismatches, and an exhaustive reference.

use rayon::prelude::*;

use crate::suffix::SuffixContext;
use crate::text::Match;

/// Longest common substring (no mismatches) by scanning suffix-array
/// neighbours that come from opposite texts.
pub fn lcs_exact(t1: &[u32], t2: &[u32]) -> Match {
    if t1.is_empty() || t2.is_empty() {
        return Match::EMPTY;
    }
    let sigma = t1.iter().chain(t2).copied().max().unwrap_or(0) + 1;
    let ctx = SuffixContext::new(t1, t2, sigma).expect("sigma covers every symbol");
    lcs_exact_in(&ctx)
}

/// Same as [`lcs_exact`] on an already built context.
pub fn lcs_exact_in(ctx: &SuffixContext) -> Match {
    let (len1, off) = (ctx.len1(), ctx.second_offset());
    let side = |p: usize| {
        if p < len1 {
            Some((0u8, p))
        } else if p >= off && p < off + ctx.len2() {
            Some((1u8, p - off))
        } else {
            None
        }
    };
    let sa = ctx.sa();
    let lcp = ctx.lcp_array();
    let mut best = Match::EMPTY;
    for r in 1..sa.len() {
        let (Some(a), Some(b)) = (side(sa[r - 1] as usize), side(sa[r] as usize)) else {
            continue;
        };
        if a.0 == b.0 {
            continue;
        }
        let (pos1, pos2) = if a.0 == 0 { (a.1, b.1) } else { (b.1, a.1) };
        let overlap = (len1 - pos1).min(ctx.len2() - pos2);
        let len = (lcp[r] as usize).min(overlap);
        let cand = Match { pos1, pos2, len, mismatches: 0 };
        if len > 0 && cand.is_better_than(&best) {
            best = cand;
        }
    }
    best
}

/// Exact longest common substring with at most `k` mismatches: a two-pointer
/// window along every alignment diagonal. O(|t1|·|t2|) time.
pub fn lcs_k_diagonal<T: PartialEq + Sync>(t1: &[T], t2: &[T], k: usize) -> Match {
    if t1.is_empty() || t2.is_empty() {
        return Match::EMPTY;
    }
    let (n1, n2) = (t1.len() as isize, t2.len() as isize);
    (-(n1 - 1)..n2)
        .into_par_iter()
        .map(|shift| {
            let (i0, j0) = if shift < 0 { ((-shift) as usize, 0) } else { (0, shift as usize) };
            best_on_diagonal(t1, t2, i0, j0, k)
        })
        .reduce(|| Match::EMPTY, |a, b| if b.is_better_than(&a) { b } else { a })
}

fn best_on_diagonal<T: PartialEq>(t1: &[T], t2: &[T], i0: usize, j0: usize, k: usize) -> Match {
    let len = (t1.len() - i0).min(t2.len() - j0);
    let differs = |q: usize| t1[i0 + q] != t2[j0 + q];
    let mut best = Match::EMPTY;
    let mut start = 0;
    let mut inside = 0;
    for end in 0..len {
        if differs(end) {
            inside += 1;
        }
        while inside > k {
            if differs(start) {
                inside -= 1;
            }
            start += 1;
        }
        let width = end + 1 - start;
        if width > best.len {
            best = Match { pos1: i0 + start, pos2: j0 + start, len: width, mismatches: inside };
        }
    }
    best
}

/// Exhaustive reference: from every start pair, extend until the
/// `(k+1)`-th mismatch. O(|t1|·|t2|·min(|t1|,|t2|)); test scale only.
pub fn lcs_k_bruteforce<T: PartialEq>(t1: &[T], t2: &[T], k: usize) -> Match {
    let mut best = Match::EMPTY;
    for pos1 in 0..t1.len() {
        for pos2 in 0..t2.len() {
            let mut mismatches = 0;
            let mut len = 0;
            for (a, b) in t1[pos1..].iter().zip(&t2[pos2..]) {
                let extra = (a != b) as usize;
                if mismatches + extra > k {
                    break;
                }
                mismatches += extra;
                len += 1;
            }
            let cand = Match { pos1, pos2, len, mismatches };
            if len > 0 && cand.is_better_than(&best) {
                best = cand;
            }
        }
    }
    best
}
