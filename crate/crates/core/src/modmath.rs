//! Prime-field helpers: deterministic 64-bit primality, prime search, exact
//! windowed correlation modulo an arbitrary 64-bit prime, and Karp–Rabin
//! fingerprints.

use crate::error::{Error, Result};

/// Largest prime below 2^64.
pub const LARGEST_U64_PRIME: u64 = 18_446_744_073_709_551_557;

#[inline]
pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let (s, carry) = a.overflowing_add(b);
    if carry || s >= p {
        s.wrapping_sub(p)
    } else {
        s
    }
}

pub fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin; the first twelve primes as witnesses cover all of u64.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &w in &WITNESSES {
        if n % w == 0 {
            return n == w;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime `>= min`.
pub fn find_prime(min: u128) -> Result<u64> {
    if min > LARGEST_U64_PRIME as u128 {
        return Err(Error::PrimeOutOfRange(min));
    }
    let mut candidate = (min as u64).max(2);
    while !is_prime(candidate) {
        candidate += 1;
    }
    Ok(candidate)
}

/// A prime modulus fitting in a machine word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidParameter(format!("{p} is not prime")));
        }
        Ok(PrimeField { p })
    }

    /// The field of the smallest prime `>= min`.
    pub fn at_least(min: u128) -> Result<Self> {
        find_prime(min).map(|p| PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        add_mod(a, b, self.p)
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        mul_mod(a, b, self.p)
    }

    pub fn pow(&self, a: u64, e: u64) -> u64 {
        pow_mod(a, e, self.p)
    }
}

/// `result[j] = sum_q pattern[q] * text[j + q] mod p` for every window start `j`.
///
/// Exact for any 64-bit prime. Sparse patterns are accumulated directly in
/// 128-bit integers; dense ones go through a three-prime NTT with CRT
/// reconstruction, splitting the pattern into 32-bit halves when the exact
/// integer sums could exceed the CRT range.
pub fn correlate_mod(pattern: &[u64], text: &[u32], p: u64) -> Result<Vec<u64>> {
    if pattern.is_empty() {
        return Err(Error::Empty("pattern"));
    }
    if pattern.len() > text.len() {
        return Err(Error::PatternTooLong { pattern: pattern.len(), text: text.len() });
    }
    if p < 2 {
        return Err(Error::InvalidParameter(format!("modulus {p} is not prime")));
    }
    let pattern: Vec<u64> = pattern.iter().map(|&c| c % p).collect();
    let windows = text.len() - pattern.len() + 1;
    let nonzero: Vec<(usize, u64)> = pattern.iter().copied().enumerate().filter(|&(_, c)| c != 0).collect();

    let size = (text.len() + pattern.len()).next_power_of_two();
    let ntt_cost = 9 * size * (size.trailing_zeros() as usize + 1);
    if nonzero.len() * windows <= ntt_cost {
        return Ok(correlate_sparse(&nonzero, text, windows, p));
    }

    let max_text = text.iter().copied().max().unwrap_or(0) as u128;
    let bound = |max_coef: u128| max_coef * max_text * pattern.len() as u128;
    if bound(p as u128 - 1) < ntt::CRT_RANGE {
        let wide = ntt::correlate_exact(&pattern, text);
        return Ok(wide.into_iter().take(windows).map(|v| (v % p as u128) as u64).collect());
    }
    if bound(u32::MAX as u128) >= ntt::CRT_RANGE {
        return Ok(correlate_sparse(&nonzero, text, windows, p));
    }
    let lo: Vec<u64> = pattern.iter().map(|&c| c & 0xffff_ffff).collect();
    let hi: Vec<u64> = pattern.iter().map(|&c| c >> 32).collect();
    let lo = ntt::correlate_exact(&lo, text);
    let hi = ntt::correlate_exact(&hi, text);
    let shift = pow_mod(2, 32, p);
    Ok((0..windows)
        .map(|j| {
            let l = (lo[j] % p as u128) as u64;
            let h = (hi[j] % p as u128) as u64;
            add_mod(l, mul_mod(h, shift, p), p)
        })
        .collect())
}

fn correlate_sparse(nonzero: &[(usize, u64)], text: &[u32], windows: usize, p: u64) -> Vec<u64> {
    // Reduce every 2^32 products, well inside u128 even for p near 2^64.
    const FLUSH: usize = 1 << 20;
    let mut acc = vec![0u128; windows];
    for (chunk_idx, chunk) in nonzero.chunks(FLUSH).enumerate() {
        for &(q, c) in chunk {
            for (a, &t) in acc.iter_mut().zip(&text[q..q + windows]) {
                *a += c as u128 * t as u128;
            }
        }
        if chunk_idx > 0 || nonzero.len() > FLUSH {
            for a in acc.iter_mut() {
                *a %= p as u128;
            }
        }
    }
    acc.into_iter().map(|a| (a % p as u128) as u64).collect()
}

/// Karp–Rabin fingerprint `sum_q seq[q] * r^(q+1) mod p` (exponents start at 1).
pub fn karp_rabin(seq: &[u32], r: u64, p: u64) -> u64 {
    let mut power = r % p;
    let mut acc = 0u64;
    for &c in seq {
        acc = add_mod(acc, mul_mod(c as u64 % p, power, p), p);
        power = mul_mod(power, r, p);
    }
    acc
}

mod ntt {
    //! Three-prime NTT convolution with exact CRT reconstruction.

    const PRIMES: [u64; 3] = [998_244_353, 167_772_161, 469_762_049];
    const ROOT: u64 = 3;

    /// Product of the three primes; exact sums must stay below it.
    pub(super) const CRT_RANGE: u128 = 998_244_353u128 * 167_772_161 * 469_762_049;

    fn pow(mut b: u64, mut e: u64, m: u64) -> u64 {
        let mut acc = 1;
        b %= m;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % m;
            }
            b = b * b % m;
            e >>= 1;
        }
        acc
    }

    fn transform(a: &mut [u64], invert: bool, m: u64) {
        let n = a.len();
        let mut j = 0;
        for i in 1..n {
            let mut bit = n >> 1;
            while j & bit != 0 {
                j ^= bit;
                bit >>= 1;
            }
            j |= bit;
            if i < j {
                a.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let mut w = pow(ROOT, (m - 1) / len as u64, m);
            if invert {
                w = pow(w, m - 2, m);
            }
            for start in (0..n).step_by(len) {
                let mut wn = 1;
                for k in 0..len / 2 {
                    let u = a[start + k];
                    let v = a[start + k + len / 2] * wn % m;
                    a[start + k] = if u + v >= m { u + v - m } else { u + v };
                    a[start + k + len / 2] = if u >= v { u - v } else { u + m - v };
                    wn = wn * w % m;
                }
            }
            len <<= 1;
        }
        if invert {
            let inv = pow(n as u64, m - 2, m);
            for x in a.iter_mut() {
                *x = *x * inv % m;
            }
        }
    }

    fn correlate_one(pattern: &[u64], text: &[u32], m: u64, size: usize) -> Vec<u64> {
        let mut a = vec![0u64; size];
        let mut b = vec![0u64; size];
        for (q, &c) in pattern.iter().rev().enumerate() {
            a[q] = c % m;
        }
        for (i, &t) in text.iter().enumerate() {
            b[i] = t as u64 % m;
        }
        transform(&mut a, false, m);
        transform(&mut b, false, m);
        for (x, y) in a.iter_mut().zip(&b) {
            *x = *x * y % m;
        }
        transform(&mut a, true, m);
        a
    }

    /// Exact integer correlation values for every window start (as u128).
    pub(super) fn correlate_exact(pattern: &[u64], text: &[u32]) -> Vec<u128> {
        let size = (text.len() + pattern.len()).next_power_of_two();
        let windows = text.len() - pattern.len() + 1;
        let residues: Vec<Vec<u64>> = PRIMES.iter().map(|&m| correlate_one(pattern, text, m, size)).collect();
        let (m0, m1, m2) = (PRIMES[0] as u128, PRIMES[1] as u128, PRIMES[2] as u128);
        let inv_m0_mod_m1 = pow(PRIMES[0], PRIMES[1] - 2, PRIMES[1]) as u128;
        let inv_m01_mod_m2 = pow((m0 * m1 % m2) as u64, PRIMES[2] - 2, PRIMES[2]) as u128;
        (0..windows)
            .map(|j| {
                let idx = j + pattern.len() - 1;
                let (r0, r1, r2) = (residues[0][idx] as u128, residues[1][idx] as u128, residues[2][idx] as u128);
                let x1 = (r1 + m1 - r0 % m1) % m1 * inv_m0_mod_m1 % m1;
                let v01 = r0 + m0 * x1;
                let x2 = (r2 + m2 - v01 % m2) % m2 * inv_m01_mod_m2 % m2;
                v01 + m0 * m1 * x2
            })
            .collect()
    }
}
