//! Integer-coded texts, the shared alphabet, Hamming distance and the
//! [`Match`] result type.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A string over the integer alphabet `[0, sigma)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Text {
    symbols: Vec<u32>,
    sigma: u32,
    origin: Option<String>,
}

impl Text {
    pub fn new(symbols: Vec<u32>, sigma: u32) -> Result<Self> {
        if sigma == 0 {
            return Err(Error::InvalidParameter("alphabet size must be at least 1".into()));
        }
        if let Some(&bad) = symbols.iter().find(|&&c| c >= sigma) {
            return Err(Error::SymbolOutOfRange { symbol: bad, sigma });
        }
        Ok(Text { symbols, sigma, origin: None })
    }

    /// A text over `{0, 1}`; any other code is rejected.
    pub fn binary(bits: Vec<u32>) -> Result<Self> {
        if let Some(pos) = bits.iter().position(|&b| b > 1) {
            return Err(Error::NonBinary { symbol: bits[pos], pos });
        }
        Ok(Text { symbols: bits, sigma: 2, origin: None })
    }

    pub fn with_origin(mut self, origin: impl Into<String>) -> Self {
        self.origin = Some(origin.into());
        self
    }

    pub fn symbols(&self) -> &[u32] {
        &self.symbols
    }

    pub fn sigma(&self) -> u32 {
        self.sigma
    }

    pub fn origin(&self) -> Option<&str> {
        self.origin.as_deref()
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

/// Dense byte alphabet shared by a pair of inputs: the distinct bytes, sorted,
/// are assigned codes `0, 1, ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    bytes: Vec<u8>,
    codes: [Option<u32>; 256],
}

impl Alphabet {
    pub fn from_inputs<'a>(inputs: impl IntoIterator<Item = &'a [u8]>) -> Self {
        let mut seen = [false; 256];
        for input in inputs {
            for &b in input {
                seen[b as usize] = true;
            }
        }
        let bytes: Vec<u8> = (0..=255u8).filter(|&b| seen[b as usize]).collect();
        let mut codes = [None; 256];
        for (code, &b) in bytes.iter().enumerate() {
            codes[b as usize] = Some(code as u32);
        }
        Alphabet { bytes, codes }
    }

    /// Alphabet size; at least 1 so that empty inputs still form a valid text.
    pub fn sigma(&self) -> u32 {
        self.bytes.len().max(1) as u32
    }

    pub fn encode(&self, input: &[u8]) -> Result<Text> {
        let symbols = input
            .iter()
            .map(|&b| {
                self.codes[b as usize].ok_or(Error::SymbolOutOfRange {
                    symbol: b as u32,
                    sigma: self.sigma(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Text::new(symbols, self.sigma())
    }

    pub fn decode(&self, text: &Text) -> Vec<u8> {
        text.symbols().iter().map(|&c| self.bytes[c as usize]).collect()
    }
}

/// Encode two byte strings over their joint alphabet.
pub fn encode_pair(a: &[u8], b: &[u8]) -> (Alphabet, Text, Text) {
    let alphabet = Alphabet::from_inputs([a, b]);
    let ta = alphabet.encode(a).expect("alphabet covers its own inputs");
    let tb = alphabet.encode(b).expect("alphabet covers its own inputs");
    (alphabet, ta, tb)
}

pub fn hamming_distance<T: PartialEq>(a: &[T], b: &[T]) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    Ok(a.iter().zip(b).filter(|(x, y)| x != y).count())
}

/// An aligned pair of substrings: `t1[pos1..pos1+len]` against `t2[pos2..pos2+len]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Match {
    pub pos1: usize,
    pub pos2: usize,
    pub len: usize,
    pub mismatches: usize,
}

impl Match {
    pub const EMPTY: Match = Match { pos1: 0, pos2: 0, len: 0, mismatches: 0 };

    /// Builds a match and counts its mismatches directly.
    pub fn verified<T: PartialEq>(t1: &[T], t2: &[T], pos1: usize, pos2: usize, len: usize) -> Result<Self> {
        if pos1 + len > t1.len() {
            return Err(Error::PositionOutOfRange { pos: pos1 + len, limit: t1.len() });
        }
        if pos2 + len > t2.len() {
            return Err(Error::PositionOutOfRange { pos: pos2 + len, limit: t2.len() });
        }
        let mismatches = hamming_distance(&t1[pos1..pos1 + len], &t2[pos2..pos2 + len])?;
        Ok(Match { pos1, pos2, len, mismatches })
    }

    /// Re-counts the mismatches and checks bounds.
    pub fn recheck<T: PartialEq>(&self, t1: &[T], t2: &[T]) -> bool {
        Match::verified(t1, t2, self.pos1, self.pos2, self.len)
            .map(|m| m.mismatches == self.mismatches)
            .unwrap_or(false)
    }

    /// Longer wins; ties go to the smaller `pos1`, then the smaller `pos2`.
    pub fn is_better_than(&self, other: &Match) -> bool {
        (self.len, std::cmp::Reverse(self.pos1), std::cmp::Reverse(self.pos2))
            > (other.len, std::cmp::Reverse(other.pos1), std::cmp::Reverse(other.pos2))
    }
}
