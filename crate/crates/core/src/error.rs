use thiserror::Error;

/// Errors raised by the library. Every variant describes rejected input;
/// the algorithms themselves never fail once their preconditions hold.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("position {pos} out of range (limit {limit})")]
    PositionOutOfRange { pos: usize, limit: usize },

    #[error("symbol {symbol} outside alphabet of size {sigma}")]
    SymbolOutOfRange { symbol: u32, sigma: u32 },

    #[error("symbol {symbol} at position {pos} is not binary")]
    NonBinary { symbol: u32, pos: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("pattern of length {pattern} is longer than text of length {text}")]
    PatternTooLong { pattern: usize, text: usize },

    #[error("no 64-bit prime at or above {0}")]
    PrimeOutOfRange(u128),

    #[error("fingerprint prime {got} is below the required {required}")]
    FingerprintPrimeTooSmall { got: u64, required: u64 },

    #[error("trivial instance: (1+eps)k = {budget} >= n = {n}")]
    TrivialInstance { budget: f64, n: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("collision family at level {0} is empty")]
    EmptyCollisionFamily(usize),

    #[error("instance too large for the exact oracle: {0}")]
    OracleScaleExceeded(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
