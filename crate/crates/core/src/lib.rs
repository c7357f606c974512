//! Longest common substrings of two strings under Hamming mismatch budgets.
//!
//! * [`exact`]: classic LCS, the quadratic k-mismatch algorithm and a brute-force reference.
//! * [`sketch`]: modular inner-product sketches of power-of-two substrings and approximate
//!   bounded-mismatch LCP queries.
//! * [`lsh`]: projection hashing of suffixes, hash orders and collision families.
//! * [`driver`]: the LSH + sketch algorithm for approximately k mismatches, its repetition
//!   wrapper and the 2-approximation.
//! * [`jumbled`]: binary jumbled indexing and the all-k solver.
//! * [`hardness`]: orthogonal-vectors gadgets with exact gap verification.

pub mod budget;
pub mod driver;
pub mod error;
pub mod exact;
pub mod hardness;
pub mod instances;
pub mod jumbled;
pub mod lsh;
pub mod modmath;
pub mod rmq;
pub mod sketch;
pub mod suffix;
pub mod text;

pub use driver::{lcs_approx_k, lcs_approx_k_once, lcs_k_2approx, ApproxReport, DriverConfig, RunReport};
pub use error::{Error, Result};
pub use exact::{lcs_exact, lcs_k_bruteforce, lcs_k_diagonal};
pub use hardness::{GadgetInstance, OvInstance};
pub use jumbled::{lcs_all_k, JumbledIndex};
pub use lsh::{LshConfig, LshParams, Method, MethodChoice};
pub use sketch::{BuildStrategy, SketchConfig, SketchParams, SketchTable};
pub use suffix::{MismatchStream, Side, SuffixContext};
pub use text::{encode_pair, hamming_distance, Alphabet, Match, Text};
