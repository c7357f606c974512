//! Longest common substring with approximately `k` mismatches.
//!
//! One run: sketch every power-of-two window, hash all suffixes with the
//! projection family, find the deepest level `ℓ` with `|C_ℓ| >= 2n|H|`, query
//! the approximate LCP of every pair colliding at level `ℓ + 1`, and check one
//! uniformly sampled pair of level `ℓ` exactly. A run succeeds with constant
//! probability; [`lcs_approx_k`] repeats it and keeps verified answers only.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::budget;
use crate::error::{Error, Result};
use crate::lsh::{derive_lsh_params, FamilyStats, LshConfig, LshFamily, LshParams};
use crate::sketch::{build_sketch_table_with, derive_params_with, QueryScratch, SketchConfig, SketchParams, SketchTable};
use crate::suffix::SuffixContext;
use crate::text::Match;

/// Default per-run failure bound `f`.
pub const DEFAULT_FAILURE_BOUND: f64 = 0.75;

#[derive(Debug, Clone, PartialEq)]
pub struct DriverConfig {
    pub lsh: LshConfig,
    pub sketch: SketchConfig,
    /// Per-run failure bound used to size the repetition count.
    pub failure_bound: f64,
}

impl Default for DriverConfig {
    fn default() -> Self {
        DriverConfig { lsh: LshConfig::default(), sketch: SketchConfig::default(), failure_bound: DEFAULT_FAILURE_BOUND }
    }
}

/// What one run saw.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub found: Match,
    /// `None` when even `|C_0|` is below the bound; level 0 is then enumerated.
    pub threshold: Option<usize>,
    pub hash_functions: usize,
    /// Distinct pairs queried with the sketch.
    pub queried_pairs: usize,
    /// The exactly checked sample from `C_ℓ`.
    pub sampled: Option<Match>,
    pub stats: FamilyStats,
}

/// The outcome of the repeated algorithm.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproxReport {
    pub found: Match,
    pub trivial: bool,
    pub repetitions: usize,
    /// Runs whose answer failed the mismatch check and was discarded.
    pub rejected: usize,
    pub lsh: Option<LshParams>,
    pub sketch: Option<SketchParams>,
    pub runs: Vec<RunReport>,
}

/// `r = ⌈ln(1/δ) / ln(1/f)⌉`.
pub fn repetitions(delta: f64, failure_bound: f64) -> Result<usize> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("delta must lie in (0, 1), got {delta}")));
    }
    if !(failure_bound > 0.0 && failure_bound < 1.0) {
        return Err(Error::InvalidParameter(format!("failure bound must lie in (0, 1), got {failure_bound}")));
    }
    Ok(((1.0 / delta).ln() / (1.0 / failure_bound).ln() - 1e-12).ceil().max(1.0) as usize)
}

fn sigma_of(t1: &[u32], t2: &[u32]) -> u32 {
    t1.iter().chain(t2).copied().max().unwrap_or(0) + 1
}

/// The longest aligned pair starting at `(0, 0)`: what the trivial branch returns.
fn full_alignment(t1: &[u32], t2: &[u32]) -> Match {
    Match::verified(t1, t2, 0, 0, t1.len().min(t2.len())).expect("within bounds")
}

/// Preprocessing shared by all runs on one instance: suffix structures and
/// the sketch table. Each run samples its own hash family.
pub struct ApproxSolver<'a> {
    t1: &'a [u32],
    t2: &'a [u32],
    k: usize,
    eps: f64,
    ctx: SuffixContext,
    table: SketchTable,
    lsh: LshParams,
    config: DriverConfig,
}

impl<'a> ApproxSolver<'a> {
    /// Fails with [`Error::TrivialInstance`] when `(1+ε)k >= n`.
    pub fn new(t1: &'a [u32], t2: &'a [u32], k: usize, eps: f64, seed: u64, config: DriverConfig) -> Result<Self> {
        if t1.is_empty() || t2.is_empty() {
            return Err(Error::Empty("input text"));
        }
        let n = t1.len().max(t2.len());
        let sigma = sigma_of(t1, t2);
        let sketch = derive_params_with(n, k, eps, sigma, &config.sketch)?;
        let lsh = derive_lsh_params(n, k, eps, config.lsh.s_factor)?;
        let ctx = SuffixContext::new(t1, t2, sigma)?;
        let table = build_sketch_table_with(t1, t2, &sketch, seed, config.sketch.strategy)?;
        Ok(ApproxSolver { t1, t2, k, eps, ctx, table, lsh, config })
    }

    pub fn lsh_params(&self) -> &LshParams {
        &self.lsh
    }

    pub fn sketch_params(&self) -> &SketchParams {
        self.table.params()
    }

    pub fn context(&self) -> &SuffixContext {
        &self.ctx
    }

    pub fn table(&self) -> &SketchTable {
        &self.table
    }

    /// One run of the algorithm with a fresh hash family.
    pub fn run_once(&self, seed: u64) -> Result<RunReport> {
        let family = LshFamily::build(&self.ctx, &self.lsh, &self.config.lsh, seed)?;
        let bound = family.default_bound();
        let threshold = family.find_threshold(bound);
        let enumerate_at = threshold.map_or(0, |l| l + 1);
        let pairs = family.collision_pairs(enumerate_at);

        let best = pairs
            .par_iter()
            .map_init(QueryScratch::default, |scratch, &(pos1, pos2)| {
                let len = self.table.lcp_approx_k_with(pos1, pos2, scratch);
                Match { pos1, pos2, len, mismatches: 0 }
            })
            .reduce(|| Match::EMPTY, |a, b| if b.is_better_than(&a) { b } else { a });
        let mut found = Match::verified(self.t1, self.t2, best.pos1, best.pos2, best.len)?;

        let sampled = match threshold {
            Some(ell) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(4 << 56);
                let (pos1, pos2, _) = family.sample_collision(ell, &mut rng)?;
                let len = self.ctx.lcp_k_unchecked(pos1, pos2, budget::relaxed(self.k, self.eps));
                Some(Match::verified(self.t1, self.t2, pos1, pos2, len)?)
            }
            None => None,
        };
        if let Some(s) = sampled {
            if s.is_better_than(&found) {
                found = s;
            }
        }
        Ok(RunReport {
            found,
            threshold,
            hash_functions: family.len(),
            queried_pairs: pairs.len(),
            sampled,
            stats: family.stats,
        })
    }
}

fn run_seed(seed: u64, run: usize) -> u64 {
    seed ^ (run as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

/// A single run with default knobs.
pub fn lcs_approx_k_once(t1: &[u32], t2: &[u32], k: usize, eps: f64, seed: u64) -> Result<Match> {
    lcs_approx_k_once_with(t1, t2, k, eps, seed, &DriverConfig::default()).map(|r| r.found)
}

/// A single run. The trivial branch returns the full alignment.
pub fn lcs_approx_k_once_with(
    t1: &[u32],
    t2: &[u32],
    k: usize,
    eps: f64,
    seed: u64,
    config: &DriverConfig,
) -> Result<ApproxReport> {
    approx(t1, t2, k, eps, 1, seed, config)
}

pub fn lcs_approx_k(t1: &[u32], t2: &[u32], k: usize, eps: f64, delta: f64, seed: u64) -> Result<Match> {
    lcs_approx_k_with(t1, t2, k, eps, delta, seed, &DriverConfig::default()).map(|r| r.found)
}

/// Repeats the algorithm `r` times and keeps the longest answer with at most
/// `(1+ε)k` mismatches.
pub fn lcs_approx_k_with(
    t1: &[u32],
    t2: &[u32],
    k: usize,
    eps: f64,
    delta: f64,
    seed: u64,
    config: &DriverConfig,
) -> Result<ApproxReport> {
    let r = repetitions(delta, config.failure_bound)?;
    approx(t1, t2, k, eps, r, seed, config)
}

fn approx(t1: &[u32], t2: &[u32], k: usize, eps: f64, r: usize, seed: u64, config: &DriverConfig) -> Result<ApproxReport> {
    let empty = |trivial| ApproxReport {
        found: Match::EMPTY,
        trivial,
        repetitions: 0,
        rejected: 0,
        lsh: None,
        sketch: None,
        runs: Vec::new(),
    };
    if t1.is_empty() || t2.is_empty() {
        budget::validate(usize::MAX, k, eps)?;
        return Ok(empty(false));
    }
    let solver = match ApproxSolver::new(t1, t2, k, eps, seed, config.clone()) {
        Err(Error::TrivialInstance { .. }) => {
            return Ok(ApproxReport { found: full_alignment(t1, t2), ..empty(true) });
        }
        other => other?,
    };
    let runs: Vec<RunReport> =
        (0..r).into_par_iter().map(|i| solver.run_once(run_seed(seed, i))).collect::<Result<_>>()?;
    let allowed = budget::relaxed(k, eps);
    let rejected = runs.iter().filter(|run| run.found.mismatches > allowed).count();
    let found = runs
        .iter()
        .map(|run| run.found)
        .filter(|m| m.mismatches <= allowed)
        .fold(Match::EMPTY, |a, b| if b.is_better_than(&a) { b } else { a });
    Ok(ApproxReport {
        found,
        trivial: false,
        repetitions: r,
        rejected,
        lsh: Some(solver.lsh),
        sketch: Some(*solver.table.params()),
        runs,
    })
}

/// The better of the two halves of a witness with at most `2k` mismatches.
///
/// Both halves have length `⌈len/2⌉` and overlap in the middle character when
/// `len` is odd; their mismatch counts then sum to at most `d + 1 <= 2k + 1`,
/// so one of them has at most `k`. The first half wins ties.
pub fn split_witness<T: PartialEq>(t1: &[T], t2: &[T], witness: &Match, k: usize) -> Result<Match> {
    let half = witness.len.div_ceil(2);
    let first = Match::verified(t1, t2, witness.pos1, witness.pos2, half)?;
    if first.mismatches <= k {
        return Ok(first);
    }
    let shift = witness.len - half;
    let second = Match::verified(t1, t2, witness.pos1 + shift, witness.pos2 + shift, half)?;
    if second.mismatches <= k {
        Ok(second)
    } else {
        Err(Error::InvalidParameter(format!(
            "witness has {} mismatches, more than 2k = {}",
            witness.mismatches,
            2 * k
        )))
    }
}

pub fn lcs_k_2approx(t1: &[u32], t2: &[u32], k: usize, delta: f64, seed: u64) -> Result<Match> {
    lcs_k_2approx_with(t1, t2, k, delta, seed, &DriverConfig::default()).map(|r| r.found)
}

/// A substring pair with at most `k` mismatches and length at least half the
/// optimum (with probability `1 - δ`): the approximate solver at `ε = 1`
/// followed by [`split_witness`].
pub fn lcs_k_2approx_with(
    t1: &[u32],
    t2: &[u32],
    k: usize,
    delta: f64,
    seed: u64,
    config: &DriverConfig,
) -> Result<ApproxReport> {
    let mut report = lcs_approx_k_with(t1, t2, k, 1.0, delta, seed, config)?;
    if report.found.len > 0 {
        report.found = split_witness(t1, t2, &report.found, k)?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::lcs_k_diagonal;
    use crate::lsh::MethodChoice;
    use rand::Rng;

    fn small_config() -> DriverConfig {
        DriverConfig {
            lsh: LshConfig { s_factor: 1.0, family_budget: Some(8), ..LshConfig::default() },
            ..DriverConfig::default()
        }
    }

    fn random_text(rng: &mut impl Rng, n: usize, sigma: u32) -> Vec<u32> {
        (0..n).map(|_| rng.random_range(0..sigma)).collect()
    }

    /// Two random texts sharing a block of length `len` with `k` planted substitutions.
    fn planted(seed: u64, n: usize, len: usize, k: usize, sigma: u32) -> (Vec<u32>, Vec<u32>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t1 = random_text(&mut rng, n, sigma);
        let mut t2 = random_text(&mut rng, n, sigma);
        let (a, b) = (rng.random_range(0..=n - len), rng.random_range(0..=n - len));
        t2[b..b + len].copy_from_slice(&t1[a..a + len]);
        for q in rand::seq::index::sample(&mut rng, len, k) {
            t1[a + q] = (t1[a + q] + 1 + rng.random_range(0..sigma - 1)) % sigma;
        }
        (t1, t2)
    }

    #[test]
    fn repetition_count() {
        assert_eq!(repetitions(0.25, 0.75).unwrap(), 5);
        assert_eq!(repetitions(0.75, 0.75).unwrap(), 1);
        assert_eq!(repetitions(0.5, 0.5).unwrap(), 1);
        assert!(repetitions(0.0, 0.75).is_err());
        assert!(repetitions(0.5, 1.0).is_err());
    }

    #[test]
    fn identical_texts_give_full_length() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = random_text(&mut rng, 300, 4);
        for k in [1, 3] {
            let m = lcs_approx_k_with(&t, &t, k, 1.0, 0.25, 7, &small_config()).unwrap().found;
            assert_eq!((m.len, m.mismatches), (300, 0));
        }
    }

    #[test]
    fn trivial_branch_returns_full_alignment() {
        let t1 = vec![0, 1, 0, 1];
        let t2 = vec![1, 1, 0];
        let report = lcs_approx_k_once_with(&t1, &t2, 2, 1.0, 0, &DriverConfig::default()).unwrap();
        assert!(report.trivial);
        assert_eq!(report.found, Match { pos1: 0, pos2: 0, len: 3, mismatches: 1 });
        assert!(lcs_approx_k(&t1, &t2, 0, 1.0, 0.25, 0).is_err());
        assert_eq!(lcs_approx_k(&[], &t2, 1, 1.0, 0.25, 0).unwrap(), Match::EMPTY);
    }

    #[test]
    fn planted_instances_are_found() {
        for seed in 0..4 {
            let (t1, t2) = planted(seed, 512, 128, 4, 4);
            let target = lcs_k_diagonal(&t1, &t2, 4).len;
            let m = lcs_approx_k_with(&t1, &t2, 4, 1.0, 0.25, seed, &small_config()).unwrap().found;
            assert!(m.recheck(&t1, &t2));
            assert!(m.mismatches <= 8);
            assert!(m.len >= target, "seed {seed}: {} < {target}", m.len);
            assert!(m.len <= lcs_k_diagonal(&t1, &t2, 8).len);
        }
    }

    #[test]
    fn unequal_lengths() {
        let (t1, t2) = planted(5, 400, 100, 2, 4);
        let t2 = &t2[..250];
        let m = lcs_approx_k_with(&t1, t2, 2, 1.0, 0.25, 1, &small_config()).unwrap().found;
        assert!(m.recheck(&t1, t2) && m.mismatches <= 4);
        assert!(m.pos2 + m.len <= 250);
    }

    #[test]
    fn both_preprocessing_methods_run() {
        let (t1, t2) = planted(8, 256, 64, 2, 4);
        for method in [crate::lsh::Method::Kangaroo, crate::lsh::Method::Fingerprint] {
            let mut config = small_config();
            config.lsh.method = MethodChoice::Force(method);
            let report = lcs_approx_k_once_with(&t1, &t2, 2, 1.0, 2, &config).unwrap();
            assert!(report.found.recheck(&t1, &t2));
            assert_eq!(report.runs.len(), 1);
        }
    }

    #[test]
    fn reported_mismatches_are_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for seed in 0..6 {
            let t1 = random_text(&mut rng, 64, 2);
            let t2 = random_text(&mut rng, 64, 2);
            let report = lcs_approx_k_with(&t1, &t2, 2, 1.0, 0.25, seed, &small_config()).unwrap();
            for run in &report.runs {
                assert!(run.found.recheck(&t1, &t2));
            }
            let m = report.found;
            assert!(m.mismatches <= 4);
            // The answer never beats the exact optimum for the relaxed budget.
            assert!(m.len <= lcs_k_diagonal(&t1, &t2, 4).len);
        }
    }

    #[test]
    fn split_examples() {
        let t1 = [0u32; 8];
        let mut t2 = [0u32; 8];
        for q in 4..8 {
            t2[q] = 1;
        }
        let w = Match::verified(&t1, &t2, 0, 0, 8).unwrap();
        assert_eq!(split_witness(&t1, &t2, &w, 2).unwrap(), Match { pos1: 0, pos2: 0, len: 4, mismatches: 0 });
        let mut t2 = [0u32; 8];
        t2[0] = 1;
        t2[1] = 1;
        let w = Match::verified(&t1, &t2, 0, 0, 8).unwrap();
        assert_eq!(split_witness(&t1, &t2, &w, 1).unwrap(), Match { pos1: 4, pos2: 4, len: 4, mismatches: 0 });
        assert!(split_witness(&t1, &[1u32; 8], &Match::verified(&t1, &[1u32; 8], 0, 0, 8).unwrap(), 1).is_err());
    }

    proptest::proptest! {
        #[test]
        fn split_halves_keep_budget(bits in proptest::collection::vec(0u32..2, 1..40), k in 1usize..6) {
            let zeros = vec![0u32; bits.len()];
            let d = bits.iter().filter(|&&b| b == 1).count();
            let w = Match::verified(&zeros, &bits, 0, 0, bits.len()).unwrap();
            let half = split_witness(&zeros, &bits, &w, k);
            if d <= 2 * k {
                let half = half.unwrap();
                proptest::prop_assert!(half.mismatches <= k);
                proptest::prop_assert_eq!(half.len, bits.len().div_ceil(2));
                proptest::prop_assert!(half.recheck(&zeros, &bits));
            }
        }
    }

    #[test]
    fn two_approx_on_identical_texts() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let t = random_text(&mut rng, 200, 4);
        let m = lcs_k_2approx_with(&t, &t, 2, 0.25, 0, &small_config()).unwrap().found;
        assert!(m.len >= 100);
        assert_eq!(m.mismatches, 0);
    }

    #[test]
    fn two_approx_planted() {
        for seed in 0..3 {
            let (t1, t2) = planted(seed + 20, 512, 160, 3, 4);
            let target = lcs_k_diagonal(&t1, &t2, 3).len;
            let m = lcs_k_2approx_with(&t1, &t2, 3, 0.25, seed, &small_config()).unwrap().found;
            assert!(m.mismatches <= 3 && m.recheck(&t1, &t2));
            assert!(m.len >= target.div_ceil(2));
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let (t1, t2) = planted(9, 300, 80, 2, 4);
        let a = lcs_approx_k_with(&t1, &t2, 2, 1.0, 0.25, 11, &small_config()).unwrap();
        let b = lcs_approx_k_with(&t1, &t2, 2, 1.0, 0.25, 11, &small_config()).unwrap();
        assert_eq!(a, b);
    }
}
