use rand::Rng;
use serde::Serialize;

use lcsk::driver::{lcs_approx_k_with, lcs_k_2approx_with, DriverConfig};
use lcsk::exact::{lcs_k_bruteforce, lcs_k_diagonal};
use lcsk::hardness::{verify_gap, OvInstance};
use lcsk::instances::{random_text, rng};
use lcsk::jumbled::{build_jumbled, jumbled_query, lcs_all_k};
use lcsk::lsh::LshConfig;
use lcsk::{budget, Match};

use crate::{report, Failure, Outcome};

#[derive(Serialize)]
struct Summary {
    instances: usize,
    checks: usize,
    violations: Vec<String>,
}

#[derive(Default)]
struct Tally {
    checks: usize,
    violations: Vec<String>,
}

impl Tally {
    fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.violations.push(what());
        }
    }
}

/// Runs every solver on small seeded instances and compares against the
/// brute-force oracles.
pub fn run(seed: u64, instances: usize) -> Outcome {
    // A handful of hash functions keeps each approximate run in milliseconds.
    let config = DriverConfig {
        lsh: LshConfig { s_factor: 0.05, family_budget: Some(8), ..LshConfig::default() },
        ..DriverConfig::default()
    };
    let mut tally = Tally::default();
    for i in 0..instances {
        let mut r = rng(seed.wrapping_add(i as u64));
        let sigma = if r.random_bool(0.5) { 2 } else { 4 };
        let (n1, n2) = (r.random_range(1..=48), r.random_range(1..=48));
        let t1 = random_text(&mut r, n1, sigma);
        let t2 = random_text(&mut r, n2, sigma);
        let tag = format!("instance {i} ({n1} x {n2}, sigma {sigma})");

        let all = lcs_all_k(&t1, &t2);
        for k in 0..=n1.min(n2) {
            let diag = lcs_k_diagonal(&t1, &t2, k);
            let brute = lcs_k_bruteforce(&t1, &t2, k);
            tally.expect(diag.len == brute.len, || format!("{tag}: diagonal {} vs brute force {} at k = {k}", diag.len, brute.len));
            tally.expect(diag.recheck(&t1, &t2) && diag.mismatches <= k, || format!("{tag}: diagonal witness {diag:?} at k = {k}"));
            tally.expect(all.get(k) == Some(&diag.len), || format!("{tag}: all-k {:?} vs {} at k = {k}", all.get(k), diag.len));
        }

        let k = r.random_range(1..=3);
        let eps = 1.0;
        let witness_ok = |m: &Match, allowed: usize| m.recheck(&t1, &t2) && m.mismatches <= allowed;
        match lcs_approx_k_with(&t1, &t2, k, eps, 0.25, i as u64, &config) {
            Ok(report) => {
                let allowed = budget::relaxed(k, eps);
                let ceiling = lcs_k_diagonal(&t1, &t2, allowed).len;
                tally.expect(witness_ok(&report.found, allowed), || format!("{tag}: approximate witness {:?}", report.found));
                tally.expect(report.found.len <= ceiling, || format!("{tag}: approximate length above the (1+eps)k optimum"));
            }
            Err(e) => tally.expect(false, || format!("{tag}: approximate solver failed: {e}")),
        }
        match lcs_k_2approx_with(&t1, &t2, k, 0.25, i as u64, &config) {
            Ok(report) => tally.expect(witness_ok(&report.found, k), || format!("{tag}: 2-approximate witness {:?}", report.found)),
            Err(e) => tally.expect(false, || format!("{tag}: 2-approximation failed: {e}")),
        }

        let bits: Vec<u32> = t1.iter().map(|&c| c % 2).collect();
        let idx = build_jumbled(&bits)?;
        for ell in 1..=bits.len() {
            let counts: Vec<i64> = bits.windows(ell).map(|w| w.iter().sum::<u32>() as i64).collect();
            for q in 0..=ell as i64 {
                let answer = jumbled_query(&idx, ell, q)?;
                tally.expect(answer == counts.contains(&q), || format!("{tag}: jumbled query ell = {ell}, q = {q}"));
            }
        }
    }

    // Every N = 2, d = 2 vector set.
    for code in 0..16 {
        let a = OvInstance::enumerate(2, 2, code)?;
        let gap = verify_gap(&a, 1)?;
        tally.expect(gap.holds, || format!("gadget gap fails for vectors {:?}", a.vectors()));
    }

    let summary = Summary { instances, checks: tally.checks, violations: tally.violations };
    report::write_json(std::io::stdout().lock(), &summary)?;
    if summary.violations.is_empty() {
        Ok(())
    } else {
        Err(Failure::Violation(format!("{} of {} checks failed", summary.violations.len(), summary.checks)))
    }
}
