use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, ValueEnum};

use lcsk::driver::{lcs_approx_k_with, lcs_k_2approx_with};
use lcsk::hardness::{build_gadget, OvInstance};
use lcsk::instances::{planted, random_text, rng};
use lcsk::{budget, Match};

use crate::report::{self, Record};
use crate::{verify, Knobs, Outcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Generator {
    /// Uniform texts over four symbols.
    Random,
    /// Random texts sharing a block of length n/4 with exactly k mismatches.
    Planted,
    /// Orthogonal-vectors gadget with d = k and q = 1, sized close to n.
    Gadget,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Lcs,
    LcsK,
    LcsApproxK,
    #[value(name = "lcs-2approx")]
    Lcs2Approx,
    LcsAllK,
}

impl Algo {
    fn name(self) -> &'static str {
        match self {
            Algo::Lcs => "lcs",
            Algo::LcsK => "lcs-k",
            Algo::LcsApproxK => "lcs-approx-k",
            Algo::Lcs2Approx => "lcs-2approx",
            Algo::LcsAllK => "lcs-all-k",
        }
    }
}

#[derive(Args)]
pub struct BenchArgs {
    /// Comma-separated text lengths; an empty list prints only the header.
    #[arg(long, default_value = "16384,32768,65536")]
    sizes: String,
    #[arg(long, value_enum, default_value_t = Generator::Planted)]
    generator: Generator,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "lcs-approx-k")]
    algos: Vec<Algo>,
    #[arg(long, default_value_t = 8)]
    k: usize,
    #[arg(long, default_value_t = 1.0)]
    eps: f64,
    #[arg(long, default_value_t = 0.25)]
    delta: f64,
    /// Runs per size; run i uses seed + i for both the instance and the solver.
    #[arg(long, default_value_t = 3)]
    repetitions: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    knobs: Knobs,
}

fn parse_sizes(list: &str) -> anyhow::Result<Vec<usize>> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().with_context(|| format!("invalid size {s:?}")))
        .collect()
}

fn instance(generator: Generator, n: usize, k: usize, seed: u64) -> anyhow::Result<(Vec<u32>, Vec<u32>, usize)> {
    let mut r = rng(seed);
    Ok(match generator {
        Generator::Random => (random_text(&mut r, n, 4), random_text(&mut r, n, 4), k),
        Generator::Planted => {
            let p = planted(&mut r, n, n, n / 4, k.min(n / 4), 4)?;
            (p.t1, p.t2, k)
        }
        Generator::Gadget => {
            let d = k.max(1);
            let vectors = (n / (7 * d)).saturating_sub(1) / 2;
            if vectors < 2 {
                bail!("n = {n} is too small for a gadget with d = {d}");
            }
            let g = build_gadget(&OvInstance::random(vectors, d, &mut r)?, 1)?;
            (g.t1, g.t2, g.k)
        }
    })
}

pub fn run(args: &BenchArgs) -> Outcome {
    let sizes = parse_sizes(&args.sizes)?;
    let out: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(
            std::fs::File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
        ),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut w = report::csv_writer(out)?;
    for &n in &sizes {
        for rep in 0..args.repetitions {
            let seed = args.seed.wrapping_add(rep);
            let (t1, t2, k) = instance(args.generator, n, args.k, seed)?;
            for &algo in &args.algos {
                let record = solve(algo, &t1, &t2, k, seed, args)?;
                w.write_record(record.csv_fields())?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn solve(algo: Algo, t1: &[u32], t2: &[u32], k: usize, seed: u64, args: &BenchArgs) -> Outcome<Record> {
    let n = t1.len().max(t2.len());
    let start = Instant::now();
    let (found, allowed, randomised) = match algo {
        Algo::Lcs => (lcsk::lcs_exact(t1, t2), 0, false),
        Algo::LcsK => (lcsk::lcs_k_diagonal(t1, t2, k), k, false),
        Algo::LcsAllK => {
            let all = lcsk::lcs_all_k(t1, t2);
            let len = all.get(k).or(all.last()).copied().unwrap_or(0);
            (Match { len, ..Match::EMPTY }, usize::MAX, false)
        }
        Algo::LcsApproxK => {
            let config = args.knobs.config(n, k, args.eps);
            let report = lcs_approx_k_with(t1, t2, k, args.eps, args.delta, seed, &config)?;
            (report.found, budget::relaxed(k, args.eps), true)
        }
        Algo::Lcs2Approx => {
            let config = args.knobs.config(n, k, 1.0);
            (lcs_k_2approx_with(t1, t2, k, args.delta, seed, &config)?.found, k, true)
        }
    };
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    // The all-k table reports lengths only; there is no witness to re-check.
    if algo != Algo::LcsAllK {
        verify(&found, t1, t2, allowed)?;
    }
    let mut record = Record::new(algo.name(), n, found, k);
    if randomised {
        record.eps = Some(if algo == Algo::Lcs2Approx { 1.0 } else { args.eps });
        record.delta = Some(args.delta);
    }
    record.seed = Some(seed);
    record.elapsed_ms = elapsed_ms;
    Ok(record)
}
