mod bench;
mod input;
mod report;
mod selftest;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use lcsk::driver::{lcs_approx_k_with, lcs_k_2approx_with, ApproxReport, DriverConfig, DEFAULT_FAILURE_BOUND};
use lcsk::hardness::{build_gadget, ov_bruteforce, verify_gap, OvInstance};
use lcsk::lsh::{derive_lsh_params, theory_probe_cap, DEFAULT_S_FACTOR};
use lcsk::sketch::DEFAULT_LAMBDA_CONSTANT;
use lcsk::{budget, encode_pair, BuildStrategy, LshConfig, Match, Method, MethodChoice, SketchConfig, Text};

use input::Format;
use report::Record;

#[derive(Parser)]
#[command(name = "lcsk", version, about = "Longest common substring with k mismatches")]
struct Cli {
    /// Worker threads for the solvers (default: all cores).
    #[arg(long, env = "LCSK_THREADS", global = true)]
    threads: Option<usize>,

    /// How input files are read.
    #[arg(long, value_enum, default_value_t = Format::Auto, global = true)]
    format: Format,

    /// Result format for the solver subcommands.
    #[arg(long, value_enum, default_value_t = Output::Json, global = true)]
    output: Output,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Exact longest common substring.
    Lcs(Pair),
    /// Exact longest common substring with at most k mismatches.
    LcsK {
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        pair: Pair,
    },
    /// Approximate: length at least the k-mismatch optimum, at most (1+eps)k mismatches.
    LcsApproxK {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        #[arg(long, default_value_t = 0.25)]
        delta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        knobs: Knobs,
        #[command(flatten)]
        pair: Pair,
    },
    /// At most k mismatches and at least half the optimal length.
    #[command(name = "lcs-2approx")]
    Lcs2Approx {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0.25)]
        delta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        knobs: Knobs,
        #[command(flatten)]
        pair: Pair,
    },
    /// Optimal length for every k, as CSV rows `k,length`.
    LcsAllK(Pair),
    /// Orthogonal-vectors gadget instances.
    Gadget {
        #[command(subcommand)]
        action: GadgetCommand,
    },
    /// Timing runs over a size grid, as CSV.
    Bench(bench::BenchArgs),
    /// Cross-checks every solver against the exact oracles on small instances.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 40)]
        instances: usize,
    },
}

#[derive(Args)]
struct Pair {
    first: PathBuf,
    second: PathBuf,
}

#[derive(Subcommand)]
enum GadgetCommand {
    /// Writes `t1.txt`, `t2.txt` and `vectors.txt` to the output directory.
    Gen {
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, default_value_t = 1)]
        q: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Read the vectors (one `0`/`1` row each) instead of drawing them.
        #[arg(long)]
        vectors: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Checks the length gap on a vector file with the exact solver.
    Verify {
        vectors: PathBuf,
        #[arg(long, default_value_t = 1)]
        q: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Auto,
    Fingerprint,
    Kangaroo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Auto,
    Direct,
    Fft,
}

/// Tuning constants of the approximate solver.
#[derive(Args, Debug, Clone)]
pub struct Knobs {
    /// c_s in s = ceil(c_s * t!), the number of subfamilies.
    #[arg(long, default_value_t = DEFAULT_S_FACTOR)]
    s_factor: f64,
    /// Hash functions kept per subfamily (default: all C(w, t)).
    #[arg(long)]
    family_budget: Option<usize>,
    /// Per-run failure bound f used to size the repetition count.
    #[arg(long, default_value_t = DEFAULT_FAILURE_BOUND)]
    failure_bound: f64,
    /// c in lambda = ceil(c ln n / gamma^2).
    #[arg(long, default_value_t = DEFAULT_LAMBDA_CONSTANT)]
    lambda_constant: f64,
    /// Field prime of the sketches (default: smallest prime >= alphabet size).
    #[arg(long)]
    sketch_prime: Option<u64>,
    #[arg(long, value_enum, default_value_t = StrategyArg::Auto)]
    sketch_strategy: StrategyArg,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    method: MethodArg,
    /// Stop suffix comparisons after this many mismatches.
    #[arg(long, conflicts_with = "theory_probe_cap")]
    probe_cap: Option<usize>,
    /// Cap suffix comparisons at ceil(3 n ln n / m) mismatches.
    #[arg(long)]
    theory_probe_cap: bool,
    /// Check fingerprint classes character by character.
    #[arg(long)]
    verify_fingerprints: bool,
}

impl Knobs {
    pub fn config(&self, n: usize, k: usize, eps: f64) -> DriverConfig {
        let probe_cap = if self.theory_probe_cap {
            derive_lsh_params(n, k, eps, self.s_factor).ok().map(|p| theory_probe_cap(n, p.m))
        } else {
            self.probe_cap
        };
        DriverConfig {
            lsh: LshConfig {
                s_factor: self.s_factor,
                family_budget: self.family_budget,
                method: match self.method {
                    MethodArg::Auto => MethodChoice::Auto,
                    MethodArg::Fingerprint => MethodChoice::Force(Method::Fingerprint),
                    MethodArg::Kangaroo => MethodChoice::Force(Method::Kangaroo),
                },
                probe_cap,
                verify_fingerprints: self.verify_fingerprints,
                fingerprint_prime: None,
            },
            sketch: SketchConfig {
                lambda_constant: self.lambda_constant,
                prime: self.sketch_prime,
                strategy: match self.sketch_strategy {
                    StrategyArg::Auto => BuildStrategy::Auto,
                    StrategyArg::Direct => BuildStrategy::Direct,
                    StrategyArg::Fft => BuildStrategy::Fft,
                },
            },
            failure_bound: self.failure_bound,
        }
    }
}

/// Why a command failed; decides the exit code.
pub enum Failure {
    Input(anyhow::Error),
    Violation(String),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.into())
    }
}

type Outcome<T = ()> = Result<T, Failure>;

fn read_pair(pair: &Pair, format: Format) -> Outcome<(Text, Text)> {
    let a = input::read(&pair.first, format)?;
    let b = input::read(&pair.second, format)?;
    let (_, t1, t2) = encode_pair(&a, &b);
    Ok((t1, t2))
}

/// Re-counts the mismatches of `m` and checks them against `allowed`.
pub fn verify(m: &Match, t1: &[u32], t2: &[u32], allowed: usize) -> Outcome {
    if !m.recheck(t1, t2) {
        return Err(Failure::Violation(format!("reported match {m:?} does not re-verify")));
    }
    if m.mismatches > allowed {
        return Err(Failure::Violation(format!("match has {} mismatches, budget {allowed}", m.mismatches)));
    }
    Ok(())
}

pub fn approx_params(report: &ApproxReport, knobs: &Knobs) -> serde_json::Value {
    json!({
        "trivial": report.trivial,
        "repetitions": report.repetitions,
        "rejected_runs": report.rejected,
        "lsh": report.lsh,
        "sketch": report.sketch,
        "runs": report.runs.iter().map(|r| json!({
            "threshold": r.threshold,
            "hash_functions": r.hash_functions,
            "queried_pairs": r.queried_pairs,
            "length": r.found.len,
        })).collect::<Vec<_>>(),
        "knobs": {
            "s_factor": knobs.s_factor,
            "family_budget": knobs.family_budget,
            "failure_bound": knobs.failure_bound,
            "lambda_constant": knobs.lambda_constant,
            "sketch_prime": knobs.sketch_prime,
            "method": format!("{:?}", knobs.method).to_lowercase(),
            "probe_cap": knobs.probe_cap,
            "theory_probe_cap": knobs.theory_probe_cap,
        },
    })
}

fn emit(record: &Record, output: Output) -> Outcome {
    let stdout = std::io::stdout();
    match output {
        Output::Json => report::write_json(stdout.lock(), record)?,
        Output::Csv => {
            let mut w = report::csv_writer(stdout.lock())?;
            w.write_record(record.csv_fields())?;
            w.flush()?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("cannot configure the thread pool")?;
    }
    let start = Instant::now();
    let elapsed_ms = |start: Instant| start.elapsed().as_secs_f64() * 1e3;
    match cli.command {
        Command::Lcs(pair) => {
            let (t1, t2) = read_pair(&pair, cli.format)?;
            let (a, b) = (t1.symbols(), t2.symbols());
            let m = lcsk::lcs_exact(a, b);
            verify(&m, a, b, 0)?;
            let mut rec = Record::new("lcs", a.len().max(b.len()), m, 0);
            rec.elapsed_ms = elapsed_ms(start);
            emit(&rec, cli.output)
        }
        Command::LcsK { k, pair } => {
            let (t1, t2) = read_pair(&pair, cli.format)?;
            let (a, b) = (t1.symbols(), t2.symbols());
            let m = lcsk::lcs_k_diagonal(a, b, k);
            verify(&m, a, b, k)?;
            let mut rec = Record::new("lcs-k", a.len().max(b.len()), m, k);
            rec.elapsed_ms = elapsed_ms(start);
            emit(&rec, cli.output)
        }
        Command::LcsApproxK { k, eps, delta, seed, knobs, pair } => {
            let (t1, t2) = read_pair(&pair, cli.format)?;
            let (a, b) = (t1.symbols(), t2.symbols());
            let n = a.len().max(b.len());
            let report = lcs_approx_k_with(a, b, k, eps, delta, seed, &knobs.config(n, k, eps))?;
            verify(&report.found, a, b, budget::relaxed(k, eps))?;
            let mut rec = Record::new("lcs-approx-k", n, report.found, k);
            rec.eps = Some(eps);
            rec.delta = Some(delta);
            rec.seed = Some(seed);
            rec.params = approx_params(&report, &knobs);
            rec.elapsed_ms = elapsed_ms(start);
            emit(&rec, cli.output)
        }
        Command::Lcs2Approx { k, delta, seed, knobs, pair } => {
            let (t1, t2) = read_pair(&pair, cli.format)?;
            let (a, b) = (t1.symbols(), t2.symbols());
            let n = a.len().max(b.len());
            let report = lcs_k_2approx_with(a, b, k, delta, seed, &knobs.config(n, k, 1.0))?;
            verify(&report.found, a, b, k)?;
            let mut rec = Record::new("lcs-2approx", n, report.found, k);
            rec.eps = Some(1.0);
            rec.delta = Some(delta);
            rec.seed = Some(seed);
            rec.params = approx_params(&report, &knobs);
            rec.elapsed_ms = elapsed_ms(start);
            emit(&rec, cli.output)
        }
        Command::LcsAllK(pair) => {
            let (t1, t2) = read_pair(&pair, cli.format)?;
            let ans = lcsk::lcs_all_k(t1.symbols(), t2.symbols());
            let mut w = csv::Writer::from_writer(std::io::stdout().lock());
            w.write_record(["k", "length"])?;
            for (k, len) in ans.iter().enumerate() {
                w.write_record([k.to_string(), len.to_string()])?;
            }
            w.flush()?;
            Ok(())
        }
        Command::Gadget { action } => gadget(action),
        Command::Bench(args) => bench::run(&args),
        Command::Selftest { seed, instances } => selftest::run(seed, instances),
    }
}

fn gadget(action: GadgetCommand) -> Outcome {
    match action {
        GadgetCommand::Gen { n, d, q, seed, vectors, out_dir } => {
            let instance = match (vectors, n, d) {
                (Some(path), None, None) => read_vectors(&path)?,
                (None, Some(n), Some(d)) => OvInstance::random(n, d, &mut lcsk::instances::rng(seed))?,
                _ => return Err(anyhow!("give either --vectors or both --N and --d").into()),
            };
            let g = build_gadget(&instance, q)?;
            std::fs::create_dir_all(&out_dir).with_context(|| format!("cannot create {}", out_dir.display()))?;
            let (a, b) = g.to_strings();
            write_file(&out_dir.join("t1.txt"), a.as_bytes())?;
            write_file(&out_dir.join("t2.txt"), b.as_bytes())?;
            write_file(&out_dir.join("vectors.txt"), instance.to_text().as_bytes())?;
            report::write_json(
                std::io::stdout().lock(),
                &json!({
                    "N": instance.len(),
                    "d": instance.dim(),
                    "q": q,
                    "n": g.len(),
                    "k": g.k,
                    "ell": g.ell,
                    "ell_prime": g.ell_prime,
                    "orthogonal": ov_bruteforce(&instance),
                    "out_dir": out_dir,
                }),
            )?;
            Ok(())
        }
        GadgetCommand::Verify { vectors, q } => {
            let instance = read_vectors(&vectors)?;
            let report = verify_gap(&instance, q)?;
            report::write_json(std::io::stdout().lock(), &report)?;
            if report.holds {
                Ok(())
            } else {
                Err(Failure::Violation(format!("length gap does not hold: {report:?}")))
            }
        }
    }
}

fn read_vectors(path: &Path) -> Outcome<OvInstance> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    Ok(OvInstance::parse(&text).with_context(|| format!("in {}", path.display()))?)
}

fn write_file(path: &Path, bytes: &[u8]) -> Outcome {
    std::fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            let _ = writeln!(std::io::stderr(), "error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Violation(msg)) => {
            let _ = writeln!(std::io::stderr(), "self-check failed: {msg}");
            ExitCode::from(3)
        }
    }
}
