use std::io::Write;

use anyhow::Result;
use serde::Serialize;
use serde_json::Value;

use lcsk::Match;

pub const CSV_HEADER: [&str; 11] =
    ["n", "k", "eps", "delta", "seed", "algo", "length", "pos1", "pos2", "mismatches", "elapsed_ms"];

/// One solver result with the parameters that produced it.
#[derive(Debug, Clone, Serialize)]
pub struct Record {
    pub length: usize,
    pub pos1: usize,
    pub pos2: usize,
    pub mismatches: usize,
    pub k: usize,
    pub eps: Option<f64>,
    pub delta: Option<f64>,
    pub seed: Option<u64>,
    pub params: Value,
    pub elapsed_ms: f64,
    #[serde(skip)]
    pub n: usize,
    #[serde(skip)]
    pub algo: &'static str,
}

impl Record {
    pub fn new(algo: &'static str, n: usize, m: Match, k: usize) -> Self {
        Record {
            length: m.len,
            pos1: m.pos1,
            pos2: m.pos2,
            mismatches: m.mismatches,
            k,
            eps: None,
            delta: None,
            seed: None,
            params: Value::Null,
            elapsed_ms: 0.0,
            n,
            algo,
        }
    }

    pub fn csv_fields(&self) -> [String; 11] {
        let opt = |v: Option<String>| v.unwrap_or_default();
        [
            self.n.to_string(),
            self.k.to_string(),
            opt(self.eps.map(|e| e.to_string())),
            opt(self.delta.map(|d| d.to_string())),
            opt(self.seed.map(|s| s.to_string())),
            self.algo.to_string(),
            self.length.to_string(),
            self.pos1.to_string(),
            self.pos2.to_string(),
            self.mismatches.to_string(),
            format!("{:.3}", self.elapsed_ms),
        ]
    }
}

pub fn csv_writer<W: Write>(out: W) -> Result<csv::Writer<W>> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    Ok(w)
}

pub fn write_json<W: Write>(mut out: W, value: &impl Serialize) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}
