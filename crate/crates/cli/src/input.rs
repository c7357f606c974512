use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// FASTA if the file starts with '>', plain text otherwise.
    Auto,
    /// Every byte, including newlines.
    Raw,
    /// Bytes with trailing line breaks removed.
    Text,
    /// Sequence of the single record, uppercased.
    Fasta,
}

pub fn read(path: &Path, format: Format) -> Result<Vec<u8>> {
    let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let format = match format {
        Format::Auto if bytes.first() == Some(&b'>') => Format::Fasta,
        Format::Auto => Format::Text,
        other => other,
    };
    match format {
        Format::Raw => Ok(bytes),
        Format::Text => Ok(trim_line_end(bytes)),
        Format::Fasta => fasta(&bytes).with_context(|| format!("in {}", path.display())),
        Format::Auto => unreachable!("resolved above"),
    }
}

fn trim_line_end(mut bytes: Vec<u8>) -> Vec<u8> {
    while matches!(bytes.last(), Some(b'\n' | b'\r')) {
        bytes.pop();
    }
    bytes
}

fn fasta(bytes: &[u8]) -> Result<Vec<u8>> {
    let mut lines = bytes.split(|&b| b == b'\n').map(|l| l.strip_suffix(b"\r").unwrap_or(l));
    match lines.next() {
        Some(header) if header.starts_with(b">") => {}
        _ => bail!("FASTA input must start with a '>' header line"),
    }
    let mut seq = Vec::new();
    for line in lines {
        if line.starts_with(b">") {
            bail!("FASTA input has more than one record; only single-record files are accepted");
        }
        seq.extend(line.iter().filter(|b| !b.is_ascii_whitespace()).map(u8::to_ascii_uppercase));
    }
    Ok(seq)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fasta_records() {
        assert_eq!(fasta(b">x\nacg\nTT\n").unwrap(), b"ACGTT");
        assert_eq!(fasta(b">x\r\nac\r\n").unwrap(), b"AC");
        assert!(fasta(b">a\nAC\n>b\nGG\n").is_err());
        assert!(fasta(b"ACGT").is_err());
    }

    #[test]
    fn text_trimming() {
        assert_eq!(trim_line_end(b"abba\r\n".to_vec()), b"abba");
        assert_eq!(trim_line_end(b"ab ba \n\n".to_vec()), b"ab ba ");
    }
}
