//! Distribution file format.
//!
//! Canonical form is plain text with one probability per line; blank lines and
//! lines starting with `#` are skipped. A single JSON array of numbers is also
//! accepted on input. Output is always the plain-text form with 17
//! significant digits.

use std::fmt::Write as _;
use std::path::Path;

use crate::distribution::Distribution;
use crate::error::{Error, Result};

/// Parses the raw (unvalidated) values of a distribution file.
pub fn parse_values(text: &str) -> Result<Vec<f64>> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('[') {
        return serde_json::from_str::<Vec<f64>>(trimmed).map_err(|e| Error::Parse(e.to_string()));
    }
    text.lines()
        .enumerate()
        .map(|(no, line)| (no, line.trim()))
        .filter(|(_, line)| !line.is_empty() && !line.starts_with('#'))
        .map(|(no, line)| {
            line.parse::<f64>().map_err(|_| Error::Parse(format!("line {}: '{line}' is not a number", no + 1)))
        })
        .collect()
}

pub fn parse_distribution(text: &str) -> Result<Distribution> {
    Distribution::new(&parse_values(text)?)
}

pub fn read_distribution(path: &Path) -> Result<Distribution> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_distribution(&text)
}

/// Formats values in the canonical plain-text form.
pub fn format_values(values: &[f64]) -> String {
    let mut out = String::with_capacity(values.len() * 24);
    for v in values {
        writeln!(out, "{v:.16e}").expect("writing to a String");
    }
    out
}

pub fn write_distribution(path: &Path, p: &Distribution) -> Result<()> {
    std::fs::write(path, format_values(p.probs()))?;
    Ok(())
}
