use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::GapRow;
use crate::error::{Error, Result};

const COLUMNS: [&str; 13] = [
    "index",
    "n",
    "m",
    "opt_bits",
    "lower_bound_bits",
    "paper_bits",
    "paper_bin_bits",
    "strict_bits",
    "strict_bin_bits",
    "gap",
    "engines_agree",
    "overstuff_ok",
    "wall_nanos",
];

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentReport {
    pub rows: Vec<GapRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub instances: usize,
    pub max_gap: f64,
    pub mean_gap: f64,
    pub violations: usize,
}

impl ExperimentReport {
    pub fn new(rows: Vec<GapRow>) -> Self {
        Self { rows }
    }

    pub fn summary(&self) -> ReportSummary {
        let instances = self.rows.len();
        let max_gap = self.rows.iter().map(|r| r.gap).fold(f64::NEG_INFINITY, f64::max);
        let mean_gap =
            if instances == 0 { 0.0 } else { self.rows.iter().map(|r| r.gap).sum::<f64>() / instances as f64 };
        ReportSummary {
            instances,
            max_gap: if instances == 0 { 0.0 } else { max_gap },
            mean_gap,
            violations: self.rows.iter().filter(|r| r.is_violation()).count(),
        }
    }

    /// Tab-separated rows under a `#`-prefixed header. Floats use the
    /// shortest representation that parses back to the same value.
    pub fn to_tsv(&self) -> String {
        let mut out = format!("# {}\n", COLUMNS.join("\t"));
        for r in &self.rows {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                r.index,
                r.n,
                r.m,
                r.opt_bits,
                r.lower_bound_bits,
                r.paper_bits,
                r.paper_bin_bits,
                r.strict_bits,
                r.strict_bin_bits,
                r.gap,
                r.engines_agree,
                r.overstuff_ok,
                r.wall_nanos
            )
            .expect("writing to a String");
        }
        out
    }

    pub fn from_tsv(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (no, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != COLUMNS.len() {
                return Err(Error::Parse(format!(
                    "line {}: expected {} columns, found {}",
                    no + 1,
                    COLUMNS.len(),
                    f.len()
                )));
            }
            let bad = |col: usize| Error::Parse(format!("line {}: bad {} '{}'", no + 1, COLUMNS[col], f[col]));
            macro_rules! field {
                ($col:expr) => {
                    f[$col].parse().map_err(|_| bad($col))?
                };
            }
            rows.push(GapRow {
                index: field!(0),
                n: field!(1),
                m: field!(2),
                opt_bits: field!(3),
                lower_bound_bits: field!(4),
                paper_bits: field!(5),
                paper_bin_bits: field!(6),
                strict_bits: field!(7),
                strict_bin_bits: field!(8),
                gap: field!(9),
                engines_agree: field!(10),
                overstuff_ok: field!(11),
                wall_nanos: field!(12),
            });
        }
        Ok(Self { rows })
    }

    /// One JSON object per line.
    pub fn to_ndjson(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            out.push_str(&serde_json::to_string(r).expect("rows serialize"));
            out.push('\n');
        }
        out
    }

    pub fn from_ndjson(text: &str) -> Result<Self> {
        let rows = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| serde_json::from_str(l).map_err(|e| Error::Parse(e.to_string())))
            .collect::<Result<Vec<GapRow>>>()?;
        Ok(Self { rows })
    }
}
