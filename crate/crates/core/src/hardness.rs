//! Executable form of the 3-Partition reduction.
//!
//! A 3-Partition instance `a_1 >= ... >= a_{3m}` with `sum = mT` is encoded
//! as the distribution
//!
//! ```text
//! ( 1/(m+1) x m,  (a_1 + 2T)/((m+1) 7mT), ..., (a_{3m} + 2T)/((m+1) 7mT) )
//! ```
//!
//! whose optimal `m`-aggregation has divergence `log2((m+1)/m)` exactly when
//! the instance is solvable. In that case every optimal block holds one
//! leading `1/(m+1)` component plus a triplet summing to `T`.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::exact::{exact_search, MAX_EXACT_N};

/// Tolerance for comparing an optimum against the target value.
pub const TARGET_TOLERANCE: f64 = 1e-9;

/// `3m` positive integers summing to `mT`, stored non-increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreePartitionInstance {
    values: Vec<u64>,
    m: usize,
    target: u64,
}

impl ThreePartitionInstance {
    pub fn new(values: &[i64], m: usize, target: i64) -> Result<Self> {
        if m == 0 {
            return Err(Error::MalformedInstance("m must be positive".into()));
        }
        if values.len() != 3 * m {
            return Err(Error::MalformedInstance(format!("expected {} values for m={m}, got {}", 3 * m, values.len())));
        }
        if let Some(v) = values.iter().find(|&&v| v < 1) {
            return Err(Error::MalformedInstance(format!("value {v} is not positive")));
        }
        if target < 1 {
            return Err(Error::MalformedInstance(format!("T={target} is not positive")));
        }
        let sum: i128 = values.iter().map(|&v| v as i128).sum();
        if sum != m as i128 * target as i128 {
            return Err(Error::MalformedInstance(format!(
                "values sum to {sum}, but m*T = {}",
                m as i128 * target as i128
            )));
        }
        let mut values: Vec<u64> = values.iter().map(|&v| v as u64).collect();
        values.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Self { values, m, target: target as u64 })
    }

    /// Builds an instance with `T = sum / m`, failing if that is not integral.
    pub fn from_values(values: &[i64], m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::MalformedInstance("m must be positive".into()));
        }
        let sum: i128 = values.iter().map(|&v| v as i128).sum();
        if sum % m as i128 != 0 {
            return Err(Error::MalformedInstance(format!("sum {sum} is not a multiple of m={m}")));
        }
        let target = i64::try_from(sum / m as i128).map_err(|_| Error::MalformedInstance("T overflows".into()))?;
        Self::new(values, m, target)
    }

    /// Values in non-increasing order; certificate indices refer to this order.
    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn target(&self) -> u64 {
        self.target
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }
}

/// Text form: `m T` on the first line, the `3m` integers on the second.
impl FromStr for ThreePartitionInstance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::MalformedInstance("missing 'm T' header line".into()))?;
        let head: Vec<&str> = header.split_whitespace().collect();
        if head.len() != 2 {
            return Err(Error::MalformedInstance(format!("bad header line '{header}'")));
        }
        let m: usize =
            head[0].parse().map_err(|_| Error::MalformedInstance(format!("m='{}' is not an integer", head[0])))?;
        let target: i64 =
            head[1].parse().map_err(|_| Error::MalformedInstance(format!("T='{}' is not an integer", head[1])))?;
        let values = lines
            .flat_map(str::split_whitespace)
            .map(|tok| tok.parse::<i64>().map_err(|_| Error::MalformedInstance(format!("'{tok}' is not an integer"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(&values, m, target)
    }
}

impl fmt::Display for ThreePartitionInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.m, self.target)?;
        let vals: Vec<String> = self.values.iter().map(u64::to_string).collect();
        writeln!(f, "{}", vals.join(" "))
    }
}

/// The encoded components as exact rationals, leading block first.
pub fn encode_exact(inst: &ThreePartitionInstance) -> Result<Vec<Ratio<i128>>> {
    let m = inst.m as i128;
    let t = inst.target as i128;
    let overflow = || Error::MalformedInstance("encoding denominator overflows".into());
    let denom =
        (m + 1).checked_mul(7).and_then(|d| d.checked_mul(m)).and_then(|d| d.checked_mul(t)).ok_or_else(overflow)?;
    let lead = Ratio::new(1, m + 1);
    let mut out = vec![lead; inst.m];
    for &a in &inst.values {
        let numer = (a as i128).checked_add(2 * t).ok_or_else(overflow)?;
        out.push(Ratio::new(numer, denom));
    }
    Ok(out)
}

/// Encodes `inst` as a distribution on `3m + m` points.
///
/// Components are exact rationals rounded once to the nearest double. The
/// vector must already be non-increasing; it is rejected rather than
/// re-sorted across the leading block.
pub fn encode(inst: &ThreePartitionInstance) -> Result<Distribution> {
    let exact = encode_exact(inst)?;
    if exact.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::MalformedInstance("encoded vector is not non-increasing".into()));
    }
    let total: Ratio<i128> = exact.iter().fold(Ratio::zero(), |acc, r| acc + r);
    if total != Ratio::from_integer(1) {
        return Err(Error::InvariantViolation(format!("encoded mass is {total}, not 1")));
    }
    let probs = exact
        .iter()
        .map(|r| r.to_f64().ok_or_else(|| Error::MalformedInstance("component not representable".into())))
        .collect::<Result<Vec<f64>>>()?;
    let dist = Distribution::new(&probs)?;
    if dist.order().iter().enumerate().any(|(k, &i)| k != i) {
        return Err(Error::InvariantViolation("encoded vector reordered after rounding".into()));
    }
    Ok(dist)
}

/// `log2((m+1)/m)`, the optimum iff the instance is solvable.
pub fn target_value(m: usize) -> Result<f64> {
    if m < 2 {
        return Err(Error::BadM { m, n: 0 });
    }
    Ok(((m + 1) as f64 / m as f64).log2())
}

/// True iff `triplets` partitions `0..n` into index triples each summing to `T`.
pub fn verify_certificate(inst: &ThreePartitionInstance, triplets: &[Vec<usize>]) -> bool {
    let n = inst.n();
    let mut used = vec![false; n];
    let mut covered = 0;
    for triple in triplets {
        if triple.len() != 3 {
            return false;
        }
        let mut sum = 0u128;
        for &i in triple {
            if i >= n || used[i] {
                return false;
            }
            used[i] = true;
            covered += 1;
            sum += inst.values[i] as u128;
        }
        if sum != inst.target as u128 {
            return false;
        }
    }
    covered == n
}

/// Result of deciding a small instance through the exact solver.
#[derive(Debug, Clone, PartialEq)]
pub enum Decision {
    Yes { certificate: Vec<Vec<usize>>, opt_bits: f64 },
    No { opt_bits: f64 },
}

impl Decision {
    pub fn is_yes(&self) -> bool {
        matches!(self, Decision::Yes { .. })
    }

    pub fn opt_bits(&self) -> f64 {
        match self {
            Decision::Yes { opt_bits, .. } | Decision::No { opt_bits } => *opt_bits,
        }
    }
}

/// Reads the triplets off an aggregation of the encoded distribution.
///
/// Each block must hold exactly one of the `m` leading components and three
/// tail components; the tail indices, shifted by `m`, name the triplet.
pub fn extract_certificate(inst: &ThreePartitionInstance, block_of: &[usize]) -> Result<Vec<Vec<usize>>> {
    let m = inst.m;
    if block_of.len() != inst.n() + m {
        return Err(Error::LengthMismatch { expected: inst.n() + m, found: block_of.len() });
    }
    let mut leads = vec![0usize; m];
    let mut triplets = vec![Vec::new(); m];
    for (k, &b) in block_of.iter().enumerate() {
        if b >= m {
            return Err(Error::CertificateMismatch(format!("block label {b} out of range")));
        }
        if k < m {
            leads[b] += 1;
        } else {
            triplets[b].push(k - m);
        }
    }
    if let Some(b) = leads.iter().position(|&c| c != 1) {
        return Err(Error::CertificateMismatch(format!("block {b} holds {} leading components", leads[b])));
    }
    if !verify_certificate(inst, &triplets) {
        return Err(Error::CertificateMismatch("blocks do not form triplets summing to T".into()));
    }
    Ok(triplets)
}

/// Decides a toy instance by running the exact solver on its encoding.
pub fn decide_by_oracle(inst: &ThreePartitionInstance) -> Result<Decision> {
    let total = inst.n() + inst.m;
    if total > MAX_EXACT_N {
        return Err(Error::TooLarge { n: total, cap: MAX_EXACT_N });
    }
    let target = target_value(inst.m)?;
    let p = encode(inst)?;
    let search = exact_search(&p, inst.m, false)?;
    let opt_bits = search.best.divergence_bits();
    if opt_bits < target - TARGET_TOLERANCE {
        return Err(Error::InvariantViolation(format!("optimum {opt_bits} is below the lower bound {target}")));
    }
    if opt_bits - target > TARGET_TOLERANCE {
        return Ok(Decision::No { opt_bits });
    }
    let certificate = extract_certificate(inst, search.best.partition.block_of())?;
    Ok(Decision::Yes { certificate, opt_bits })
}
