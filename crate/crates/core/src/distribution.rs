//! Validated distributions, partitions and aggregations.
//!
//! A [`Distribution`] is always stored sorted non-increasing. The permutation
//! applied during validation is kept so that partitions can be reported back
//! in the caller's original index order.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::divergence;
use crate::error::{Error, Result};

/// Absolute tolerance on `|sum - 1|` accepted at validation time.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// Neumaier-compensated sum.
pub fn compensated_sum<I>(values: I) -> f64
where
    I: IntoIterator<Item = f64>,
{
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

/// A point of the probability simplex with strictly positive components,
/// sorted non-increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    probs: Vec<f64>,
    /// `order[k]` is the caller's index of the k-th largest component.
    order: Vec<usize>,
}

impl Distribution {
    /// Validates `raw`, sorts it descending and rescales it to unit mass.
    pub fn new(raw: &[f64]) -> Result<Self> {
        if raw.len() < 2 {
            return Err(Error::TooShort { len: raw.len() });
        }
        if let Some((index, &value)) = raw.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
            return Err(Error::NonPositiveEntry { index, value });
        }
        let sum = compensated_sum(raw.iter().copied());
        if !((sum - 1.0).abs() <= NORMALIZATION_TOLERANCE) {
            return Err(Error::NotNormalized { sum });
        }

        let mut order: Vec<usize> = (0..raw.len()).collect();
        // Stable, so equal components keep their input order.
        order.sort_by(|&a, &b| raw[b].partial_cmp(&raw[a]).unwrap_or(Ordering::Equal));
        let mut probs: Vec<f64> = order.iter().map(|&i| raw[i]).collect();
        if sum != 1.0 {
            for p in &mut probs {
                *p /= sum;
            }
        }
        if let Some((index, &value)) = probs.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
            return Err(Error::NonPositiveEntry { index: order[index], value });
        }
        Ok(Self { probs, order })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// The permutation applied at validation: `order()[k]` is the original
    /// index of sorted component `k`.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Total mass of the `m` largest components.
    pub fn prefix_mass(&self, m: usize) -> f64 {
        compensated_sum(self.probs[..m.min(self.len())].iter().copied())
    }

    /// Maps a block assignment over sorted indices into the caller's
    /// original index space.
    pub fn to_original(&self, block_of: &[usize]) -> Vec<usize> {
        let mut out = vec![0; block_of.len()];
        for (sorted, &orig) in self.order.iter().enumerate() {
            if sorted < block_of.len() && orig < out.len() {
                out[orig] = block_of[sorted];
            }
        }
        out
    }

    /// Inverse of [`Distribution::to_original`].
    pub fn from_original(&self, block_of: &[usize]) -> Vec<usize> {
        self.order.iter().map(|&orig| block_of[orig]).collect()
    }
}

/// Validates a raw vector into a [`Distribution`].
pub fn validate_distribution(raw: &[f64]) -> Result<Distribution> {
    Distribution::new(raw)
}

/// Assignment of `n` items to `m` blocks.
///
/// A strict map has every block nonempty; a relaxed one may leave blocks
/// empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionMap {
    block_of: Vec<usize>,
    m: usize,
    strict: bool,
}

impl PartitionMap {
    pub fn new(block_of: Vec<usize>, m: usize, strict: bool) -> Result<Self> {
        if m == 0 {
            return Err(Error::BadM { m, n: block_of.len() });
        }
        let mut used = vec![false; m];
        for (index, &block) in block_of.iter().enumerate() {
            if block >= m {
                return Err(Error::BlockOutOfRange { index, block, m });
            }
            used[block] = true;
        }
        if strict {
            if let Some(block) = used.iter().position(|u| !u) {
                return Err(Error::EmptyBlock { block });
            }
        }
        Ok(Self { block_of, m, strict })
    }

    pub fn strict(block_of: Vec<usize>, m: usize) -> Result<Self> {
        Self::new(block_of, m, true)
    }

    pub fn relaxed(block_of: Vec<usize>, m: usize) -> Result<Self> {
        Self::new(block_of, m, false)
    }

    pub fn block_of(&self) -> &[usize] {
        &self.block_of
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.block_of.len()
    }

    pub fn is_strict(&self) -> bool {
        self.strict
    }

    /// True when every block has at least one item, whatever the flag says.
    pub fn all_blocks_used(&self) -> bool {
        let mut used = vec![false; self.m];
        self.block_of.iter().for_each(|&b| used[b] = true);
        used.into_iter().all(|u| u)
    }

    /// Items of each block, in increasing item order.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.m];
        for (i, &b) in self.block_of.iter().enumerate() {
            blocks[b].push(i);
        }
        blocks
    }

    /// Applies a block relabeling `perm` (old label -> new label).
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.m {
            return Err(Error::LengthMismatch { expected: self.m, found: perm.len() });
        }
        Self::new(self.block_of.iter().map(|&b| perm[b]).collect(), self.m, self.strict)
    }
}

/// How an aggregation is paired against the leading components of `p` when
/// measuring divergence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pairing {
    /// Sort `q` descending, then pair index-wise with `p_1..p_m`.
    #[default]
    SortedCanonical,
    /// Pair bin `i` with `p_i`.
    BinIndex,
}

/// A reduced distribution together with the partition that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregationResult {
    pub q: Vec<f64>,
    pub partition: PartitionMap,
    pub pairing: Pairing,
    /// Divergence under [`Pairing::SortedCanonical`], bits.
    pub sorted_bits: f64,
    /// Divergence under [`Pairing::BinIndex`], bits.
    pub bin_index_bits: f64,
}

impl AggregationResult {
    pub(crate) fn from_parts(p: &Distribution, q: Vec<f64>, partition: PartitionMap) -> Result<Self> {
        let m = partition.m();
        let head = &p.probs()[..m];
        let bin_index_bits = divergence::relative_entropy(&q, head)?;
        let sorted_bits = divergence::sorted_pairing_divergence(&q, p)?;
        Ok(Self { q, partition, pairing: Pairing::SortedCanonical, sorted_bits, bin_index_bits })
    }

    /// The divergence under the currently selected pairing.
    pub fn divergence_bits(&self) -> f64 {
        self.bits(self.pairing)
    }

    pub fn bits(&self, pairing: Pairing) -> f64 {
        match pairing {
            Pairing::SortedCanonical => self.sorted_bits,
            Pairing::BinIndex => self.bin_index_bits,
        }
    }

    pub fn with_pairing(mut self, pairing: Pairing) -> Self {
        self.pairing = pairing;
        self
    }

    pub fn is_strict(&self) -> bool {
        self.partition.is_strict()
    }
}

/// Sums the components of `p` block by block.
pub fn apply_partition(p: &Distribution, pi: &PartitionMap) -> Result<AggregationResult> {
    if pi.n() != p.len() {
        return Err(Error::LengthMismatch { expected: p.len(), found: pi.n() });
    }
    if pi.m() >= p.len() {
        return Err(Error::BadM { m: pi.m(), n: p.len() });
    }
    let q = block_sums(p.probs(), pi.block_of(), pi.m());
    AggregationResult::from_parts(p, q, pi.clone())
}

pub(crate) fn block_sums(probs: &[f64], block_of: &[usize], m: usize) -> Vec<f64> {
    let mut sums = vec![0.0f64; m];
    let mut carry = vec![0.0f64; m];
    for (&v, &b) in probs.iter().zip(block_of) {
        let s = sums[b];
        let t = s + v;
        if s.abs() >= v.abs() {
            carry[b] += (s - t) + v;
        } else {
            carry[b] += (v - t) + s;
        }
        sums[b] = t;
    }
    sums.iter().zip(&carry).map(|(s, c)| s + c).collect()
}
