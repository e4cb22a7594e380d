//! Exhaustive search over all aggregations into exactly `m` nonempty blocks.
//!
//! Partitions are enumerated as restricted growth strings (RGS): item 0 is in
//! block 0, and each later item's label is at most one more than the largest
//! label before it. Strings are generated directly with exactly `m` labels in
//! lexicographic order, so each set partition appears once.

use crate::distribution::{apply_partition, AggregationResult, Distribution, PartitionMap};
use crate::divergence::kl_bits_unchecked;
use crate::error::{Error, Result};

/// Largest `n` accepted without `force`.
pub const MAX_EXACT_N: usize = 14;

/// Ties closer than this are reported as alternative optima.
const TIE_TOLERANCE: f64 = 1e-12;

/// Streams the restricted growth strings of `n` items with exactly `m` blocks.
#[derive(Debug, Clone)]
pub struct PartitionEnumerator {
    n: usize,
    m: usize,
    labels: Vec<usize>,
    /// `prefix_max[i]` is the largest label among `labels[..=i]`.
    prefix_max: Vec<usize>,
    started: bool,
    done: bool,
}

impl PartitionEnumerator {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        Self::with_force(n, m, false)
    }

    /// As [`PartitionEnumerator::new`]; `force` lifts the size cap.
    pub fn with_force(n: usize, m: usize, force: bool) -> Result<Self> {
        if n > MAX_EXACT_N && !force {
            return Err(Error::TooLarge { n, cap: MAX_EXACT_N });
        }
        if m == 0 || m > n {
            return Err(Error::BadM { m, n });
        }
        // First string: 0^(n-m+1) 1 2 ... m-1.
        let mut labels = vec![0; n];
        for (k, slot) in labels[n - m + 1..].iter_mut().enumerate() {
            *slot = k + 1;
        }
        let mut e = Self { n, m, prefix_max: vec![0; n], labels, started: false, done: false };
        e.refresh_prefix_max(0);
        Ok(e)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    fn refresh_prefix_max(&mut self, from: usize) {
        for i in from..self.n {
            let prev = if i == 0 { 0 } else { self.prefix_max[i - 1] };
            self.prefix_max[i] = prev.max(self.labels[i]);
        }
    }

    /// Advances to the next string, returning the labels, or `None` at the end.
    pub fn next_labels(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.labels);
        }
        let (n, m) = (self.n, self.m);
        for i in (1..n).rev() {
            let next = self.labels[i] + 1;
            let cap = self.prefix_max[i - 1] + 1;
            if next > cap || next >= m {
                continue;
            }
            let used = self.prefix_max[i - 1].max(next) + 1;
            let rest = n - 1 - i;
            let need = m - used;
            if need > rest {
                continue;
            }
            self.labels[i] = next;
            // Smallest completion: zeros, then the missing labels in order.
            let zeros = rest - need;
            for k in 0..rest {
                self.labels[i + 1 + k] = if k < zeros { 0 } else { used + (k - zeros) };
            }
            self.refresh_prefix_max(i);
            return Some(&self.labels);
        }
        self.done = true;
        None
    }
}

impl Iterator for PartitionEnumerator {
    type Item = PartitionMap;

    fn next(&mut self) -> Option<PartitionMap> {
        let m = self.m;
        self.next_labels().map(|l| PartitionMap::strict(l.to_vec(), m).expect("RGS uses every label"))
    }
}

/// All strict partitions of `n` items into `m` blocks, in RGS order.
pub fn enumerate_partitions(n: usize, m: usize) -> Result<PartitionEnumerator> {
    PartitionEnumerator::new(n, m)
}

/// Outcome of an exhaustive search, with tie metadata.
#[derive(Debug, Clone)]
pub struct ExactSearch {
    pub best: AggregationResult,
    /// Number of partitions evaluated.
    pub evaluated: u64,
    /// Partitions whose value is within `1e-12` of the optimum, including the
    /// reported one.
    pub optimal_count: u64,
}

impl ExactSearch {
    pub fn is_unique(&self) -> bool {
        self.optimal_count == 1
    }
}

/// Minimum canonical divergence over all strict `m`-block aggregations.
pub fn exact_opt(p: &Distribution, m: usize) -> Result<AggregationResult> {
    exact_search(p, m, false).map(|s| s.best)
}

/// Full search; `force` lifts the `n <= 14` cap.
pub fn exact_search(p: &Distribution, m: usize, force: bool) -> Result<ExactSearch> {
    let n = p.len();
    if m == 0 || m >= n {
        return Err(Error::BadM { m, n });
    }
    let mut it = PartitionEnumerator::with_force(n, m, force)?;
    let probs = p.probs();
    let head = &probs[..m];
    let mut sums = vec![0.0f64; m];

    let mut best_value = f64::INFINITY;
    let mut best_labels: Vec<usize> = Vec::new();
    let mut evaluated = 0u64;
    let mut ties = 0u64;

    while let Some(labels) = it.next_labels() {
        sums.iter_mut().for_each(|s| *s = 0.0);
        for (&v, &b) in probs.iter().zip(labels) {
            sums[b] += v;
        }
        sums.sort_unstable_by(|a, b| b.total_cmp(a));
        let value = kl_bits_unchecked(&sums, head);
        evaluated += 1;
        if value < best_value {
            if best_value - value > TIE_TOLERANCE {
                ties = 0;
            }
            best_value = value;
            best_labels.clear();
            best_labels.extend_from_slice(labels);
        }
        if value - best_value <= TIE_TOLERANCE {
            ties += 1;
        }
    }

    let partition = PartitionMap::strict(best_labels, m)?;
    let best = apply_partition(p, &partition)?;
    Ok(ExactSearch { best, evaluated, optimal_count: ties })
}
