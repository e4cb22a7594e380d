//! First-fit packing with overstuffing against the lower-bound capacities.
//!
//! Items are the components of `p` in descending order; bin `j` has capacity
//! `lb(p)_j` and accepts an item while `content_j + item < (1 + S) lb(p)_j`,
//! where `S` is the mass of the `m` largest components. Every item goes to the
//! smallest admissible bin. The output satisfies `D(q || p) < OPT + 1`.

mod tree;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub use tree::{leftmost_feasible, CapacityTree};

use crate::distribution::{AggregationResult, Distribution, PartitionMap};
use crate::divergence::lower_bound;
use crate::error::{Error, Result};

/// Which variant of the packing rule to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// First-fit exactly as stated. May leave bins empty.
    Paper,
    /// First-fit, except that once the unplaced items are exactly as many as
    /// the empty bins, each remaining item goes to the smallest-index empty
    /// bin. Always yields `m` nonempty blocks.
    #[default]
    Strict,
}

/// How the smallest admissible bin is located.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    /// Linear scan over bins, `O(nm)`.
    Naive,
    /// Max-slack segment tree, `O(n log m)`.
    #[default]
    Tree,
}

/// Bins, thresholds and running contents of one packing run.
#[derive(Debug, Clone)]
pub struct GreedyState {
    /// `lb(p)_j`.
    pub capacities: Vec<f64>,
    /// `(1 + S) lb(p)_j`.
    pub thresholds: Vec<f64>,
    /// Running content of each bin.
    pub contents: Vec<f64>,
    /// Bin of each placed item, in item order.
    pub assignments: Vec<usize>,
    pub items_placed: usize,
    /// Mass of the `m` largest components.
    pub head_mass: f64,
    counts: Vec<usize>,
}

impl GreedyState {
    pub fn new(p: &Distribution, m: usize) -> Result<Self> {
        let bound = lower_bound(p, m)?;
        let head_mass = bound.prefix_mass;
        let thresholds = bound.lb.iter().map(|&c| (1.0 + head_mass) * c).collect();
        Ok(Self {
            capacities: bound.lb,
            thresholds,
            contents: vec![0.0; m],
            assignments: Vec::with_capacity(p.len()),
            items_placed: 0,
            head_mass,
            counts: vec![0; m],
        })
    }

    pub fn bins(&self) -> usize {
        self.capacities.len()
    }

    /// The raw placement test.
    #[inline]
    pub fn fits(&self, bin: usize, item: f64) -> bool {
        self.contents[bin] + item < self.thresholds[bin]
    }

    /// True while every bin stays strictly below its threshold.
    pub fn within_thresholds(&self) -> bool {
        self.contents.iter().zip(&self.thresholds).all(|(c, t)| c < t)
    }

    pub fn empty_bins(&self) -> usize {
        self.counts.iter().filter(|&&c| c == 0).count()
    }

    fn place(&mut self, bin: usize, item: f64) {
        self.contents[bin] += item;
        self.counts[bin] += 1;
        self.assignments.push(bin);
        self.items_placed += 1;
    }

    fn slack(&self, bin: usize) -> f64 {
        tree::admission_bound(self.contents[bin], self.thresholds[bin])
    }
}

/// Runs the packing and returns the final state.
pub fn pack(p: &Distribution, m: usize, mode: Mode, engine: Engine) -> Result<GreedyState> {
    let mut state = GreedyState::new(p, m)?;
    let n = p.len();
    let mut tree = match engine {
        Engine::Tree => Some(CapacityTree::new(&(0..m).map(|j| state.slack(j)).collect::<Vec<_>>())),
        Engine::Naive => None,
    };
    let mut empty: BTreeSet<usize> = (0..m).collect();

    for (i, &item) in p.probs().iter().enumerate() {
        let reserve = mode == Mode::Strict && n - i == empty.len();
        let bin = if reserve {
            let bin = match engine {
                Engine::Tree => *empty.first().expect("unplaced items equal empty bins"),
                Engine::Naive => state.counts.iter().position(|&c| c == 0).expect("an empty bin"),
            };
            if !state.fits(bin, item) {
                return Err(Error::InfeasiblePlacement { item });
            }
            bin
        } else {
            match tree.as_ref() {
                Some(t) => t.leftmost_feasible(item)?,
                None => (0..m).find(|&j| state.fits(j, item)).ok_or(Error::InfeasiblePlacement { item })?,
            }
        };
        state.place(bin, item);
        empty.remove(&bin);
        if let Some(t) = tree.as_mut() {
            t.set(bin, state.slack(bin));
        }
    }

    if state.items_placed != n {
        return Err(Error::InvariantViolation(format!("placed {} of {n} items", state.items_placed)));
    }
    if !state.within_thresholds() {
        return Err(Error::InvariantViolation("a bin reached its overstuffing threshold".into()));
    }
    Ok(state)
}

/// Greedy aggregation of `p` into `m` bins.
///
/// `q` is the running bin contents, so the overstuffing bound holds on the
/// reported values exactly as compared during packing.
pub fn greedy_approx(p: &Distribution, m: usize, mode: Mode, engine: Engine) -> Result<AggregationResult> {
    let state = pack(p, m, mode, engine)?;
    let partition = PartitionMap::new(state.assignments, m, mode == Mode::Strict)?;
    AggregationResult::from_parts(p, state.contents, partition)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divergence::relative_entropy;

    fn dist(v: &[f64]) -> Distribution {
        Distribution::new(v).unwrap()
    }

    const ALL: [(Mode, Engine); 4] = [
        (Mode::Paper, Engine::Naive),
        (Mode::Paper, Engine::Tree),
        (Mode::Strict, Engine::Naive),
        (Mode::Strict, Engine::Tree),
    ];

    #[test]
    fn tightness_instance() {
        let p = dist(&[0.499, 0.499, 0.002]);
        for (mode, engine) in ALL {
            let r = greedy_approx(&p, 2, mode, engine).unwrap();
            assert!((r.q[0] - 0.998).abs() < 1e-15 && (r.q[1] - 0.002).abs() < 1e-15);
            assert_eq!(r.partition.block_of(), &[0, 0, 1]);
        }
    }

    #[test]
    fn uniform_quarters() {
        let p = dist(&[0.25; 4]);
        let r = greedy_approx(&p, 2, Mode::Paper, Engine::Tree).unwrap();
        assert_eq!(r.partition.block_of(), &[0, 0, 1, 1]);
        assert_eq!(r.q, vec![0.5, 0.5]);
        assert_eq!(r.divergence_bits(), 1.0);
    }

    #[test]
    fn paper_mode_can_leave_a_bin_empty() {
        let p = dist(&[0.5, 0.3, 0.2]);
        for engine in [Engine::Naive, Engine::Tree] {
            let r = greedy_approx(&p, 2, Mode::Paper, engine).unwrap();
            assert_eq!(r.partition.block_of(), &[0, 0, 0]);
            assert!(!r.is_strict());
            assert_eq!(r.q[1], 0.0);
            assert!((r.q[0] - 1.0).abs() < 1e-15);
            assert!((r.divergence_bits() - 1.0).abs() < 1e-15);

            let r = greedy_approx(&p, 2, Mode::Strict, engine).unwrap();
            assert_eq!(r.partition.block_of(), &[0, 0, 1]);
            assert!(r.is_strict());
            assert!((r.q[0] - 0.8).abs() < 1e-15 && (r.q[1] - 0.2).abs() < 1e-15);
            // mpmath: 0.4254650239458788854...
            assert!((r.divergence_bits() - 0.425_465_023_945_878_9).abs() < 1e-13);
        }
    }

    #[test]
    fn bad_m() {
        let p = dist(&[0.5, 0.3, 0.2]);
        assert!(matches!(greedy_approx(&p, 0, Mode::Strict, Engine::Tree), Err(Error::BadM { .. })));
        assert!(matches!(greedy_approx(&p, 3, Mode::Strict, Engine::Tree), Err(Error::BadM { .. })));
    }

    #[test]
    fn single_bin_takes_everything() {
        let p = dist(&[0.4, 0.35, 0.25]);
        for (mode, engine) in ALL {
            let r = greedy_approx(&p, 1, mode, engine).unwrap();
            assert_eq!(r.partition.block_of(), &[0, 0, 0]);
        }
    }

    #[test]
    fn bin_index_value_is_available() {
        let p = dist(&[0.5, 0.3, 0.2]);
        let r = greedy_approx(&p, 2, Mode::Strict, Engine::Tree).unwrap();
        let direct = relative_entropy(&r.q, &p.probs()[..2]).unwrap();
        assert_eq!(r.bits(crate::Pairing::BinIndex), direct);
        assert!(r.bits(crate::Pairing::SortedCanonical) <= direct);
    }

    #[test]
    fn threshold_tie_overflows_to_next_bin() {
        // Thresholds are 0.75 and 0.5 + 0.25 == 0.75 exactly, so the third quarter moves on.
        let p = dist(&[0.25; 4]);
        for engine in [Engine::Naive, Engine::Tree] {
            let s = pack(&p, 2, Mode::Paper, engine).unwrap();
            assert_eq!(s.thresholds, vec![0.75, 0.75]);
            assert_eq!(s.assignments, vec![0, 0, 1, 1]);
        }
    }
}
