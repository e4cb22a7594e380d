use crate::error::{Error, Result};

/// Max-segment tree over per-bin slack, one leaf per bin in index order.
///
/// The root-to-leaf descent goes left whenever the left subtree holds a slack
/// strictly greater than the item, which yields the smallest feasible bin in
/// `O(log m)`.
#[derive(Debug, Clone)]
pub struct CapacityTree {
    bins: usize,
    /// Number of leaves, a power of two. Node `k` has children `2k`, `2k+1`.
    width: usize,
    nodes: Vec<f64>,
}

impl CapacityTree {
    pub fn new(slacks: &[f64]) -> Self {
        let bins = slacks.len();
        let width = bins.max(1).next_power_of_two();
        let mut nodes = vec![f64::NEG_INFINITY; 2 * width];
        nodes[width..width + bins].copy_from_slice(slacks);
        for k in (1..width).rev() {
            nodes[k] = nodes[2 * k].max(nodes[2 * k + 1]);
        }
        Self { bins, width, nodes }
    }

    pub fn len(&self) -> usize {
        self.bins
    }

    pub fn is_empty(&self) -> bool {
        self.bins == 0
    }

    pub fn slack(&self, bin: usize) -> f64 {
        self.nodes[self.width + bin]
    }

    /// Largest slack over all bins.
    pub fn max_slack(&self) -> f64 {
        self.nodes[1]
    }

    pub fn set(&mut self, bin: usize, slack: f64) {
        assert!(bin < self.bins, "bin {bin} out of range");
        let mut k = self.width + bin;
        self.nodes[k] = slack;
        while k > 1 {
            k /= 2;
            self.nodes[k] = self.nodes[2 * k].max(self.nodes[2 * k + 1]);
        }
    }

    /// Smallest bin whose slack is strictly greater than `item`.
    pub fn leftmost_feasible(&self, item: f64) -> Result<usize> {
        if !(self.nodes[1] > item) {
            return Err(Error::InfeasiblePlacement { item });
        }
        let mut k = 1;
        while k < self.width {
            k = if self.nodes[2 * k] > item { 2 * k } else { 2 * k + 1 };
        }
        Ok(k - self.width)
    }

    /// Debug check that every internal node is the max of its children.
    pub fn is_consistent(&self) -> bool {
        (1..self.width).all(|k| self.nodes[k] == self.nodes[2 * k].max(self.nodes[2 * k + 1]))
    }
}

/// Free-function form of [`CapacityTree::leftmost_feasible`].
pub fn leftmost_feasible(tree: &CapacityTree, item: f64) -> Result<usize> {
    tree.leftmost_feasible(item)
}

/// Smallest non-negative `x` for which `contents + x < threshold` is false
/// in floating point.
///
/// `fl(contents + x)` is monotone in `x`, so an item fits exactly when it is
/// strictly below this bound. Storing it as the tree slack makes the tree
/// reproduce the raw placement comparison bit for bit.
pub(crate) fn admission_bound(contents: f64, threshold: f64) -> f64 {
    debug_assert!(contents >= 0.0 && threshold >= 0.0);
    // Non-negative floats order like their bit patterns; `threshold` itself
    // is always inadmissible because `contents >= 0`.
    let (mut lo, mut hi) = (0u64, threshold.to_bits());
    if !(contents < threshold) {
        return 0.0;
    }
    // The answer is almost always within a few ulps of the plain difference.
    let guess = threshold - contents;
    if contents + guess < threshold {
        lo = guess.to_bits();
        for step in 1..=4 {
            if !(contents + f64::from_bits(lo + step) < threshold) {
                return f64::from_bits(lo + step);
            }
        }
    } else {
        hi = guess.to_bits();
        for step in 1..=hi.min(4) {
            if contents + f64::from_bits(hi - step) < threshold {
                return f64::from_bits(hi - step + 1);
            }
        }
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if contents + f64::from_bits(mid) < threshold {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    f64::from_bits(hi)
}
