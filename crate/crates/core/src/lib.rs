//! Reducing the dimension of a discrete distribution by aggregation.
//!
//! Given `p` with `n` components and a target size `m < n`, an aggregation
//! `q` sums the components of `p` over the blocks of a partition into `m`
//! groups. This crate finds aggregations with small relative entropy
//! `D(q || p)` (in bits):
//!
//! * [`exact`] enumerates every partition and returns the optimum (small `n`);
//! * [`greedy`] packs components first-fit into bins sized by the lower-bound
//!   distribution, in `O(n log m)`, guaranteeing `D(q || p) < OPT + 1`;
//! * [`hardness`] encodes 3-Partition instances as aggregation problems and
//!   checks the equivalence on toy inputs;
//! * [`harness`] holds generators, experiment drivers and the invariant checker
//!   used by the `klagg` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod distribution;
pub mod divergence;
pub mod error;
pub mod exact;
pub mod greedy;
pub mod hardness;
pub mod harness;
pub mod io;

pub use distribution::{
    apply_partition, compensated_sum, validate_distribution, AggregationResult, Distribution, Pairing, PartitionMap,
};
pub use divergence::{
    decomposition_residual, lower_bound, relative_entropy, shannon_entropy, sorted_pairing_divergence, LowerBound,
};
pub use error::{Error, Result};
pub use exact::{enumerate_partitions, exact_opt, exact_search, ExactSearch, PartitionEnumerator};
pub use greedy::{greedy_approx, leftmost_feasible, CapacityTree, Engine, GreedyState, Mode};
pub use hardness::{decide_by_oracle, encode, target_value, verify_certificate, Decision, ThreePartitionInstance};
