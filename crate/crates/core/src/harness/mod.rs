//! Instance generators, experiment drivers and the invariant checker.

mod check;
mod experiment;
mod report;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

pub use check::{check_instance, CheckOutcome, CHECK_EXACT_MAX_N};
pub use experiment::{
    gap_experiment, scaling_benchmark, tightness_sweep, GapConfig, GapRow, MRule, ScalingRow, TightnessRow,
};
pub use report::{ExperimentReport, ReportSummary};

use crate::distribution::{compensated_sum, Distribution};
use crate::error::{Error, Result};

/// Generator for instance `index` of an experiment seeded with `seed`.
///
/// Each instance gets its own ChaCha stream, so results do not depend on the
/// order (or thread) in which instances are built.
pub fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform sample from the simplex: normalized standard exponentials, sorted.
pub fn random_distribution_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Distribution> {
    if n < 2 {
        return Err(Error::BadN { n });
    }
    let raw: Vec<f64> = (0..n)
        .map(|_| loop {
            let x: f64 = rng.sample(Exp1);
            if x > 0.0 {
                break x;
            }
        })
        .collect();
    let total = compensated_sum(raw.iter().copied());
    let normalized: Vec<f64> = raw.iter().map(|x| x / total).collect();
    Distribution::new(&normalized)
}

pub fn random_distribution(n: usize, seed: u64) -> Result<Distribution> {
    random_distribution_with(n, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// `(1/2 - eps, 1/2 - eps, 2 eps)`, on which the greedy gap tends to 1.
pub fn tightness_instance(epsilon: f64) -> Result<Distribution> {
    if !(epsilon > 0.0 && epsilon < 1.0 / 6.0) {
        return Err(Error::BadEpsilon { epsilon });
    }
    Distribution::new(&[0.5 - epsilon, 0.5 - epsilon, 2.0 * epsilon])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_is_deterministic() {
        let a = random_distribution(5, 42).unwrap();
        let b = random_distribution(5, 42).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, random_distribution(5, 43).unwrap());
    }

    #[test]
    fn random_is_valid() {
        for seed in 0..50 {
            let d = random_distribution(5, seed).unwrap();
            assert!((compensated_sum(d.probs().iter().copied()) - 1.0).abs() <= 1e-12);
            assert!(d.probs().windows(2).all(|w| w[0] >= w[1]));
        }
        assert!(matches!(random_distribution(1, 0), Err(Error::BadN { n: 1 })));
    }

    #[test]
    fn streams_differ_by_index() {
        let mut a = instance_rng(7, 0);
        let mut b = instance_rng(7, 1);
        let x: u64 = a.random();
        let y: u64 = b.random();
        assert_ne!(x, y);
        let z: u64 = instance_rng(7, 0).random();
        assert_eq!(x, z);
    }

    #[test]
    fn tightness_family() {
        assert_eq!(tightness_instance(0.001).unwrap().probs(), &[0.499, 0.499, 0.002]);
        let d = tightness_instance(0.1).unwrap();
        for (x, want) in d.probs().iter().zip([0.4, 0.4, 0.2]) {
            assert!((x - want).abs() < 1e-15);
        }
        assert!(matches!(tightness_instance(0.25), Err(Error::BadEpsilon { .. })));
        assert!(matches!(tightness_instance(0.0), Err(Error::BadEpsilon { .. })));
        assert!(matches!(tightness_instance(f64::NAN), Err(Error::BadEpsilon { .. })));
    }
}
