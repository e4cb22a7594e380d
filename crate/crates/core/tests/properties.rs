#![allow(clippy::needless_range_loop)]

use itertools::Itertools;
use proptest::prelude::*;

use klagg::harness::{instance_rng, random_distribution, random_distribution_with};
use klagg::{
    apply_partition, compensated_sum, decomposition_residual, enumerate_partitions, exact_opt, greedy_approx,
    lower_bound, relative_entropy, sorted_pairing_divergence, Distribution, Engine, GreedyState, Mode, Pairing,
    PartitionMap,
};

/// Direct divergence in bits, written independently of the library.
fn kl_oracle(q: &[f64], p: &[f64]) -> f64 {
    q.iter().zip(p).filter(|(qi, _)| **qi > 0.0).map(|(qi, pi)| qi * (qi / pi).ln()).sum::<f64>()
        / std::f64::consts::LN_2
}

fn simplex(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, n).prop_map(|v| {
        let s: f64 = v.iter().sum();
        v.into_iter().map(|x| x / s).collect()
    })
}

fn dist_and_m(max_n: usize) -> impl Strategy<Value = (Distribution, usize)> {
    (3..=max_n).prop_flat_map(|n| (simplex(n), 1..n)).prop_map(|(v, m)| (Distribution::new(&v).unwrap(), m))
}

proptest! {
    #[test]
    fn validated_distribution_is_sorted_and_normalized(v in (2usize..40).prop_flat_map(simplex)) {
        let d = Distribution::new(&v).unwrap();
        prop_assert!(d.probs().windows(2).all(|w| w[0] >= w[1]));
        prop_assert!((compensated_sum(d.probs().iter().copied()) - 1.0).abs() < 1e-12);
        for (k, &orig) in d.order().iter().enumerate() {
            prop_assert!((d.probs()[k] - v[orig]).abs() <= 1e-15 * v[orig].max(1e-300) * 10.0);
        }
    }

    #[test]
    fn partition_mass_is_conserved_and_relabeling_permutes_q(
        (p, m) in dist_and_m(30),
        seed in any::<u64>(),
    ) {
        use rand::seq::SliceRandom;
        let mut rng = instance_rng(seed, 0);
        let n = p.len();
        let mut labels: Vec<usize> = (0..m).chain((m..n).map(|i| i % m)).collect();
        labels.shuffle(&mut rng);
        let pi = PartitionMap::strict(labels, m).unwrap();
        let r = apply_partition(&p, &pi).unwrap();
        let total = compensated_sum(r.q.iter().copied());
        prop_assert!((total - 1.0).abs() <= n as f64 * f64::EPSILON);

        let mut perm: Vec<usize> = (0..m).collect();
        perm.shuffle(&mut rng);
        let relabeled = apply_partition(&p, &pi.relabel(&perm).unwrap()).unwrap();
        for b in 0..m {
            prop_assert_eq!(relabeled.q[perm[b]], r.q[b]);
        }
        prop_assert_eq!(relabeled.sorted_bits, r.sorted_bits);
    }

    #[test]
    fn reported_partition_maps_back_to_caller_indices(v in (3usize..20).prop_flat_map(simplex), m in 1usize..3) {
        let p = Distribution::new(&v).unwrap();
        let r = greedy_approx(&p, m, Mode::Strict, Engine::Tree).unwrap();
        let original = p.to_original(r.partition.block_of());
        let mut q = vec![0.0; m];
        for (i, &b) in original.iter().enumerate() {
            q[b] += v[i];
        }
        for b in 0..m {
            prop_assert!((q[b] - r.q[b]).abs() < 1e-12);
        }
    }

    #[test]
    fn relative_entropy_is_nonnegative(v in (2usize..20).prop_flat_map(|n| (simplex(n), simplex(n)))) {
        let (q, p) = v;
        let d = relative_entropy(&q, &p).unwrap();
        prop_assert!(d >= -1e-12);
        prop_assert!(relative_entropy(&p, &p).unwrap().abs() <= 1e-12);
        prop_assert!((d - kl_oracle(&q, &p)).abs() < 1e-10);
    }

    #[test]
    fn decomposition_identity_holds((p, m) in dist_and_m(64), raw in prop::collection::vec(0.0f64..1.0, 64)) {
        let mut q: Vec<f64> = raw[..m].iter().map(|&x| if x < 0.2 { 0.0 } else { x }).collect();
        if q.iter().all(|&x| x == 0.0) {
            q[0] = 1.0;
        }
        let s: f64 = q.iter().sum();
        q.iter_mut().for_each(|x| *x /= s);
        prop_assert!(decomposition_residual(&q, &p).unwrap().abs() <= 1e-9);
    }

    #[test]
    fn every_aggregation_respects_the_lower_bound((p, m) in dist_and_m(9)) {
        let lb = lower_bound(&p, m).unwrap().value_bits;
        for pi in enumerate_partitions(p.len(), m).unwrap() {
            let r = apply_partition(&p, &pi).unwrap();
            prop_assert!(r.sorted_bits >= lb - 1e-9);
            prop_assert!(r.bin_index_bits >= r.sorted_bits - 1e-12);
        }
    }

    #[test]
    fn greedy_invariants((p, m) in dist_and_m(200)) {
        let state = GreedyState::new(&p, m).unwrap();
        let bound = lower_bound(&p, m).unwrap();
        for mode in [Mode::Paper, Mode::Strict] {
            let tree = greedy_approx(&p, m, mode, Engine::Tree).unwrap();
            let naive = greedy_approx(&p, m, mode, Engine::Naive).unwrap();
            prop_assert_eq!(&tree.partition, &naive.partition);
            prop_assert_eq!(tree.partition.n(), p.len());
            for (q, t) in tree.q.iter().zip(&state.thresholds) {
                prop_assert!(q < t);
            }
            let to_lb = relative_entropy(&tree.q, &bound.lb).unwrap();
            prop_assert!(to_lb < (1.0 + state.head_mass).log2());
            prop_assert!(tree.bin_index_bits < bound.value_bits + 1.0);
            if mode == Mode::Strict {
                prop_assert!(tree.partition.all_blocks_used());
            }
        }
    }
}

/// Sorted pairing is optimal among all labelings of the same block masses.
#[test]
fn sorted_pairing_beats_every_permutation() {
    for seed in 0..40u64 {
        let mut rng = instance_rng(11, seed);
        for m in 1..=6usize {
            let p = random_distribution_with(m + 3, &mut rng).unwrap();
            let q = random_distribution_with(m.max(2), &mut rng).unwrap();
            let q = &q.probs()[..m];
            let mass: f64 = q.iter().sum();
            let q: Vec<f64> = q.iter().map(|x| x / mass).collect();
            let sorted = sorted_pairing_divergence(&q, &p).unwrap();
            for perm in (0..m).permutations(m) {
                let permuted: Vec<f64> = perm.iter().map(|&i| q[i]).collect();
                let d = kl_oracle(&permuted, &p.probs()[..m]);
                assert!(sorted <= d + 1e-12, "seed {seed} m {m}: {sorted} > {d}");
            }
        }
    }
}

/// The strict reserve rule never breaks the overstuffing bound; swept over
/// every `(n, m)` with `n <= 10`.
#[test]
fn strict_reserve_keeps_thresholds_for_all_small_shapes() {
    for n in 3..=10usize {
        for m in 1..n {
            for s in 0..50u64 {
                let p = random_distribution_with(n, &mut instance_rng(1000 + n as u64, s * 16 + m as u64)).unwrap();
                let state = GreedyState::new(&p, m).unwrap();
                let r = greedy_approx(&p, m, Mode::Strict, Engine::Naive).unwrap();
                assert!(r.partition.all_blocks_used(), "n={n} m={m}");
                assert!(r.q.iter().zip(&state.thresholds).all(|(q, t)| q < t), "n={n} m={m}");
            }
            // Heavy-tailed and flat shapes reach the reserve rule more often.
            let flat = Distribution::new(&vec![1.0 / n as f64; n]).unwrap();
            let r = greedy_approx(&flat, m, Mode::Strict, Engine::Tree).unwrap();
            assert!(r.partition.all_blocks_used());
            let raw: Vec<f64> = (0..n).map(|i| 0.5f64.powi(i as i32)).collect();
            let s: f64 = raw.iter().sum();
            let geo = Distribution::new(&raw.iter().map(|x| x / s).collect::<Vec<_>>()).unwrap();
            let r = greedy_approx(&geo, m, Mode::Strict, Engine::Tree).unwrap();
            assert!(r.partition.all_blocks_used());
        }
    }
}

#[test]
fn exact_never_loses_to_greedy() {
    for seed in 0..200u64 {
        let mut rng = instance_rng(5, seed);
        let n = 3 + (seed as usize % 7);
        let m = 1 + (seed as usize / 7) % (n - 1);
        let p = random_distribution_with(n, &mut rng).unwrap();
        let opt = exact_opt(&p, m).unwrap();
        let g = greedy_approx(&p, m, Mode::Strict, Engine::Tree).unwrap();
        assert!(opt.divergence_bits() <= g.bits(Pairing::SortedCanonical) + 1e-12);
        assert!(opt.divergence_bits() >= lower_bound(&p, m).unwrap().value_bits - 1e-9);
        assert!(g.bits(Pairing::BinIndex) < opt.divergence_bits() + 1.0);
        for pi in enumerate_partitions(n, m).unwrap() {
            let r = apply_partition(&p, &pi).unwrap();
            assert!(decomposition_residual(&r.q, &p).unwrap().abs() <= 1e-9);
        }
    }
}

#[test]
fn large_random_distribution_is_valid() {
    let d = random_distribution(1_000_000, 1).unwrap();
    assert_eq!(d.len(), 1_000_000);
    assert!(d.probs().windows(2).all(|w| w[0] >= w[1]));
}
