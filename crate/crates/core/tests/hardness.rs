use rand::Rng;

use klagg::hardness::{encode_exact, extract_certificate};
use klagg::harness::instance_rng;
use klagg::{
    apply_partition, decide_by_oracle, encode, lower_bound, target_value, verify_certificate, Decision, PartitionMap,
    ThreePartitionInstance,
};
use num_rational::Ratio;

/// Plain backtracking 3-Partition solver over the multiset.
fn brute_force_solvable(values: &[u64], target: u64) -> bool {
    fn go(values: &[u64], used: &mut [bool], target: u64) -> bool {
        let Some(first) = used.iter().position(|u| !u) else {
            return true;
        };
        used[first] = true;
        for j in first + 1..values.len() {
            if used[j] {
                continue;
            }
            used[j] = true;
            for k in j + 1..values.len() {
                if !used[k] && values[first] + values[j] + values[k] == target {
                    used[k] = true;
                    if go(values, used, target) {
                        return true;
                    }
                    used[k] = false;
                }
            }
            used[j] = false;
        }
        used[first] = false;
        false
    }
    go(values, &mut vec![false; values.len()], target)
}

fn random_instance(seed: u64) -> ThreePartitionInstance {
    let mut rng = instance_rng(99, seed);
    let m = rng.random_range(2..=3usize);
    let mut values: Vec<i64> = (0..3 * m).map(|_| rng.random_range(1..=7)).collect();
    let rem = values.iter().sum::<i64>() % m as i64;
    if rem != 0 {
        values[0] += m as i64 - rem;
    }
    ThreePartitionInstance::from_values(&values, m).unwrap()
}

fn planted_yes_instance(seed: u64) -> ThreePartitionInstance {
    let mut rng = instance_rng(77, seed);
    let m = rng.random_range(2..=3usize);
    let t = rng.random_range(3..=15i64);
    let mut values = Vec::new();
    for _ in 0..m {
        let a = rng.random_range(1..=t - 2);
        let b = rng.random_range(1..=t - a - 1);
        values.extend([a, b, t - a - b]);
    }
    ThreePartitionInstance::new(&values, m, t).unwrap()
}

#[test]
fn oracle_agrees_with_brute_force() {
    let mut yes = 0;
    let mut no = 0;
    for seed in 0..60 {
        for inst in [random_instance(seed), planted_yes_instance(seed)] {
            let expected = brute_force_solvable(inst.values(), inst.target());
            let decision = decide_by_oracle(&inst).unwrap();
            assert_eq!(decision.is_yes(), expected, "{inst}");
            if let Decision::Yes { certificate, .. } = &decision {
                assert!(verify_certificate(&inst, certificate));
                yes += 1;
            } else {
                no += 1;
            }
        }
    }
    assert!(yes > 20 && no > 5, "yes={yes} no={no}");
}

#[test]
fn tail_mass_is_exactly_one_over_m_plus_one() {
    for seed in 0..100 {
        let inst = random_instance(seed);
        let m = inst.m() as i128;
        let exact = encode_exact(&inst).unwrap();
        let tail: Ratio<i128> = exact[inst.m()..].iter().sum();
        assert_eq!(tail, Ratio::new(1, m + 1));
        assert!(exact.windows(2).all(|w| w[0] >= w[1]));
    }
}

#[test]
fn encoded_lower_bound_equals_target() {
    for seed in 0..50 {
        let inst = random_instance(seed);
        let p = encode(&inst).unwrap();
        let b = lower_bound(&p, inst.m()).unwrap();
        let u = 1.0 / inst.m() as f64;
        assert!(b.lb.iter().all(|x| (x - u).abs() < 1e-12));
        assert!((b.value_bits - target_value(inst.m()).unwrap()).abs() < 1e-12);
    }
}

/// A verified certificate pushed through the encoding gives the uniform
/// aggregation at exactly the target value.
#[test]
fn certificates_map_to_uniform_aggregations() {
    for seed in 0..50 {
        let inst = planted_yes_instance(seed);
        let Decision::Yes { certificate, .. } = decide_by_oracle(&inst).unwrap() else {
            panic!("planted instance decided no");
        };
        let m = inst.m();
        let mut block_of = vec![0; inst.n() + m];
        for (j, triple) in certificate.iter().enumerate() {
            block_of[j] = j;
            for &i in triple {
                block_of[m + i] = j;
            }
        }
        let p = encode(&inst).unwrap();
        let r = apply_partition(&p, &PartitionMap::strict(block_of.clone(), m).unwrap()).unwrap();
        assert!(r.q.iter().all(|q| (q - 1.0 / m as f64).abs() < 1e-12));
        assert!((r.divergence_bits() - target_value(m).unwrap()).abs() < 1e-9);
        assert_eq!(extract_certificate(&inst, &block_of).unwrap(), certificate);
    }
}
