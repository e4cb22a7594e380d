use serde::{Deserialize, Serialize};

use crate::distribution::{Distribution, Pairing};
use crate::divergence::{decomposition_residual, lower_bound, relative_entropy};
use crate::error::Result;
use crate::exact::exact_opt;
use crate::greedy::{greedy_approx, Engine, GreedyState, Mode};

/// Instances up to this size also get the exact-solver checks.
pub const CHECK_EXACT_MAX_N: usize = 12;

const RESIDUAL_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Paper => "paper",
        Mode::Strict => "strict",
    }
}

/// Runs every greedy invariant on `(p, m)`, plus the exact-solver
/// comparisons when `n <= CHECK_EXACT_MAX_N`.
pub fn check_instance(p: &Distribution, m: usize) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    let bound = lower_bound(p, m)?;
    let state = GreedyState::new(p, m)?;
    let log_one_plus_s = (1.0 + state.head_mass).log2();
    let opt = if p.len() <= CHECK_EXACT_MAX_N {
        let o = exact_opt(p, m)?.divergence_bits();
        out.push(CheckOutcome::new(
            "opt >= lower bound",
            o >= bound.value_bits - RESIDUAL_TOLERANCE,
            format!("opt={o:.12} lb={:.12}", bound.value_bits),
        ));
        Some(o)
    } else {
        None
    };

    for mode in [Mode::Paper, Mode::Strict] {
        let name = mode_name(mode);
        let tree = greedy_approx(p, m, mode, Engine::Tree)?;
        let naive = greedy_approx(p, m, mode, Engine::Naive)?;

        out.push(CheckOutcome::new(
            format!("{name}: every item placed"),
            tree.partition.n() == p.len(),
            format!("{} of {}", tree.partition.n(), p.len()),
        ));
        out.push(CheckOutcome::new(format!("{name}: engines agree"), tree.partition == naive.partition, String::new()));
        let worst = tree.q.iter().zip(&state.thresholds).map(|(q, t)| q / t).fold(0.0, f64::max);
        out.push(CheckOutcome::new(
            format!("{name}: q_i < (1+S) lb_i"),
            tree.q.iter().zip(&state.thresholds).all(|(q, t)| q < t),
            format!("max q_i/threshold_i = {worst:.12}"),
        ));
        let to_lb = relative_entropy(&tree.q, &bound.lb)?;
        out.push(CheckOutcome::new(
            format!("{name}: D(q||lb) < log2(1+S)"),
            to_lb < log_one_plus_s,
            format!("{to_lb:.12} vs {log_one_plus_s:.12}"),
        ));
        let residual = decomposition_residual(&tree.q, p)?;
        out.push(CheckOutcome::new(
            format!("{name}: decomposition residual"),
            residual.abs() <= RESIDUAL_TOLERANCE,
            format!("{residual:.3e}"),
        ));
        if mode == Mode::Strict {
            out.push(CheckOutcome::new("strict: all bins nonempty", tree.partition.all_blocks_used(), String::new()));
        }
        if let Some(opt) = opt {
            for pairing in [Pairing::SortedCanonical, Pairing::BinIndex] {
                let g = tree.bits(pairing);
                out.push(CheckOutcome::new(
                    format!("{name}: greedy < opt + 1 ({pairing:?})"),
                    g < opt + 1.0,
                    format!("greedy={g:.12} opt={opt:.12}"),
                ));
            }
            if mode == Mode::Strict {
                out.push(CheckOutcome::new(
                    "strict: opt <= greedy",
                    opt <= tree.divergence_bits() + 1e-12,
                    String::new(),
                ));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_instance_passes_everything() {
        let p = Distribution::new(&[0.5, 0.3, 0.2]).unwrap();
        let checks = check_instance(&p, 2).unwrap();
        assert!(checks.len() > 10);
        for c in &checks {
            assert!(c.passed, "{c:?}");
        }
    }

    #[test]
    fn large_instance_skips_exact() {
        let p = crate::harness::random_distribution(200, 3).unwrap();
        let checks = check_instance(&p, 7).unwrap();
        assert!(checks.iter().all(|c| c.passed));
        assert!(!checks.iter().any(|c| c.name.contains("opt")));
    }
}
