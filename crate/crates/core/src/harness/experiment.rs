use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{instance_rng, random_distribution, random_distribution_with, tightness_instance, ExperimentReport};
use crate::distribution::{Distribution, Pairing};
use crate::divergence::lower_bound;
use crate::error::{Error, Result};
use crate::exact::{exact_opt, MAX_EXACT_N};
use crate::greedy::{greedy_approx, Engine, GreedyState, Mode};

/// Slack allowed when comparing an optimum against the lower bound.
const LOWER_BOUND_SLACK: f64 = 1e-9;

/// How `m` is drawn for an instance of size `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MRule {
    /// Uniform over `2..=n-1`.
    Uniform,
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GapConfig {
    pub count: usize,
    pub n_min: usize,
    pub n_max: usize,
    pub m_rule: MRule,
    pub seed: u64,
}

impl Default for GapConfig {
    fn default() -> Self {
        Self { count: 1000, n_min: 4, n_max: 10, m_rule: MRule::Uniform, seed: 7 }
    }
}

/// One instance of a greedy-versus-exact comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub index: u64,
    pub n: usize,
    pub m: usize,
    pub opt_bits: f64,
    pub lower_bound_bits: f64,
    pub paper_bits: f64,
    pub paper_bin_bits: f64,
    pub strict_bits: f64,
    pub strict_bin_bits: f64,
    /// Largest greedy value over modes and pairings, minus `opt_bits`.
    pub gap: f64,
    pub engines_agree: bool,
    pub overstuff_ok: bool,
    /// Wall time for the whole row. Not reproducible across runs.
    pub wall_nanos: u64,
}

impl GapRow {
    pub fn is_violation(&self) -> bool {
        !(self.gap < 1.0)
            || self.opt_bits < self.lower_bound_bits - LOWER_BOUND_SLACK
            || !self.engines_agree
            || !self.overstuff_ok
    }
}

fn validate(config: &GapConfig) -> Result<()> {
    if config.n_max > MAX_EXACT_N {
        return Err(Error::TooLarge { n: config.n_max, cap: MAX_EXACT_N });
    }
    if config.n_min > config.n_max {
        return Err(Error::BadN { n: config.n_min });
    }
    match config.m_rule {
        MRule::Uniform if config.n_min < 3 => Err(Error::BadN { n: config.n_min }),
        MRule::Fixed(m) if m == 0 || m >= config.n_min => Err(Error::BadM { m, n: config.n_min }),
        _ => Ok(()),
    }
}

fn gap_row(config: &GapConfig, index: u64) -> Result<GapRow> {
    let mut rng = instance_rng(config.seed, index);
    let n = rng.random_range(config.n_min..=config.n_max);
    let m = match config.m_rule {
        MRule::Uniform => rng.random_range(2..=n - 1),
        MRule::Fixed(m) => m,
    };
    let p = random_distribution_with(n, &mut rng)?;

    let start = Instant::now();
    let opt = exact_opt(&p, m)?.divergence_bits();
    let lb = lower_bound(&p, m)?.value_bits;
    let thresholds = GreedyState::new(&p, m)?.thresholds;

    let mut engines_agree = true;
    let mut overstuff_ok = true;
    let mut values = [[0.0; 2]; 2];
    for (k, mode) in [Mode::Paper, Mode::Strict].into_iter().enumerate() {
        let tree = greedy_approx(&p, m, mode, Engine::Tree)?;
        let naive = greedy_approx(&p, m, mode, Engine::Naive)?;
        engines_agree &= tree.partition == naive.partition && tree.q == naive.q;
        overstuff_ok &= tree.q.iter().zip(&thresholds).all(|(q, t)| q < t);
        values[k] = [tree.bits(Pairing::SortedCanonical), tree.bits(Pairing::BinIndex)];
    }
    let worst = values.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);

    Ok(GapRow {
        index,
        n,
        m,
        opt_bits: opt,
        lower_bound_bits: lb,
        paper_bits: values[0][0],
        paper_bin_bits: values[0][1],
        strict_bits: values[1][0],
        strict_bin_bits: values[1][1],
        gap: worst - opt,
        engines_agree,
        overstuff_ok,
        wall_nanos: start.elapsed().as_nanos() as u64,
    })
}

/// Compares both greedy modes (on both engines) against the exact optimum on
/// `count` random instances. Instances run in parallel; the report does not
/// depend on scheduling.
pub fn gap_experiment(config: &GapConfig) -> Result<ExperimentReport> {
    validate(config)?;
    let rows = (0..config.count as u64).into_par_iter().map(|i| gap_row(config, i)).collect::<Result<Vec<_>>>()?;
    Ok(ExperimentReport::new(rows))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TightnessRow {
    pub epsilon: f64,
    pub greedy_bits: f64,
    pub opt_bits: f64,
    pub gap: f64,
}

/// Greedy versus optimum on `(1/2 - eps, 1/2 - eps, 2 eps)` with `m = 2`.
pub fn tightness_sweep(epsilons: &[f64]) -> Result<Vec<TightnessRow>> {
    epsilons
        .iter()
        .map(|&epsilon| {
            let p = tightness_instance(epsilon)?;
            let greedy_bits = greedy_approx(&p, 2, Mode::Strict, Engine::Tree)?.divergence_bits();
            let opt_bits = exact_opt(&p, 2)?.divergence_bits();
            Ok(TightnessRow { epsilon, greedy_bits, opt_bits, gap: greedy_bits - opt_bits })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub n: usize,
    pub m: usize,
    /// Best of the repetitions, seconds.
    pub seconds: f64,
    /// `seconds` divided by the previous row's.
    pub ratio: Option<f64>,
}

fn time_greedy(p: &Distribution, m: usize, reps: usize) -> Result<f64> {
    let mut best = f64::INFINITY;
    for _ in 0..reps.max(1) {
        let start = Instant::now();
        let r = greedy_approx(p, m, Mode::Strict, Engine::Tree)?;
        let secs = start.elapsed().as_secs_f64();
        std::hint::black_box(r);
        best = best.min(secs);
    }
    Ok(best)
}

/// Times the tree engine on random instances of each size in `n_list`.
pub fn scaling_benchmark(n_list: &[usize], m: usize, seed: u64, reps: usize) -> Result<Vec<ScalingRow>> {
    if let Some(&n) = n_list.iter().min() {
        if m == 0 || m >= n {
            return Err(Error::BadM { m, n });
        }
    }
    let mut rows: Vec<ScalingRow> = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let p = random_distribution(n, seed)?;
        let seconds = time_greedy(&p, m, reps)?;
        let ratio = rows.last().map(|prev| seconds / prev.seconds);
        rows.push(ScalingRow { n, m, seconds, ratio });
    }
    Ok(rows)
}
