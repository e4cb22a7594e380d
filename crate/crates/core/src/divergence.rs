//! Relative entropy, Shannon entropy and the lower-bound distribution.
//!
//! All quantities are in bits. Zero components follow `0 log 0 = 0` and
//! `0 log(0/p) = 0`, so relaxed aggregations with empty bins are measurable.

use crate::distribution::{compensated_sum, Distribution, NORMALIZATION_TOLERANCE};
use crate::error::{Error, Result};

/// Components below this are rejected as negative mass rather than treated
/// as rounding noise.
pub const NEGATIVE_MASS_TOLERANCE: f64 = 1e-15;

fn check_mass(q: &[f64]) -> Result<()> {
    if let Some((index, &value)) = q.iter().enumerate().find(|(_, v)| **v < -NEGATIVE_MASS_TOLERANCE || v.is_nan()) {
        return Err(Error::NegativeMass { index, value });
    }
    let sum = compensated_sum(q.iter().copied());
    if !((sum - 1.0).abs() <= NORMALIZATION_TOLERANCE) {
        return Err(Error::NotNormalized { sum });
    }
    Ok(())
}

#[inline]
fn term(q: f64, p: f64) -> f64 {
    if q > 0.0 {
        q * (q / p).log2()
    } else {
        0.0
    }
}

pub(crate) fn kl_bits_unchecked(q: &[f64], p_ref: &[f64]) -> f64 {
    compensated_sum(q.iter().zip(p_ref).map(|(&qi, &pi)| term(qi, pi)))
}

/// `D(q || p_ref) = sum q_i log2(q_i / p_ref_i)`, paired index-wise.
pub fn relative_entropy(q: &[f64], p_ref: &[f64]) -> Result<f64> {
    if q.len() != p_ref.len() {
        return Err(Error::LengthMismatch { expected: p_ref.len(), found: q.len() });
    }
    if let Some((index, &value)) = p_ref.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
        return Err(Error::NonPositiveEntry { index, value });
    }
    check_mass(q)?;
    Ok(kl_bits_unchecked(q, p_ref))
}

/// `H(q) = -sum q_i log2 q_i`.
pub fn shannon_entropy(q: &[f64]) -> Result<f64> {
    check_mass(q)?;
    Ok(-compensated_sum(q.iter().map(|&x| term(x, 1.0))))
}

/// Divergence of `q` from `p` with `q` sorted descending before pairing
/// against `p_1..p_m`. This is the canonical objective: block labels are
/// free, and by rearrangement the sorted pairing minimizes over labelings.
pub fn sorted_pairing_divergence(q: &[f64], p: &Distribution) -> Result<f64> {
    let m = q.len();
    if m == 0 || m > p.len() {
        return Err(Error::BadM { m, n: p.len() });
    }
    let mut sorted = q.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    relative_entropy(&sorted, &p.probs()[..m])
}

/// The first `m` components of `p` renormalized, and its divergence from `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerBound {
    pub lb: Vec<f64>,
    /// `-log2(prefix_mass)`.
    pub value_bits: f64,
    /// Mass of the `m` largest components of `p`.
    pub prefix_mass: f64,
}

pub fn lower_bound(p: &Distribution, m: usize) -> Result<LowerBound> {
    if m == 0 || m >= p.len() {
        return Err(Error::BadM { m, n: p.len() });
    }
    let prefix_mass = p.prefix_mass(m);
    let lb = p.probs()[..m].iter().map(|&x| x / prefix_mass).collect();
    Ok(LowerBound { lb, value_bits: (-prefix_mass.log2()).max(0.0), prefix_mass })
}

/// `D(q||p) - D(q||lb(p)) - D(lb(p)||p)`, each side evaluated directly.
/// Zero up to rounding for every normalized `q`.
pub fn decomposition_residual(q: &[f64], p: &Distribution) -> Result<f64> {
    let m = q.len();
    let bound = lower_bound(p, m)?;
    let head = &p.probs()[..m];
    let full = relative_entropy(q, head)?;
    let to_lb = relative_entropy(q, &bound.lb)?;
    let lb_to_p = relative_entropy(&bound.lb, head)?;
    Ok(full - to_lb - lb_to_p)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Frozen from a 40-digit mpmath evaluation.
    const D_07_03_VS_05_03: f64 = 0.339_798_779_019_169_2;
    const H_07_03: f64 = 0.881_290_899_230_692_6;
    const NEG_LOG2_08: f64 = 0.321_928_094_887_362_35;

    #[test]
    fn relative_entropy_examples() {
        assert!((relative_entropy(&[0.5, 0.5], &[0.25, 0.25]).unwrap() - 1.0).abs() < 1e-15);
        for m in 2..20usize {
            let q = vec![1.0 / m as f64; m];
            let p = vec![1.0 / (m + 1) as f64; m];
            let want = ((m + 1) as f64 / m as f64).log2();
            assert!((relative_entropy(&q, &p).unwrap() - want).abs() < 1e-13, "m={m}");
        }
        assert!((relative_entropy(&[0.7, 0.3], &[0.5, 0.3]).unwrap() - D_07_03_VS_05_03).abs() < 1e-14);
    }

    #[test]
    fn relative_entropy_errors() {
        assert!(matches!(relative_entropy(&[1.0], &[0.5, 0.5]), Err(Error::LengthMismatch { expected: 2, found: 1 })));
        assert!(matches!(relative_entropy(&[1.1, -0.1], &[0.5, 0.5]), Err(Error::NegativeMass { index: 1, .. })));
        assert!(matches!(relative_entropy(&[0.6, 0.6], &[0.5, 0.5]), Err(Error::NotNormalized { .. })));
        // Rounding-level negatives are tolerated as zero.
        assert_eq!(relative_entropy(&[1.0, -1e-17], &[0.5, 0.5]).unwrap(), 1.0);
    }

    #[test]
    fn entropy_examples() {
        for m in 1..17usize {
            let q = vec![1.0 / m as f64; m];
            assert!((shannon_entropy(&q).unwrap() - (m as f64).log2()).abs() < 1e-13);
        }
        assert_eq!(shannon_entropy(&[1.0, 0.0]).unwrap(), 0.0);
        assert!((shannon_entropy(&[0.7, 0.3]).unwrap() - H_07_03).abs() < 1e-14);
        assert!(matches!(shannon_entropy(&[1.5, -0.5]), Err(Error::NegativeMass { .. })));
    }

    #[test]
    fn lower_bound_examples() {
        let p = Distribution::new(&[0.5, 0.3, 0.2]).unwrap();
        let b = lower_bound(&p, 2).unwrap();
        assert!((b.lb[0] - 0.625).abs() < 1e-15 && (b.lb[1] - 0.375).abs() < 1e-15);
        assert!((b.value_bits - NEG_LOG2_08).abs() < 1e-15);
        assert!((relative_entropy(&b.lb, &p.probs()[..2]).unwrap() - b.value_bits).abs() < 1e-12);

        let p = Distribution::new(&[0.25; 4]).unwrap();
        let b = lower_bound(&p, 2).unwrap();
        assert_eq!(b.lb, vec![0.5, 0.5]);
        assert_eq!(b.value_bits, 1.0);

        assert!(matches!(lower_bound(&p, 0), Err(Error::BadM { m: 0, n: 4 })));
        assert!(matches!(lower_bound(&p, 4), Err(Error::BadM { m: 4, n: 4 })));
    }

    #[test]
    fn decomposition_examples() {
        let p = Distribution::new(&[0.5, 0.3, 0.2]).unwrap();
        assert!(decomposition_residual(&[0.7, 0.3], &p).unwrap().abs() < 1e-9);
        assert!(decomposition_residual(&[1.0, 0.0], &p).unwrap().abs() < 1e-9);
        let b = lower_bound(&p, 2).unwrap();
        assert!(decomposition_residual(&b.lb, &p).unwrap().abs() < 1e-15);
        // 0.339799 = 0.017871 + 0.321928
        let to_lb = relative_entropy(&[0.7, 0.3], &b.lb).unwrap();
        assert!((to_lb - 0.017_870_684_131_806_884).abs() < 1e-14);
    }

    #[test]
    fn sorted_pairing_is_never_worse() {
        let p = Distribution::new(&[0.5, 0.3, 0.2]).unwrap();
        let sorted = sorted_pairing_divergence(&[0.3, 0.7], &p).unwrap();
        let binwise = relative_entropy(&[0.3, 0.7], &p.probs()[..2]).unwrap();
        assert!((sorted - D_07_03_VS_05_03).abs() < 1e-14);
        assert!(sorted <= binwise);
    }
}
