//! Wilcoxon signed-rank test for paired samples.
//!
//! Zero differences are dropped, tied magnitudes share their average rank,
//! and the normal approximation is used without continuity or tie
//! correction. For up to [`EXACT_MAX_N`] non-zero differences the exact
//! two-sided p-value is also computed by enumerating every sign assignment.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const EXACT_MAX_N: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult<T> {
    /// Number of non-zero differences.
    pub n_effective: usize,
    pub w_plus: T,
    pub w_minus: T,
    pub z: T,
    /// Two-sided p-value from the normal approximation.
    pub p_normal: T,
    /// Two-sided exact p-value, when `n_effective <= EXACT_MAX_N`.
    pub p_exact: Option<T>,
}

/// Average ranks of `values` (1-based), doubled so ties stay integral.
fn doubled_ranks<T: Scalar>(values: &[T]) -> Vec<u64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite values"));
    let mut ranks = vec![0u64; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // positions i..=j share the rank ((i+1) + (j+1)) / 2
        for &k in &order[i..=j] {
            ranks[k] = (i + j + 2) as u64;
        }
        i = j + 1;
    }
    ranks
}

/// Two-sided exact p-value of the observed doubled positive rank sum.
fn exact_p(ranks2: &[u64], observed2: u64) -> f64 {
    let n = ranks2.len();
    let (mut le, mut ge) = (0u64, 0u64);
    for mask in 0u32..(1 << n) {
        let w2: u64 = ranks2
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, r)| r)
            .sum();
        if w2 <= observed2 {
            le += 1;
        }
        if w2 >= observed2 {
            ge += 1;
        }
    }
    let total = (1u64 << n) as f64;
    (2.0 * le.min(ge) as f64 / total).min(1.0)
}

/// Signed-rank test on `(x, y)` pairs; differences are `x - y`.
pub fn wilcoxon_signed_rank<T: Scalar>(pairs: &[(T, T)]) -> Result<WilcoxonResult<T>> {
    if pairs.iter().any(|(x, y)| !(x.is_finite() && y.is_finite())) {
        return Err(Error::InvalidInput("non-finite sample in signed-rank test".into()));
    }
    let diffs: Vec<T> = pairs.iter().map(|&(x, y)| x - y).filter(|d| *d != T::zero()).collect();
    let n = diffs.len();
    if n == 0 {
        return Err(Error::InsufficientData);
    }
    let magnitudes: Vec<T> = diffs.iter().map(|d| d.abs()).collect();
    let ranks2 = doubled_ranks(&magnitudes);
    let plus2: u64 = diffs
        .iter()
        .zip(&ranks2)
        .filter(|(d, _)| **d > T::zero())
        .map(|(_, r)| r)
        .sum();
    let total2 = (n * (n + 1)) as u64;
    let w_plus = plus2 as f64 / 2.0;
    let w_minus = (total2 - plus2) as f64 / 2.0;

    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let sd = (nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0).sqrt();
    let z = (w_plus - mean) / sd;
    let p_normal = erfc(z.abs() / std::f64::consts::SQRT_2).min(1.0);
    let p_exact = (n <= EXACT_MAX_N).then(|| exact_p(&ranks2, plus2));

    Ok(WilcoxonResult {
        n_effective: n,
        w_plus: T::lit(w_plus),
        w_minus: T::lit(w_minus),
        z: T::lit(z),
        p_normal: T::lit(p_normal),
        p_exact: p_exact.map(T::lit),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_positive_differences() {
        let pairs: Vec<(f64, f64)> = (1..=6).map(|i| (i as f64 * 3.0, 1.0)).collect();
        let r = wilcoxon_signed_rank(&pairs).unwrap();
        assert_eq!(r.n_effective, 6);
        assert_eq!((r.w_plus, r.w_minus), (21.0, 0.0));
        assert!((r.z - 2.2014).abs() < 1e-4, "{}", r.z);
        assert!((r.p_normal - 0.0277).abs() < 1e-4, "{}", r.p_normal);
        assert_eq!(r.p_exact, Some(2.0 / 64.0));
    }

    #[test]
    fn three_pairs_mixed_signs() {
        let pairs = [(1.0, 0.0), (0.0, 2.0), (3.0, 0.0)];
        let r = wilcoxon_signed_rank(&pairs).unwrap();
        assert_eq!(r.w_plus, 4.0);
        assert_eq!(r.w_minus, 2.0);
        assert_eq!(r.p_exact, Some(0.75));
    }

    #[test]
    fn all_zero_differences() {
        assert!(matches!(
            wilcoxon_signed_rank(&[(5.0, 5.0), (3.0, 3.0)]),
            Err(Error::InsufficientData)
        ));
    }

    #[test]
    fn zeros_dropped_and_ties_averaged() {
        let pairs = [(2.0, 1.0), (1.0, 2.0), (4.0, 4.0), (3.0, 1.0)];
        let r = wilcoxon_signed_rank(&pairs).unwrap();
        assert_eq!(r.n_effective, 3);
        // |d| = 1, 1, 2 -> ranks 1.5, 1.5, 3
        assert_eq!(r.w_plus, 4.5);
        assert_eq!(r.w_minus, 1.5);
    }

    #[test]
    fn no_exact_p_above_limit() {
        let pairs: Vec<(f64, f64)> = (0..13).map(|i| (i as f64 + 1.0, 0.0)).collect();
        assert!(wilcoxon_signed_rank(&pairs).unwrap().p_exact.is_none());
    }

    #[test]
    fn doubled_ranks_with_ties() {
        assert_eq!(doubled_ranks(&[3.0, 1.0, 3.0, 2.0]), vec![7, 2, 7, 4]);
    }
}
