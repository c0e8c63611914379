use hpa_sim_core::stats::wilcoxon_signed_rank;
use hpa_sim_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Average rank of each magnitude, computed by counting rather than sorting.
fn oracle_ranks(mags: &[f64]) -> Vec<f64> {
    mags.iter()
        .map(|&m| {
            let below = mags.iter().filter(|&&x| x < m).count() as f64;
            let equal = mags.iter().filter(|&&x| x == m).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect()
}

/// Returns (w_plus, exact two-sided p) by walking every sign pattern.
fn oracle(pairs: &[(f64, f64)]) -> (f64, f64) {
    let diffs: Vec<f64> = pairs.iter().map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
    let ranks = oracle_ranks(&diffs.iter().map(|d| d.abs()).collect::<Vec<_>>());
    let w_plus: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();
    let n = diffs.len();
    let mut signs = vec![false; n];
    let (mut le, mut ge) = (0usize, 0usize);
    loop {
        let w: f64 = ranks.iter().zip(&signs).filter(|(_, s)| **s).map(|(r, _)| r).sum();
        le += usize::from(w <= w_plus);
        ge += usize::from(w >= w_plus);
        // binary counter over the sign vector
        match signs.iter().position(|s| !s) {
            Some(k) => {
                signs[..k].fill(false);
                signs[k] = true;
            }
            None => break,
        }
    }
    let total = 2f64.powi(n as i32);
    (w_plus, (2.0 * le.min(ge) as f64 / total).min(1.0))
}

fn random_pairs(rng: &mut ChaCha8Rng) -> Vec<(f64, f64)> {
    let n = rng.random_range(1..=10);
    // small integer grid so ties and zero differences are common
    let spread = rng.random_range(2..=12);
    loop {
        let pairs: Vec<(f64, f64)> = (0..n)
            .map(|_| (rng.random_range(0..spread) as f64, rng.random_range(0..spread) as f64))
            .collect();
        if pairs.iter().any(|(x, y)| x != y) {
            return pairs;
        }
    }
}

#[test]
fn exact_p_matches_enumeration_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2014);
    for case in 0..200 {
        let pairs = random_pairs(&mut rng);
        let r = wilcoxon_signed_rank(&pairs).unwrap();
        let (w_plus, p) = oracle(&pairs);
        assert_eq!(r.w_plus, w_plus, "case {case}: {pairs:?}");
        assert_eq!(r.p_exact, Some(p), "case {case}: {pairs:?}");
    }
}

#[test]
fn uniform_sign_six_pairs_reproduce_published_values() {
    for sign in [1.0, -1.0] {
        let pairs: Vec<(f64, f64)> = (1..=6).map(|i| (sign * i as f64, 0.0)).collect();
        let r = wilcoxon_signed_rank(&pairs).unwrap();
        assert!((r.z.abs() - 2.2014).abs() <= 1e-4, "{}", r.z);
        assert!((r.p_normal - 0.0277).abs() <= 1e-4, "{}", r.p_normal);
        assert_eq!(r.p_exact, Some(0.03125));
    }
}

#[test]
fn normal_and_exact_agree_for_larger_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..50 {
        let n = rng.random_range(10..=12);
        let pairs: Vec<(f64, f64)> = (0..n).map(|_| (rng.random_range(-3.0..5.0), 0.0)).collect();
        let r = wilcoxon_signed_rank(&pairs).unwrap();
        let exact = r.p_exact.unwrap();
        assert!((exact - r.p_normal).abs() < 0.05, "exact {exact} normal {}", r.p_normal);
    }
}

#[test]
fn large_samples_skip_the_exact_value() {
    let pairs: Vec<(f64, f64)> = (1..=13).map(|i| (i as f64, 0.0)).collect();
    assert_eq!(wilcoxon_signed_rank(&pairs).unwrap().p_exact, None);
}

#[test]
fn degenerate_inputs() {
    assert!(matches!(wilcoxon_signed_rank::<f64>(&[]), Err(Error::InsufficientData)));
    assert!(wilcoxon_signed_rank(&[(f64::NAN, 0.0)]).is_err());
    let swapped: Vec<(f64, f64)> = [(3.0, 1.0), (2.0, 5.0), (4.0, 0.5)]
        .iter()
        .map(|&(x, y)| (y, x))
        .collect();
    let a = wilcoxon_signed_rank(&[(3.0, 1.0), (2.0, 5.0), (4.0, 0.5)]).unwrap();
    let b = wilcoxon_signed_rank(&swapped).unwrap();
    assert_eq!((a.w_plus, a.w_minus), (b.w_minus, b.w_plus));
    assert_eq!(a.p_normal, b.p_normal);
    assert_eq!(a.p_exact, b.p_exact);
}
