use infonce_k::schedule::{sample_negative_count, FractionalK, NegativeSampler};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// 99th percentile of chi-square with one degree of freedom.
const CHI2_1DF_99: f64 = 6.634_896_601_021_214;

fn chi_square_two_bins(k: f64, draws: usize, seed: u64) -> (f64, f64) {
    let k = FractionalK::new(k).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = k.integral_part();
    let mut upper = 0usize;
    let mut total = 0usize;
    for _ in 0..draws {
        let n = sample_negative_count(k, &mut rng);
        assert!(n == base || n == base + 1);
        total += n;
        upper += (n == base + 1) as usize;
    }
    let frac = k.fractional_part();
    let expected = [draws as f64 * (1.0 - frac), draws as f64 * frac];
    let observed = [(draws - upper) as f64, upper as f64];
    let chi2 = observed
        .iter()
        .zip(&expected)
        .filter(|(_, e)| **e > 0.0)
        .map(|(o, e)| (o - e).powi(2) / e)
        .sum();
    (total as f64 / draws as f64, chi2)
}

#[test]
fn fractional_sampler_is_unbiased_at_2_3() {
    let draws = 100_000;
    let (mean, chi2) = chi_square_two_bins(2.3, draws, 2024);
    let tol = 3.0 * (0.21f64 / draws as f64).sqrt();
    assert!((mean - 2.3).abs() <= tol, "mean {mean}");
    assert!(chi2 < CHI2_1DF_99, "chi2 {chi2}");
}

#[test]
fn sampler_unbiased_across_k() {
    for (i, k) in [1.0, 1.5, 3.75, 19.99, 180.2].into_iter().enumerate() {
        let (mean, chi2) = chi_square_two_bins(k, 100_000, i as u64);
        let f = k - k.floor();
        let tol = 3.0 * (f * (1.0 - f) / 100_000.0).sqrt() + 1e-12;
        assert!((mean - k).abs() <= tol, "K={k}: mean {mean}");
        assert!(chi2 < CHI2_1DF_99, "K={k}: chi2 {chi2}");
    }
}

#[test]
fn sampler_is_reproducible() {
    let k = FractionalK::new(7.4).unwrap();
    let run = |seed| {
        let mut s = NegativeSampler::new(seed);
        (0..1000).map(|_| s.sample(k)).collect::<Vec<_>>()
    };
    assert_eq!(run(3), run(3));
    assert_ne!(run(3), run(4));
}
