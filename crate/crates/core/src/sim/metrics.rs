//! Rank-based AUC.

/// Mann–Whitney estimate of `P(positive > negative)` with ties counted as
/// one half. Returns 0.5 when either side is empty.
pub fn mann_whitney_auc(positive: &[f64], negative: &[f64]) -> f64 {
    let (n_pos, n_neg) = (positive.len(), negative.len());
    if n_pos == 0 || n_neg == 0 {
        return 0.5;
    }
    let mut all: Vec<(f64, bool)> = positive
        .iter()
        .map(|&s| (s, true))
        .chain(negative.iter().map(|&s| (s, false)))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));

    // Sum of (1-based, tie-averaged) ranks of the positives.
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < all.len() {
        let mut j = i + 1;
        while j < all.len() && all[j].0 == all[i].0 {
            j += 1;
        }
        let avg_rank = (i + 1 + j) as f64 / 2.0;
        let pos_in_group = all[i..j].iter().filter(|e| e.1).count();
        rank_sum += avg_rank * pos_in_group as f64;
        i = j;
    }
    let n_pos_f = n_pos as f64;
    let u = rank_sum - n_pos_f * (n_pos_f + 1.0) / 2.0;
    u / (n_pos_f * n_neg as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(pos: &[f64], neg: &[f64]) -> f64 {
        let mut s = 0.0;
        for &p in pos {
            for &n in neg {
                s += if p > n {
                    1.0
                } else if p == n {
                    0.5
                } else {
                    0.0
                };
            }
        }
        s / (pos.len() * neg.len()) as f64
    }

    #[test]
    fn perfect_and_reversed() {
        assert_eq!(mann_whitney_auc(&[3.0, 4.0], &[1.0, 2.0]), 1.0);
        assert_eq!(mann_whitney_auc(&[1.0, 2.0], &[3.0, 4.0]), 0.0);
        assert_eq!(mann_whitney_auc(&[1.0], &[1.0]), 0.5);
        assert_eq!(mann_whitney_auc(&[], &[1.0]), 0.5);
    }

    #[test]
    fn matches_pairwise_count_with_ties() {
        let pos = [0.1, 0.5, 0.5, 0.9, 2.0, -1.0];
        let neg = [0.5, 0.0, 0.9, -3.0, 0.5];
        assert!((mann_whitney_auc(&pos, &neg) - brute(&pos, &neg)).abs() < 1e-15);
    }
}
