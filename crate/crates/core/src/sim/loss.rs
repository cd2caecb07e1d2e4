//! InfoNCE loss over one positive and `K` negative scores.

use crate::error::{ensure_finite, Error, Result};

fn check(positive: f64, negatives: &[f64]) -> Result<()> {
    if negatives.is_empty() {
        return Err(Error::InsufficientData(
            "InfoNCE needs at least one negative score".into(),
        ));
    }
    ensure_finite("positive score", positive)?;
    for &n in negatives {
        ensure_finite("negative score", n)?;
    }
    Ok(())
}

/// `-ln softmax(positive)` over the `K + 1` scores, computed via a shifted
/// log-sum-exp.
pub fn infonce_loss(positive: f64, negatives: &[f64]) -> Result<f64> {
    check(positive, negatives)?;
    let max = negatives.iter().copied().fold(positive, f64::max);
    let sum: f64 = (positive - max).exp() + negatives.iter().map(|&n| (n - max).exp()).sum::<f64>();
    Ok((max + sum.ln() - positive).max(0.0))
}

/// Loss and its gradient with respect to every score. The gradient has the
/// positive first, then the negatives in order: `softmax - onehot(0)`.
pub fn infonce_loss_and_gradient(positive: f64, negatives: &[f64]) -> Result<(f64, Vec<f64>)> {
    check(positive, negatives)?;
    let max = negatives.iter().copied().fold(positive, f64::max);
    let mut grad = Vec::with_capacity(negatives.len() + 1);
    grad.push((positive - max).exp());
    grad.extend(negatives.iter().map(|&n| (n - max).exp()));
    let sum: f64 = grad.iter().sum();
    for g in &mut grad {
        *g /= sum;
    }
    grad[0] -= 1.0;
    let loss = (max + sum.ln() - positive).max(0.0);
    Ok((loss, grad))
}

/// `ln(K + 1) - loss`. Not clamped: a loss above `ln(K + 1)` yields a
/// negative (vacuous) bound.
pub fn mi_lower_bound(loss: f64, k: usize) -> f64 {
    ((k + 1) as f64).ln() - loss
}
