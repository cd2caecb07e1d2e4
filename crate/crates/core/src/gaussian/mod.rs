//! Standard-normal functions and the reliability integrals of the
//! four-Gaussian score model.
//!
//! Scores of negatives (true and predicted) are `N(0, 1)`; scores of
//! positives are `N(mu_q, 1)` for labels and `N(mu_qp, 1)` for model
//! predictions. A training sample made of one positive and `K` negatives is
//! *reliable* when the positive outscores every negative, which happens with
//! probability
//!
//! ```text
//! P(mu, K) = ∫ N(x; mu, 1) · Φ(x)^K dx
//! ```
//!
//! For `K = 1` this is the pairwise AUC, `Φ(mu / √2)`.

mod quadrature;

pub use quadrature::{
    GaussLegendre, QuadratureSpec, DEFAULT_HALF_WIDTH, DEFAULT_NODES_PER_PANEL, DEFAULT_PANELS,
};

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use libm::erfc;

use crate::error::{ensure_finite, Error, Result};

/// Upper end of the bisection bracket for [`mu_from_auc`].
pub const MU_SEARCH_MAX: f64 = 12.0;
/// Bisection stops once the bracket is narrower than this.
pub const MU_TOLERANCE: f64 = 1e-8;
/// AUCs at or above `1 - DEGENERATE_AUC_GAP` cannot be inverted.
pub const DEGENERATE_AUC_GAP: f64 = 1e-9;
/// Margin applied when clamping noisy AUCs into `[0.5 + m, 1 - m]`.
pub const AUC_CLAMP_MARGIN: f64 = 1e-6;

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Mean latent scores of the positive distributions. Negatives have mean 0
/// and every distribution has unit standard deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreModel {
    mu_q: f64,
    mu_qp: f64,
}

impl ScoreModel {
    pub fn new(mu_q: f64, mu_qp: f64) -> Result<Self> {
        Ok(Self {
            mu_q: ensure_mean("mu_q", mu_q)?,
            mu_qp: ensure_mean("mu_qp", mu_qp)?,
        })
    }

    /// Mean of the true-positive score distribution `q(x)`.
    pub fn mu_q(&self) -> f64 {
        self.mu_q
    }

    /// Mean of the predicted-positive score distribution `q'(x)`.
    pub fn mu_qp(&self) -> f64 {
        self.mu_qp
    }
}

pub(crate) fn ensure_mean(name: &'static str, mu: f64) -> Result<f64> {
    ensure_finite(name, mu)?;
    if mu < 0.0 {
        return Err(Error::out_of_range(name, mu, "mean must be >= 0"));
    }
    Ok(mu)
}

pub fn std_normal_pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// `Φ(x)`; errors on non-finite input.
pub fn std_normal_cdf(x: f64) -> Result<f64> {
    ensure_finite("x", x)?;
    Ok(phi(x))
}

pub(crate) fn phi(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// `ln Φ(x)`, accurate in both tails.
pub(crate) fn ln_phi(x: f64) -> f64 {
    if x < 0.0 {
        phi(x).ln()
    } else {
        (-0.5 * erfc(x * FRAC_1_SQRT_2)).ln_1p()
    }
}

/// Quadrature of `N(x; mu, 1) · Φ(x)^K` with the node data precomputed, so
/// that many values of `K` can be evaluated for one mean.
#[derive(Debug, Clone)]
pub struct ReliabilityIntegrand {
    mu: f64,
    // (weight · density, ln Φ) per node
    terms: Vec<(f64, f64)>,
}

impl ReliabilityIntegrand {
    pub fn new(mu: f64, quad: &QuadratureSpec) -> Result<Self> {
        ensure_finite("mu", mu)?;
        let terms = quad
            .nodes()
            .into_iter()
            .map(|(x, w)| (w * std_normal_pdf(x - mu), ln_phi(x)))
            .filter(|&(wd, _)| wd != 0.0)
            .collect();
        Ok(Self { mu, terms })
    }

    /// Default quadrature window for this mean.
    pub fn with_default_quadrature(mu: f64) -> Result<Self> {
        Self::new(mu, &QuadratureSpec::covering(mu)?)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Probability that a positive drawn from `N(mu, 1)` beats `k`
    /// independent `N(0, 1)` negatives.
    pub fn probability(&self, k: u32) -> Result<f64> {
        if k == 0 {
            return Err(Error::out_of_range(
                "K",
                0.0,
                "negative sampling ratio must be >= 1",
            ));
        }
        let kf = f64::from(k);
        Ok(self
            .terms
            .iter()
            .map(|&(wd, lp)| wd * (kf * lp).exp())
            .sum())
    }
}

/// `P(mu, K) = ∫ N(x; mu, 1) Φ(x)^K dx`, the probability that the positive
/// outscores all `k` negatives.
pub fn reliability_probability(mu: f64, k: u32, quad: &QuadratureSpec) -> Result<f64> {
    ReliabilityIntegrand::new(mu, quad)?.probability(k)
}

/// Pairwise (`K = 1`) AUC implied by a positive mean `mu`.
pub fn auc_from_mu(mu: f64) -> Result<f64> {
    let mu = ensure_mean("mu", mu)?;
    ReliabilityIntegrand::with_default_quadrature(mu)?.probability(1)
}

/// Closed form of [`auc_from_mu`]: `Φ(mu / √2)`.
pub fn auc_from_mu_closed_form(mu: f64) -> Result<f64> {
    let mu = ensure_mean("mu", mu)?;
    Ok(phi(mu / SQRT_2))
}

/// Maps an AUC into `[0.5 + 1e-6, 1 - 1e-6]`.
pub fn clamp_auc(auc: f64) -> f64 {
    auc.clamp(0.5 + AUC_CLAMP_MARGIN, 1.0 - AUC_CLAMP_MARGIN)
}

/// Inverts the pairwise AUC relation by bisection on `[0, 12]`.
///
/// With `clamp` set, the AUC is first forced into `[0.5 + 1e-6, 1 - 1e-6]`,
/// which is what ingested validation logs need when they report exactly 0.5
/// or 1.0.
pub fn mu_from_auc(auc: f64, clamp: bool) -> Result<f64> {
    ensure_finite("auc", auc)?;
    if !(0.0..=1.0).contains(&auc) {
        return Err(Error::out_of_range(
            "auc",
            auc,
            "expected a probability in [0, 1]",
        ));
    }
    let auc = if clamp { clamp_auc(auc) } else { auc };
    if auc <= 0.5 {
        return Err(Error::NonDiscriminative(auc));
    }
    if auc >= 1.0 - DEGENERATE_AUC_GAP || auc > phi(MU_SEARCH_MAX / SQRT_2) {
        return Err(Error::DegenerateAuc(auc));
    }
    bisect(0.0, MU_SEARCH_MAX, MU_TOLERANCE, |mu| {
        Ok(phi(mu / SQRT_2) - auc)
    })
}

/// Root of an increasing function on `[lo, hi]` with `f(lo) <= 0 <= f(hi)`.
fn bisect(mut lo: f64, mut hi: f64, tolerance: f64, f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    while hi - lo > tolerance {
        let mid = 0.5 * (lo + hi);
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn quad(mu: f64) -> QuadratureSpec {
        QuadratureSpec::covering(mu).unwrap()
    }

    #[test]
    fn cdf_basics() {
        assert_eq!(std_normal_cdf(0.0).unwrap(), 0.5);
        assert_abs_diff_eq!(std_normal_cdf(10.0).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            std_normal_cdf(std::f64::consts::FRAC_1_SQRT_2).unwrap(),
            0.76025,
            epsilon = 1e-4
        );
        assert!(std_normal_cdf(f64::NAN).is_err());
        assert!(std_normal_cdf(f64::INFINITY).is_err());
    }

    #[test]
    fn ln_phi_matches_log_of_phi_in_the_body() {
        for x in [-5.0, -1.0, 0.0, 0.3, 2.0, 6.0] {
            assert_abs_diff_eq!(ln_phi(x), phi(x).ln(), epsilon = 1e-14);
        }
        // far upper tail where ln(phi) loses everything
        assert!(ln_phi(9.0) < 0.0);
        assert_abs_diff_eq!(
            ln_phi(9.0),
            -0.5 * erfc(9.0 * FRAC_1_SQRT_2),
            epsilon = 1e-30
        );
    }

    #[test]
    fn reliability_examples() {
        let p = reliability_probability(0.0, 3, &quad(0.0)).unwrap();
        assert_abs_diff_eq!(p, 0.25, epsilon = 1e-9);
        let p = reliability_probability(1.0, 1, &quad(1.0)).unwrap();
        assert_abs_diff_eq!(p, 0.76025, epsilon = 1e-5);
        assert_abs_diff_eq!(p, phi(1.0 / SQRT_2), epsilon = 1e-12);
    }

    #[test]
    fn zero_k_is_rejected() {
        assert!(reliability_probability(1.0, 0, &quad(1.0)).is_err());
        assert!(reliability_probability(f64::NAN, 1, &quad(1.0)).is_err());
    }

    #[test]
    fn auc_examples() {
        assert_abs_diff_eq!(auc_from_mu(0.0).unwrap(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(auc_from_mu(0.95387).unwrap(), 0.75, epsilon = 1e-4);
        assert_abs_diff_eq!(auc_from_mu(2.32617).unwrap(), 0.95, epsilon = 1e-4);
        assert!(auc_from_mu(-0.1).is_err());
    }

    #[test]
    fn inversion_examples() {
        assert_abs_diff_eq!(mu_from_auc(0.5 + 1e-7, false).unwrap(), 0.0, epsilon = 1e-3);
        assert_abs_diff_eq!(mu_from_auc(0.75, false).unwrap(), 0.9539, epsilon = 1e-3);
        assert_abs_diff_eq!(mu_from_auc(0.99927, false).unwrap(), 4.50, epsilon = 0.05);
    }

    #[test]
    fn inversion_errors() {
        assert_eq!(mu_from_auc(0.5, false), Err(Error::NonDiscriminative(0.5)));
        assert!(matches!(
            mu_from_auc(0.4, false),
            Err(Error::NonDiscriminative(_))
        ));
        assert!(matches!(
            mu_from_auc(1.0, false),
            Err(Error::DegenerateAuc(_))
        ));
        assert!(matches!(
            mu_from_auc(1.0 - 1e-10, false),
            Err(Error::DegenerateAuc(_))
        ));
        assert!(mu_from_auc(1.5, true).is_err());
        assert!(mu_from_auc(f64::NAN, true).is_err());
    }

    #[test]
    fn clamping_admits_boundary_aucs() {
        let lo = mu_from_auc(0.5, true).unwrap();
        assert!(lo > 0.0 && lo < 1e-4);
        let hi = mu_from_auc(1.0, true).unwrap();
        assert_abs_diff_eq!(
            auc_from_mu(hi).unwrap(),
            1.0 - AUC_CLAMP_MARGIN,
            epsilon = 1e-9
        );
    }

    #[test]
    fn score_model_rejects_negative_means() {
        assert!(ScoreModel::new(-0.1, 0.0).is_err());
        assert!(ScoreModel::new(0.0, -1.0).is_err());
        assert!(ScoreModel::new(1.0, f64::NAN).is_err());
        let m = ScoreModel::new(1.0, 0.5).unwrap();
        assert_eq!((m.mu_q(), m.mu_qp()), (1.0, 0.5));
    }
}
