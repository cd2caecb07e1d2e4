//! Composite Gauss–Legendre quadrature on a finite interval.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{ensure_finite, Error, Result};

pub const DEFAULT_PANELS: usize = 40;
pub const DEFAULT_NODES_PER_PANEL: usize = 64;
/// Distance, in standard deviations, that the default integration window
/// extends below the negative mean (0) and above the positive mean.
pub const DEFAULT_HALF_WIDTH: f64 = 10.0;

/// Discretization of a one-dimensional integral: `panels` equal-width
/// sub-intervals of `[lower, upper]`, each integrated with an
/// `nodes_per_panel`-point Gauss–Legendre rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    lower: f64,
    upper: f64,
    panels: usize,
    nodes_per_panel: usize,
}

impl QuadratureSpec {
    pub fn new(lower: f64, upper: f64, panels: usize, nodes_per_panel: usize) -> Result<Self> {
        ensure_finite("lower", lower)?;
        ensure_finite("upper", upper)?;
        if lower >= upper {
            return Err(Error::Config(format!(
                "quadrature bounds must satisfy lower < upper, got [{lower}, {upper}]"
            )));
        }
        if panels == 0 {
            return Err(Error::Config("quadrature needs at least one panel".into()));
        }
        if nodes_per_panel < 2 {
            return Err(Error::Config(
                "quadrature needs at least two nodes per panel".into(),
            ));
        }
        Ok(Self {
            lower,
            upper,
            panels,
            nodes_per_panel,
        })
    }

    /// Default window `[-10, mu + 10]` with 40 panels of 64 nodes.
    ///
    /// The window covers both the negative score density (mean 0) and the
    /// positive one (mean `mu`) out to ten standard deviations.
    pub fn covering(mu: f64) -> Result<Self> {
        ensure_finite("mu", mu)?;
        let lower = (-DEFAULT_HALF_WIDTH).min(mu - DEFAULT_HALF_WIDTH);
        let upper = mu.max(0.0) + DEFAULT_HALF_WIDTH;
        Self::new(lower, upper, DEFAULT_PANELS, DEFAULT_NODES_PER_PANEL)
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn panels(&self) -> usize {
        self.panels
    }

    pub fn nodes_per_panel(&self) -> usize {
        self.nodes_per_panel
    }

    /// Absolute abscissae and weights of the full composite rule, in
    /// ascending order of abscissa.
    pub fn nodes(&self) -> Vec<(f64, f64)> {
        let owned;
        let rule = if self.nodes_per_panel == DEFAULT_NODES_PER_PANEL {
            default_rule()
        } else {
            owned = GaussLegendre::new(self.nodes_per_panel);
            &owned
        };
        let width = (self.upper - self.lower) / self.panels as f64;
        let half = 0.5 * width;
        let mut out = Vec::with_capacity(self.panels * self.nodes_per_panel);
        for panel in 0..self.panels {
            let mid = self.lower + (panel as f64 + 0.5) * width;
            for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
                out.push((mid + half * x, half * w));
            }
        }
        out
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes().into_iter().map(|(x, w)| w * f(x)).sum()
    }
}

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the `n`-point rule by Newton iteration on the Legendre
    /// three-term recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi's initial guess for the i-th largest root.
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut deriv = 0.0;
            for _ in 0..100 {
                let (p, dp) = legendre_with_derivative(n, x);
                deriv = dp;
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(n, x);
            if dp.is_finite() {
                deriv = dp;
            }
            let w = 2.0 / ((1.0 - x * x) * deriv * deriv);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for j in 2..=n {
        let jf = j as f64;
        let next = ((2.0 * jf - 1.0) * x * p - (jf - 1.0) * p_prev) / jf;
        p_prev = p;
        p = next;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

fn default_rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(DEFAULT_NODES_PER_PANEL))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn weights_sum_to_interval_length() {
        for n in [2, 3, 7, 16, 64] {
            let rule = GaussLegendre::new(n);
            let total: f64 = rule.weights.iter().sum();
            assert_abs_diff_eq!(total, 2.0, epsilon = 1e-13);
            assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        let rule = GaussLegendre::new(5);
        for deg in 0..10u32 {
            let approx: f64 = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(x, w)| w * x.powi(deg as i32))
                .sum();
            let exact = if deg % 2 == 1 {
                0.0
            } else {
                2.0 / (deg as f64 + 1.0)
            };
            assert_abs_diff_eq!(approx, exact, epsilon = 1e-14);
        }
    }

    #[test]
    fn composite_rule_integrates_gaussian_density() {
        let quad = QuadratureSpec::covering(0.0).unwrap();
        let total = quad.integrate(|x| (-0.5 * x * x).exp() / (2.0 * PI).sqrt());
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(QuadratureSpec::new(1.0, 1.0, 4, 8).is_err());
        assert!(QuadratureSpec::new(0.0, 1.0, 0, 8).is_err());
        assert!(QuadratureSpec::new(0.0, 1.0, 4, 1).is_err());
        assert!(QuadratureSpec::new(f64::NAN, 1.0, 4, 8).is_err());
    }

    #[test]
    fn default_window_spans_both_means() {
        let q = QuadratureSpec::covering(4.5).unwrap();
        assert_eq!(q.lower(), -10.0);
        assert_eq!(q.upper(), 14.5);
        assert_eq!(q.panels(), 40);
        assert_eq!(q.nodes_per_panel(), 64);
        assert_eq!(q.nodes().len(), 40 * 64);
    }
}
