//! Grid search for the negative sampling ratio that maximizes training
//! effectiveness.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::effectiveness::{
    ensure_lambda, sample_breakdown, simulated_training_curve, EffectivenessProfile, TrainingCurve,
    DEFAULT_CURVE_STEPS,
};
use crate::error::{Error, Result};
use crate::gaussian::{ensure_mean, ReliabilityIntegrand};

/// Sweeps replace smaller `mu_q` (including 0, where the optimum diverges)
/// with this floor.
pub const SWEEP_MU_FLOOR: f64 = 0.05;
pub const DEFAULT_GRID_MAX: u32 = 1000;

/// Strictly increasing candidate values of `K`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KGrid(Vec<u32>);

impl KGrid {
    pub fn new(values: Vec<u32>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Config("K grid is empty".into()));
        }
        if values[0] == 0 {
            return Err(Error::Config("K grid values must be >= 1".into()));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("K grid must be strictly increasing".into()));
        }
        Ok(Self(values))
    }

    /// `1..=max` inclusive.
    pub fn range(max: u32) -> Result<Self> {
        Self::new((1..=max).collect())
    }

    pub fn values(&self) -> &[u32] {
        &self.0
    }
}

impl Default for KGrid {
    /// Integers `1..=32`, then `round(32 · 1.15^n)` up to 1000, deduplicated.
    fn default() -> Self {
        let mut values: Vec<u32> = (1..=32).collect();
        for n in 1.. {
            let k = (32.0 * 1.15f64.powi(n)).round() as u32;
            if k > DEFAULT_GRID_MAX {
                break;
            }
            if k > *values.last().unwrap() {
                values.push(k);
            }
        }
        Self(values)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimalKResult {
    pub k_star: u32,
    pub v_star: f64,
    pub profile: EffectivenessProfile,
}

impl OptimalKResult {
    fn from_profile(profile: EffectivenessProfile) -> Result<Self> {
        let (k_star, v_star) = profile
            .argmax()
            .ok_or_else(|| Error::Config("K grid is empty".into()))?;
        Ok(Self {
            k_star,
            v_star,
            profile,
        })
    }
}

/// Time-averaged effectiveness for every `K` in the grid.
///
/// Values are bit-identical to calling
/// [`overall_effectiveness`](crate::effectiveness::overall_effectiveness)
/// once per `K`; grid points are evaluated in parallel.
pub fn effectiveness_profile(
    mu_q: f64,
    curve: &TrainingCurve,
    lambda: f64,
    grid: &KGrid,
) -> Result<EffectivenessProfile> {
    let lambda = ensure_lambda(lambda)?;
    let label = ReliabilityIntegrand::with_default_quadrature(ensure_mean("mu_q", mu_q)?)?;

    let mut stages: Vec<usize> = Vec::with_capacity(curve.len());
    let mut integrands: Vec<ReliabilityIntegrand> = Vec::new();
    let mut seen: HashMap<u64, usize> = HashMap::new();
    for mu_qp in curve.mu_qp_values() {
        let idx = match seen.get(&mu_qp.to_bits()) {
            Some(&i) => i,
            None => {
                integrands.push(ReliabilityIntegrand::with_default_quadrature(mu_qp)?);
                seen.insert(mu_qp.to_bits(), integrands.len() - 1);
                integrands.len() - 1
            }
        };
        stages.push(idx);
    }

    let v_values = grid
        .values()
        .par_iter()
        .map(|&k| {
            let p_a = label.probability(k)?;
            let p_b = integrands
                .iter()
                .map(|i| i.probability(k))
                .collect::<Result<Vec<_>>>()?;
            let mut total = 0.0;
            for &s in &stages {
                total += sample_breakdown(p_a.clamp(0.0, 1.0), p_b[s].clamp(0.0, 1.0))?
                    .effectiveness(lambda);
            }
            Ok(total / stages.len() as f64)
        })
        .collect::<Result<Vec<_>>>()?;
    EffectivenessProfile::new(lambda, grid.values().to_vec(), v_values)
}

/// `K` maximizing time-averaged effectiveness over the grid; ties go to the
/// smaller `K`.
pub fn optimal_k(
    mu_q: f64,
    curve: &TrainingCurve,
    lambda: f64,
    grid: &KGrid,
) -> Result<OptimalKResult> {
    OptimalKResult::from_profile(effectiveness_profile(mu_q, curve, lambda, grid)?)
}

/// `K` maximizing effectiveness at a single training stage.
pub fn stagewise_optimal_k(
    mu_q: f64,
    mu_qp: f64,
    lambda: f64,
    grid: &KGrid,
) -> Result<OptimalKResult> {
    let lambda = ensure_lambda(lambda)?;
    let label = ReliabilityIntegrand::with_default_quadrature(ensure_mean("mu_q", mu_q)?)?;
    let pred = ReliabilityIntegrand::with_default_quadrature(ensure_mean("mu_qp", mu_qp)?)?;
    let v_values = grid
        .values()
        .iter()
        .map(|&k| {
            let b = sample_breakdown(
                label.probability(k)?.clamp(0.0, 1.0),
                pred.probability(k)?.clamp(0.0, 1.0),
            )?;
            Ok(b.effectiveness(lambda))
        })
        .collect::<Result<Vec<_>>>()?;
    OptimalKResult::from_profile(EffectivenessProfile::new(
        lambda,
        grid.values().to_vec(),
        v_values,
    )?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub mu_q: f64,
    pub lambda: f64,
    pub k_star: u32,
    pub v_star: f64,
}

/// Optimal `K` for each `mu_q`, using the curve built by `curve_builder`.
/// Means below [`SWEEP_MU_FLOOR`] are raised to it.
pub fn k_sweep<F>(
    mu_values: &[f64],
    curve_builder: F,
    lambda: f64,
    grid: &KGrid,
) -> Result<Vec<SweepRow>>
where
    F: Fn(f64) -> Result<TrainingCurve> + Sync,
{
    if mu_values.is_empty() {
        return Err(Error::InsufficientData(
            "sweep needs at least one mu_q".into(),
        ));
    }
    mu_values
        .par_iter()
        .map(|&mu| {
            let mu_q = ensure_mean("mu_q", mu)?.max(SWEEP_MU_FLOOR);
            let curve = curve_builder(mu_q)?;
            let best = optimal_k(mu_q, &curve, lambda, grid)?;
            Ok(SweepRow {
                mu_q,
                lambda,
                k_star: best.k_star,
                v_star: best.v_star,
            })
        })
        .collect()
}

/// Curve builder for [`k_sweep`] using the default simulated curve.
pub fn default_simulated_curve(mu_q: f64) -> Result<TrainingCurve> {
    simulated_training_curve(mu_q, DEFAULT_CURVE_STEPS)
}
