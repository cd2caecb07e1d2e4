//! Good/bad/easy sample taxonomy and the training-effectiveness metric.
//!
//! A sample is *good* when its label is reliable but the model's prediction
//! is not, *bad* in the opposite case, and *easy* when both agree. With
//! `P(A)` the label reliability and `P(B)` the prediction reliability
//! (treated as independent), the fractions are
//!
//! ```text
//! good = P(A)(1 - P(B)),  bad = P(B)(1 - P(A)),  easy = 1 - good - bad
//! ```
//!
//! and effectiveness is `v = λ(good - bad) + (1 - λ)·easy`.

use std::collections::HashMap;

use crate::error::{ensure_finite, ensure_probability, Error, Result};
use crate::gaussian::{ensure_mean, mu_from_auc, ReliabilityIntegrand, ScoreModel};

pub const DEFAULT_LAMBDA: f64 = 0.9;
pub const DEFAULT_CURVE_STEPS: usize = 61;
/// The simulated training curve runs over `t ∈ [0, SIMULATED_HORIZON]`.
pub const SIMULATED_HORIZON: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleBreakdown {
    pub good: f64,
    pub bad: f64,
    pub easy: f64,
}

impl SampleBreakdown {
    pub fn effectiveness(&self, lambda: f64) -> f64 {
        lambda * (self.good - self.bad) + (1.0 - lambda) * self.easy
    }
}

pub fn sample_breakdown(p_a: f64, p_b: f64) -> Result<SampleBreakdown> {
    let p_a = ensure_probability("P(A)", p_a)?;
    let p_b = ensure_probability("P(B)", p_b)?;
    let good = p_a * (1.0 - p_b);
    let bad = p_b * (1.0 - p_a);
    Ok(SampleBreakdown {
        good,
        bad,
        easy: 1.0 - good - bad,
    })
}

pub(crate) fn ensure_lambda(lambda: f64) -> Result<f64> {
    ensure_finite("lambda", lambda)?;
    if (0.0..=1.0).contains(&lambda) {
        Ok(lambda)
    } else {
        Err(Error::out_of_range(
            "lambda",
            lambda,
            "expected a weight in [0, 1]",
        ))
    }
}

/// Breakdown of samples with `k` negatives at one training stage.
pub fn stage_breakdown(model: &ScoreModel, k: u32) -> Result<SampleBreakdown> {
    let p_a = ReliabilityIntegrand::with_default_quadrature(model.mu_q())?.probability(k)?;
    let p_b = ReliabilityIntegrand::with_default_quadrature(model.mu_qp())?.probability(k)?;
    sample_breakdown(p_a.clamp(0.0, 1.0), p_b.clamp(0.0, 1.0))
}

/// Effectiveness `v` at one training stage.
pub fn instantaneous_effectiveness(model: &ScoreModel, k: u32, lambda: f64) -> Result<f64> {
    let lambda = ensure_lambda(lambda)?;
    Ok(stage_breakdown(model, k)?.effectiveness(lambda))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveSource {
    Simulated,
    Ingested,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub t: f64,
    pub mu_qp: f64,
}

/// Trajectory of the predicted-positive mean over training progress.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingCurve {
    points: Vec<CurvePoint>,
    source: CurveSource,
}

impl TrainingCurve {
    /// Requires at least two points, strictly increasing `t` and
    /// nonnegative finite means.
    pub fn new(points: Vec<CurvePoint>, source: CurveSource) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InsufficientData(format!(
                "a training curve needs at least 2 samples, got {}",
                points.len()
            )));
        }
        for p in &points {
            ensure_finite("t", p.t)?;
            ensure_mean("mu_qp", p.mu_qp)?;
        }
        if let Some(w) = points.windows(2).find(|w| w[0].t >= w[1].t) {
            return Err(Error::Config(format!(
                "curve progress must be strictly increasing ({} then {})",
                w[0].t, w[1].t
            )));
        }
        Ok(Self { points, source })
    }

    pub fn points(&self) -> &[CurvePoint] {
        &self.points
    }

    pub fn source(&self) -> CurveSource {
        self.source
    }

    pub fn mu_qp_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.mu_qp)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `mu_qp(t) = mu_q (1 - e^{-t})` sampled at `steps` uniform points of
/// `t ∈ [0, 3]`.
pub fn simulated_training_curve(mu_q: f64, steps: usize) -> Result<TrainingCurve> {
    let mu_q = ensure_mean("mu_q", mu_q)?;
    if steps < 2 {
        return Err(Error::InsufficientData(format!(
            "simulated curve needs at least 2 steps, got {steps}"
        )));
    }
    let last = (steps - 1) as f64;
    let points = (0..steps)
        .map(|i| {
            let t = SIMULATED_HORIZON * i as f64 / last;
            CurvePoint {
                t,
                mu_qp: simulated_mu_qp(mu_q, t),
            }
        })
        .collect();
    TrainingCurve::new(points, CurveSource::Simulated)
}

pub fn simulated_mu_qp(mu_q: f64, t: f64) -> f64 {
    -mu_q * (-t).exp_m1()
}

/// Mean of per-stage effectiveness over a training curve.
pub fn overall_effectiveness(mu_q: f64, curve: &TrainingCurve, k: u32, lambda: f64) -> Result<f64> {
    mean_effectiveness(mu_q, curve.mu_qp_values(), k, lambda)
}

/// Mean of per-stage effectiveness over an arbitrary, nonempty sequence of
/// predicted-positive means. A single stage gives that stage's `v`.
pub fn mean_effectiveness(
    mu_q: f64,
    mu_qp_values: impl IntoIterator<Item = f64>,
    k: u32,
    lambda: f64,
) -> Result<f64> {
    let lambda = ensure_lambda(lambda)?;
    let label = ReliabilityIntegrand::with_default_quadrature(ensure_mean("mu_q", mu_q)?)?;
    let p_a = label.probability(k)?;
    let mut cache: HashMap<u64, f64> = HashMap::new();
    let mut total = 0.0;
    let mut count = 0usize;
    for mu_qp in mu_qp_values {
        let mu_qp = ensure_mean("mu_qp", mu_qp)?;
        let p_b = match cache.get(&mu_qp.to_bits()) {
            Some(&p) => p,
            None => {
                let p = ReliabilityIntegrand::with_default_quadrature(mu_qp)?.probability(k)?;
                cache.insert(mu_qp.to_bits(), p);
                p
            }
        };
        total += sample_breakdown(p_a.clamp(0.0, 1.0), p_b.clamp(0.0, 1.0))?.effectiveness(lambda);
        count += 1;
    }
    if count == 0 {
        return Err(Error::InsufficientData(
            "no training stages to average".into(),
        ));
    }
    Ok(total / count as f64)
}

/// One row of a `step,validation_auc` log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AucRecord {
    pub step: f64,
    pub auc: f64,
}

/// Parses a comma-separated AUC log with a one-line header. Blank lines are
/// skipped; line numbers in errors are 1-based and count the header.
pub fn parse_auc_log(text: &str) -> Result<Vec<AucRecord>> {
    let mut lines = text.lines().enumerate();
    if lines.next().is_none() {
        return Err(Error::InsufficientData("empty AUC log".into()));
    }
    let mut records = Vec::new();
    for (idx, raw) in lines {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let parse_err = |message: String| Error::Parse {
            line: lineno,
            message,
        };
        let mut fields = line.split(',').map(str::trim);
        let (Some(step), Some(auc), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(parse_err(format!(
                "expected two fields \"step,validation_auc\", got {line:?}"
            )));
        };
        let step: f64 = step
            .parse()
            .map_err(|_| parse_err(format!("invalid step {step:?}")))?;
        let auc: f64 = auc
            .parse()
            .map_err(|_| parse_err(format!("invalid AUC {auc:?}")))?;
        if !step.is_finite() || !auc.is_finite() {
            return Err(parse_err("non-finite value".into()));
        }
        records.push(AucRecord { step, auc });
    }
    Ok(records)
}

/// Converts a validation-AUC log into a training curve. Each AUC is inverted
/// with clamping enabled and progress is the step's fraction of the logged
/// span.
pub fn curve_from_auc_log(records: &[AucRecord]) -> Result<TrainingCurve> {
    if records.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "an AUC log needs at least 2 records, got {}",
            records.len()
        )));
    }
    if let Some(w) = records.windows(2).find(|w| w[0].step >= w[1].step) {
        return Err(Error::Config(format!(
            "AUC log steps must be strictly increasing ({} then {})",
            w[0].step, w[1].step
        )));
    }
    let first = records[0].step;
    let span = records[records.len() - 1].step - first;
    let points = records
        .iter()
        .map(|r| {
            Ok(CurvePoint {
                t: (r.step - first) / span,
                mu_qp: mu_from_auc(r.auc, true)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    TrainingCurve::new(points, CurveSource::Ingested)
}

/// Effectiveness values over a list of `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectivenessProfile {
    pub lambda: f64,
    pub k_values: Vec<u32>,
    pub v_values: Vec<f64>,
}

/// Values closer than this are treated as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

impl EffectivenessProfile {
    pub fn new(lambda: f64, k_values: Vec<u32>, v_values: Vec<f64>) -> Result<Self> {
        if k_values.len() != v_values.len() {
            return Err(Error::Config(format!(
                "profile has {} K values but {} v values",
                k_values.len(),
                v_values.len()
            )));
        }
        if k_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(
                "profile K values must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            lambda,
            k_values,
            v_values,
        })
    }

    /// Largest `v` and its `K`; a later value only wins if it beats the
    /// current best by more than [`TIE_TOLERANCE`], so ties go to the smaller `K`.
    pub fn argmax(&self) -> Option<(u32, f64)> {
        let mut best: Option<(u32, f64)> = None;
        for (&k, &v) in self.k_values.iter().zip(&self.v_values) {
            match best {
                Some((_, bv)) if v <= bv + TIE_TOLERANCE => {}
                _ => best = Some((k, v)),
            }
        }
        best
    }

    pub fn len(&self) -> usize {
        self.k_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k_values.is_empty()
    }
}
