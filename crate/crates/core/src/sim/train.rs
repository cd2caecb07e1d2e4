//! SGD training of a linear scorer under InfoNCE with fixed or adaptive
//! negative sampling.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::data::{dot, random_unit_vector, World};
use super::loss::{infonce_loss_and_gradient, mi_lower_bound};
use super::metrics::mann_whitney_auc;
use crate::error::{ensure_finite, Error, Result};
use crate::schedule::{sample_negative_count, AnsSchedule, FractionalK};

// Independent random streams derived from one seed.
const STREAM_INIT: u64 = 1;
const STREAM_TRAIN: u64 = 2;
const STREAM_COUNTS: u64 = 3;
const STREAM_EVAL: u64 = 4;
const STREAM_TRAIN_EVAL: u64 = 5;

pub const DEFAULT_BATCH_SIZE: usize = 32;

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NegativeStrategy {
    Fixed(FractionalK),
    Ans(AnsSchedule),
}

impl NegativeStrategy {
    pub fn fixed(k: f64) -> Result<Self> {
        Ok(NegativeStrategy::Fixed(FractionalK::new(k)?))
    }

    /// Real-valued `K` at `step` of a `total`-step run. Schedules whose own
    /// length differs from the run are rescaled proportionally.
    pub fn k_at(&self, step: usize, total: usize) -> Result<FractionalK> {
        match self {
            NegativeStrategy::Fixed(k) => Ok(*k),
            NegativeStrategy::Ans(schedule) => {
                let s = if total == schedule.total_steps() {
                    step
                } else {
                    ((step as u128 * schedule.total_steps() as u128) / total.max(1) as u128)
                        as usize
                };
                schedule.k_at_step(s.min(schedule.total_steps()))
            }
        }
    }
}

impl fmt::Display for NegativeStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NegativeStrategy::Fixed(k) => write!(f, "fixed:{}", k.value()),
            NegativeStrategy::Ans(s) => write!(
                f,
                "ans:{}:{}:{}",
                s.k_peak(),
                s.turning_fraction(),
                s.shape()
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub mu_q: f64,
    pub feature_dim: usize,
    pub noise_std: f64,
    pub train_instances: usize,
    pub eval_pairs: usize,
    pub negative_strategy: NegativeStrategy,
    pub learning_rate: f64,
    /// Instances averaged into each SGD step.
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            mu_q: 1.0,
            feature_dim: 16,
            noise_std: 1.0,
            train_instances: 20_000,
            eval_pairs: 100_000,
            negative_strategy: NegativeStrategy::Fixed(FractionalK::new(4.0).unwrap()),
            learning_rate: 0.05,
            batch_size: DEFAULT_BATCH_SIZE,
            epochs: 1,
            seed: 42,
        }
    }
}

impl SimConfig {
    pub fn steps_per_epoch(&self) -> usize {
        self.train_instances.div_ceil(self.batch_size.max(1))
    }

    /// Number of SGD updates over the whole run.
    pub fn total_steps(&self) -> usize {
        self.steps_per_epoch() * self.epochs
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: usize| {
            if v == 0 {
                Err(Error::Config(format!("{name} must be positive")))
            } else {
                Ok(())
            }
        };
        positive("feature_dim", self.feature_dim)?;
        positive("train_instances", self.train_instances)?;
        positive("eval_pairs", self.eval_pairs)?;
        positive("epochs", self.epochs)?;
        positive("batch_size", self.batch_size)?;
        ensure_finite("learning_rate", self.learning_rate)?;
        if self.learning_rate <= 0.0 {
            return Err(Error::Config("learning_rate must be positive".into()));
        }
        // Dimension, mean and noise checks live with the world model.
        World::new(self.mu_q, self.feature_dim, self.noise_std, self.seed)?;
        Ok(())
    }

    fn summary(&self) -> String {
        format!(
            "mu_q={} dim={} noise_std={} lr={} batch={} strategy={} seed={}",
            self.mu_q,
            self.feature_dim,
            self.noise_std,
            self.learning_rate,
            self.batch_size,
            self.negative_strategy,
            self.seed
        )
    }
}

/// Per-step record; losses and bounds are means over the step's batch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub step: usize,
    pub k_real: f64,
    /// Mean sampled negative count in the batch.
    pub k_sampled: f64,
    pub loss: f64,
    /// Mean of `ln(K_i + 1) - loss_i`.
    pub mi_bound: f64,
    /// Mean of `ln(K_i + 1)`, the largest value `mi_bound` can take.
    pub mi_ceiling: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub final_train_auc: f64,
    pub final_val_auc: f64,
    /// Cosine between the learned weights and the true direction.
    pub recovered_alignment: f64,
    pub weights: Vec<f64>,
    pub trace: Vec<TraceRow>,
}

impl SimResult {
    pub fn loss_trace(&self) -> Vec<f64> {
        self.trace.iter().map(|r| r.loss).collect()
    }

    pub fn mi_bound_trace(&self) -> Vec<f64> {
        self.trace.iter().map(|r| r.mi_bound).collect()
    }
}

/// Trains `w` by plain mini-batch SGD with freshly drawn negatives for every
/// instance visit. Every instance in a step shares that step's real-valued
/// `K` but draws its own integer count.
pub fn train(config: &SimConfig) -> Result<SimResult> {
    config.validate()?;
    let world = World::new(
        config.mu_q,
        config.feature_dim,
        config.noise_std,
        config.seed,
    )?;
    let total = config.total_steps();

    let mut data_rng = stream(config.seed, STREAM_TRAIN);
    let positives: Vec<Vec<f64>> = (0..config.train_instances)
        .map(|_| {
            let s = world.positive_score(&mut data_rng);
            world.feature(s, &mut data_rng)
        })
        .collect();

    let mut w = random_unit_vector(config.feature_dim, &mut stream(config.seed, STREAM_INIT));
    let mut count_rng = stream(config.seed, STREAM_COUNTS);
    let mut trace = Vec::with_capacity(total);
    let mut grad_w = vec![0.0; config.feature_dim];

    let per_epoch = config.steps_per_epoch();
    for step in 0..total {
        let k_real = config.negative_strategy.k_at(step, total)?;
        let first = (step % per_epoch) * config.batch_size;
        let batch = &positives[first..(first + config.batch_size).min(config.train_instances)];
        grad_w.iter_mut().for_each(|g| *g = 0.0);
        let (mut loss_sum, mut bound_sum, mut ceiling_sum, mut k_sum) = (0.0, 0.0, 0.0, 0usize);

        for x_pos in batch {
            let k = sample_negative_count(k_real, &mut count_rng);
            let negatives: Vec<Vec<f64>> = (0..k)
                .map(|_| {
                    let s = world.negative_score(&mut data_rng);
                    world.feature(s, &mut data_rng)
                })
                .collect();
            let pos_score = dot(&w, x_pos);
            let neg_scores: Vec<f64> = negatives.iter().map(|x| dot(&w, x)).collect();
            let diverged = || Error::Diverged {
                step,
                k,
                config: config.summary(),
            };
            let (loss, grad) =
                infonce_loss_and_gradient(pos_score, &neg_scores).map_err(|_| diverged())?;
            if !loss.is_finite() {
                return Err(diverged());
            }
            grad_w
                .iter_mut()
                .zip(x_pos)
                .for_each(|(g, x)| *g += grad[0] * x);
            for (gj, x) in grad[1..].iter().zip(&negatives) {
                grad_w.iter_mut().zip(x).for_each(|(g, xi)| *g += gj * xi);
            }
            loss_sum += loss;
            bound_sum += mi_lower_bound(loss, k);
            ceiling_sum += ((k + 1) as f64).ln();
            k_sum += k;
        }

        let scale = config.learning_rate / batch.len() as f64;
        w.iter_mut()
            .zip(&grad_w)
            .for_each(|(wi, g)| *wi -= scale * g);
        if w.iter().any(|x| !x.is_finite()) {
            return Err(Error::Diverged {
                step,
                k: k_real.integral_part(),
                config: config.summary(),
            });
        }

        let n = batch.len() as f64;
        trace.push(TraceRow {
            step,
            k_real: k_real.value(),
            k_sampled: k_sum as f64 / n,
            loss: loss_sum / n,
            mi_bound: bound_sum / n,
            mi_ceiling: ceiling_sum / n,
        });
    }

    let norm = dot(&w, &w).sqrt();
    let recovered_alignment = if norm > 0.0 {
        (dot(&w, world.direction()) / norm).clamp(-1.0, 1.0)
    } else {
        0.0
    };

    let mut eval_rng = stream(config.seed, STREAM_EVAL);
    let mut val_pos = Vec::with_capacity(config.eval_pairs);
    let mut val_neg = Vec::with_capacity(config.eval_pairs);
    for _ in 0..config.eval_pairs {
        let s = world.positive_score(&mut eval_rng);
        val_pos.push(dot(&w, &world.feature(s, &mut eval_rng)));
        let s = world.negative_score(&mut eval_rng);
        val_neg.push(dot(&w, &world.feature(s, &mut eval_rng)));
    }
    let final_val_auc = mann_whitney_auc(&val_pos, &val_neg);

    let n_train = config.train_instances.min(config.eval_pairs);
    let mut train_eval_rng = stream(config.seed, STREAM_TRAIN_EVAL);
    let train_pos: Vec<f64> = positives[..n_train].iter().map(|x| dot(&w, x)).collect();
    let train_neg: Vec<f64> = (0..n_train)
        .map(|_| {
            let s = world.negative_score(&mut train_eval_rng);
            dot(&w, &world.feature(s, &mut train_eval_rng))
        })
        .collect();
    let final_train_auc = mann_whitney_auc(&train_pos, &train_neg);

    Ok(SimResult {
        final_train_auc,
        final_val_auc,
        recovered_alignment,
        weights: w,
        trace,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub strategy: String,
    pub seed: u64,
    pub final_val_auc: f64,
    pub final_train_auc: f64,
    pub alignment: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrategySummary {
    pub strategy: String,
    pub mean_val_auc: f64,
    /// Sample standard deviation over seeds divided by `√n`.
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub runs: Vec<RunRecord>,
    pub summaries: Vec<StrategySummary>,
}

/// Trains every strategy under every seed (in parallel) and summarizes
/// validation AUC per strategy. Row order follows the input order.
pub fn strategy_sweep(
    base: &SimConfig,
    strategies: &[NegativeStrategy],
    seeds: &[u64],
) -> Result<SweepReport> {
    if strategies.is_empty() {
        return Err(Error::Config(
            "strategy sweep needs at least one strategy".into(),
        ));
    }
    if seeds.len() < 2 {
        return Err(Error::Config(
            "strategy sweep needs at least two seeds".into(),
        ));
    }
    let jobs: Vec<(NegativeStrategy, u64)> = strategies
        .iter()
        .flat_map(|&s| seeds.iter().map(move |&seed| (s, seed)))
        .collect();
    let runs = jobs
        .par_iter()
        .map(|&(strategy, seed)| {
            let config = SimConfig {
                negative_strategy: strategy,
                seed,
                ..*base
            };
            let r = train(&config)?;
            Ok(RunRecord {
                strategy: strategy.to_string(),
                seed,
                final_val_auc: r.final_val_auc,
                final_train_auc: r.final_train_auc,
                alignment: r.recovered_alignment,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let summaries = runs
        .chunks(seeds.len())
        .map(|chunk| {
            let n = chunk.len() as f64;
            let mean = chunk.iter().map(|r| r.final_val_auc).sum::<f64>() / n;
            let var = chunk
                .iter()
                .map(|r| (r.final_val_auc - mean).powi(2))
                .sum::<f64>()
                / (n - 1.0);
            StrategySummary {
                strategy: chunk[0].strategy.clone(),
                mean_val_auc: mean,
                stderr: (var / n).sqrt(),
            }
        })
        .collect();
    Ok(SweepReport { runs, summaries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::ScheduleShape;

    fn small(strategy: NegativeStrategy) -> SimConfig {
        SimConfig {
            train_instances: 500,
            eval_pairs: 2000,
            negative_strategy: strategy,
            ..SimConfig::default()
        }
    }

    #[test]
    fn identical_configs_reproduce_bitwise() {
        let cfg = small(NegativeStrategy::fixed(2.5).unwrap());
        let a = train(&cfg).unwrap();
        let b = train(&cfg).unwrap();
        assert_eq!(a, b);
        let c = train(&SimConfig { seed: 43, ..cfg }).unwrap();
        assert_ne!(a.weights, c.weights);
    }

    #[test]
    fn ans_strategy_follows_schedule() {
        let sched = AnsSchedule::new(1.0, 6.0, 500, 0.1, ScheduleShape::Linear).unwrap();
        let cfg = SimConfig {
            batch_size: 1,
            ..small(NegativeStrategy::Ans(sched))
        };
        let r = train(&cfg).unwrap();
        assert_eq!(r.trace.len(), 500);
        assert_eq!(r.trace[0].k_real, 1.0);
        assert_eq!(r.trace[50].k_real, 6.0);
        for row in &r.trace {
            let lo = row.k_real.floor();
            assert!(row.k_sampled == lo || row.k_sampled == lo + 1.0);
            assert_eq!(row.mi_ceiling, (row.k_sampled + 1.0).ln());
            assert!(row.mi_bound <= row.mi_ceiling);
        }
    }

    #[test]
    fn partial_final_batch_is_used() {
        let cfg = SimConfig {
            train_instances: 70,
            batch_size: 32,
            epochs: 2,
            ..small(NegativeStrategy::fixed(2.0).unwrap())
        };
        assert_eq!(cfg.steps_per_epoch(), 3);
        let r = train(&cfg).unwrap();
        assert_eq!(r.trace.len(), 6);
    }

    #[test]
    fn schedule_is_rescaled_to_run_length() {
        let sched = AnsSchedule::standard(5.0, 100).unwrap();
        let s = NegativeStrategy::Ans(sched);
        assert_eq!(s.k_at(0, 1000).unwrap().value(), 1.0);
        assert_eq!(s.k_at(100, 1000).unwrap().value(), 5.0);
        assert_eq!(
            s.k_at(999, 1000).unwrap().value(),
            sched.k_at_step(99).unwrap().value()
        );
    }

    #[test]
    fn invalid_configs_fail_early() {
        let base = small(NegativeStrategy::fixed(1.0).unwrap());
        assert!(train(&SimConfig {
            feature_dim: 1,
            ..base
        })
        .is_err());
        assert!(train(&SimConfig {
            learning_rate: 0.0,
            ..base
        })
        .is_err());
        assert!(train(&SimConfig { epochs: 0, ..base }).is_err());
        assert!(train(&SimConfig {
            batch_size: 0,
            ..base
        })
        .is_err());
        assert!(train(&SimConfig {
            noise_std: -1.0,
            ..base
        })
        .is_err());
    }

    #[test]
    fn huge_learning_rate_reports_divergence() {
        let cfg = SimConfig {
            learning_rate: f64::MAX,
            ..small(NegativeStrategy::fixed(4.0).unwrap())
        };
        match train(&cfg) {
            Err(Error::Diverged { config, .. }) => {
                assert!(config.contains("lr=") && config.contains("seed=42"))
            }
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn sweep_with_repeated_seed_has_zero_stderr() {
        let base = small(NegativeStrategy::fixed(1.0).unwrap());
        let rep = strategy_sweep(&base, &[NegativeStrategy::fixed(1.0).unwrap()], &[5, 5]).unwrap();
        assert_eq!(rep.runs.len(), 2);
        assert_eq!(rep.runs[0].final_val_auc, rep.runs[1].final_val_auc);
        assert_eq!(rep.summaries[0].stderr, 0.0);
        assert!(strategy_sweep(&base, &[], &[1, 2]).is_err());
        assert!(strategy_sweep(&base, &[NegativeStrategy::fixed(1.0).unwrap()], &[1]).is_err());
    }

    #[test]
    fn strategy_labels() {
        assert_eq!(NegativeStrategy::fixed(4.0).unwrap().to_string(), "fixed:4");
        let s = AnsSchedule::standard(20.0, 10).unwrap();
        assert_eq!(NegativeStrategy::Ans(s).to_string(), "ans:20:0.1:linear");
    }
}
