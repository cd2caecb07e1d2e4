//! Adaptive negative sampling: a real-valued `K` that ramps from 1 up to the
//! estimated optimum by a turning point, then declines back to 1.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{ensure_finite, Error, Result};

pub const DEFAULT_TURNING_FRACTION: f64 = 0.1;

/// Real-valued negative sampling ratio, at least 1.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FractionalK(f64);

impl FractionalK {
    pub fn new(value: f64) -> Result<Self> {
        ensure_finite("K", value)?;
        if value < 1.0 {
            return Err(Error::out_of_range(
                "K",
                value,
                "negative sampling ratio must be >= 1",
            ));
        }
        Ok(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn integral_part(self) -> usize {
        self.0.floor() as usize
    }

    pub fn fractional_part(self) -> f64 {
        self.0 - self.0.floor()
    }
}

/// Draws `floor(k)` negatives with probability `1 - {k}` and `floor(k) + 1`
/// with probability `{k}`, so the expected count is `k`.
pub fn sample_negative_count<R: Rng + ?Sized>(k: FractionalK, rng: &mut R) -> usize {
    let base = k.integral_part();
    let frac = k.fractional_part();
    if frac > 0.0 && rng.random::<f64>() < frac {
        base + 1
    } else {
        base
    }
}

/// Seeded source of per-instance negative counts.
#[derive(Debug, Clone)]
pub struct NegativeSampler {
    rng: ChaCha8Rng,
}

impl NegativeSampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent sampler for a parallel worker.
    pub fn derive(seed: u64, worker: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(worker + 1);
        Self { rng }
    }

    pub fn sample(&mut self, k: FractionalK) -> usize {
        sample_negative_count(k, &mut self.rng)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScheduleShape {
    /// Linear ramp up, linear decline.
    #[default]
    Linear,
    /// Linear ramp up, half-cosine decline.
    Cosine,
}

impl fmt::Display for ScheduleShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScheduleShape::Linear => "linear",
            ScheduleShape::Cosine => "cosine",
        })
    }
}

impl FromStr for ScheduleShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "linear" => Ok(ScheduleShape::Linear),
            "cosine" | "cosine-decay" => Ok(ScheduleShape::Cosine),
            other => Err(Error::Config(format!(
                "unknown schedule shape {other:?} (expected linear or cosine)"
            ))),
        }
    }
}

/// Warm-up/decay curve of `K` over `total_steps` training steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnsSchedule {
    k_start: f64,
    k_peak: f64,
    total_steps: usize,
    turning_fraction: f64,
    shape: ScheduleShape,
}

impl AnsSchedule {
    pub fn new(
        k_start: f64,
        k_peak: f64,
        total_steps: usize,
        turning_fraction: f64,
        shape: ScheduleShape,
    ) -> Result<Self> {
        let k_start = FractionalK::new(k_start)?.value();
        ensure_finite("k_peak", k_peak)?;
        if k_peak < k_start {
            return Err(Error::out_of_range("k_peak", k_peak, "must be >= k_start"));
        }
        ensure_finite("turning_fraction", turning_fraction)?;
        if !(turning_fraction > 0.0 && turning_fraction < 1.0) {
            return Err(Error::out_of_range(
                "turning_fraction",
                turning_fraction,
                "expected a fraction in (0, 1)",
            ));
        }
        // A peak strictly inside (0, total) needs at least one interior step.
        if total_steps < 2 {
            return Err(Error::Config(format!(
                "schedule needs at least 2 total steps, got {total_steps}"
            )));
        }
        Ok(Self {
            k_start,
            k_peak,
            total_steps,
            turning_fraction,
            shape,
        })
    }

    /// Starts and ends at `K = 1`, peaks at 10% of training, linear shape.
    pub fn standard(k_peak: f64, total_steps: usize) -> Result<Self> {
        Self::new(
            1.0,
            k_peak,
            total_steps,
            DEFAULT_TURNING_FRACTION,
            ScheduleShape::Linear,
        )
    }

    pub fn k_start(&self) -> f64 {
        self.k_start
    }

    pub fn k_peak(&self) -> f64 {
        self.k_peak
    }

    pub fn total_steps(&self) -> usize {
        self.total_steps
    }

    pub fn turning_fraction(&self) -> f64 {
        self.turning_fraction
    }

    pub fn shape(&self) -> ScheduleShape {
        self.shape
    }

    /// `round(turning_fraction · total_steps)`, kept strictly inside the run.
    pub fn turning_step(&self) -> usize {
        let raw = (self.turning_fraction * self.total_steps as f64).round() as usize;
        raw.clamp(1, self.total_steps - 1)
    }

    pub fn k_at_step(&self, step: usize) -> Result<FractionalK> {
        if step > self.total_steps {
            return Err(Error::out_of_range(
                "step",
                step as f64,
                "must not exceed total_steps",
            ));
        }
        let turn = self.turning_step();
        let span = self.k_peak - self.k_start;
        let k = if step == 0 || step == self.total_steps {
            self.k_start
        } else if step == turn {
            self.k_peak
        } else if step < turn {
            self.k_start + span * step as f64 / turn as f64
        } else {
            let progress = (step - turn) as f64 / (self.total_steps - turn) as f64;
            let remaining = match self.shape {
                ScheduleShape::Linear => 1.0 - progress,
                ScheduleShape::Cosine => 0.5 * (1.0 + (PI * progress).cos()),
            };
            self.k_start + span * remaining
        };
        FractionalK::new(k)
    }

    /// One `(step, k)` row per step in `0..=total_steps`.
    pub fn emit(&self) -> Vec<(usize, f64)> {
        (0..=self.total_steps)
            .map(|s| (s, self.k_at_step(s).expect("step within schedule").value()))
            .collect()
    }
}
