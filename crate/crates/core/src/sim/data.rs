//! Synthetic features realizing the Gaussian score model.
//!
//! Each item has a latent score `s` (`N(mu_q, 1)` for positives, `N(0, 1)`
//! for negatives) and a feature vector `s · w* + noise_std · z⊥`, where `w*`
//! is a unit direction fixed per seed and `z⊥` is isotropic Gaussian noise
//! projected onto the orthogonal complement of `w*`. Projecting a feature
//! onto `w*` recovers its latent score exactly.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{ensure_finite, Error, Result};
use crate::gaussian::ensure_mean;

#[derive(Debug, Clone, PartialEq)]
pub struct World {
    mu_q: f64,
    noise_std: f64,
    direction: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub positive: Vec<f64>,
    pub negatives: Vec<Vec<f64>>,
    pub positive_score: f64,
    pub negative_scores: Vec<f64>,
}

pub(crate) fn random_unit_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = dot(&v, &v).sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl World {
    /// The true direction `w*` is drawn from `seed`.
    pub fn new(mu_q: f64, dim: usize, noise_std: f64, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let direction = random_unit_vector(dim.max(1), &mut rng);
        Self::with_direction(mu_q, dim, noise_std, direction)
    }

    pub fn with_direction(
        mu_q: f64,
        dim: usize,
        noise_std: f64,
        direction: Vec<f64>,
    ) -> Result<Self> {
        let mu_q = ensure_mean("mu_q", mu_q)?;
        if dim < 2 {
            return Err(Error::out_of_range(
                "feature_dim",
                dim as f64,
                "need at least 2 dimensions for orthogonal noise",
            ));
        }
        ensure_finite("noise_std", noise_std)?;
        if noise_std < 0.0 {
            return Err(Error::out_of_range("noise_std", noise_std, "must be >= 0"));
        }
        if direction.len() != dim || (dot(&direction, &direction) - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "true direction must be a unit vector of length {dim}"
            )));
        }
        Ok(Self {
            mu_q,
            noise_std,
            direction,
        })
    }

    pub fn dim(&self) -> usize {
        self.direction.len()
    }

    pub fn mu_q(&self) -> f64 {
        self.mu_q
    }

    pub fn direction(&self) -> &[f64] {
        &self.direction
    }

    pub fn feature<R: Rng + ?Sized>(&self, score: f64, rng: &mut R) -> Vec<f64> {
        let mut x: Vec<f64> = if self.noise_std > 0.0 {
            let z: Vec<f64> = (0..self.dim())
                .map(|_| rng.sample(StandardNormal))
                .collect();
            let along = dot(&z, &self.direction);
            z.iter()
                .zip(&self.direction)
                .map(|(zi, wi)| self.noise_std * (zi - along * wi))
                .collect()
        } else {
            vec![0.0; self.dim()]
        };
        for (xi, wi) in x.iter_mut().zip(&self.direction) {
            *xi += score * wi;
        }
        x
    }

    pub fn positive_score<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.mu_q + rng.sample::<f64, _>(StandardNormal)
    }

    pub fn negative_score<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        rng.sample(StandardNormal)
    }

    /// One positive and `k` negatives.
    pub fn instance<R: Rng + ?Sized>(&self, k: usize, rng: &mut R) -> Instance {
        let positive_score = self.positive_score(rng);
        let positive = self.feature(positive_score, rng);
        let mut negatives = Vec::with_capacity(k);
        let mut negative_scores = Vec::with_capacity(k);
        for _ in 0..k {
            let s = self.negative_score(rng);
            negatives.push(self.feature(s, rng));
            negative_scores.push(s);
        }
        Instance {
            positive,
            negatives,
            positive_score,
            negative_scores,
        }
    }
}

/// Builds a seeded world and draws one instance from it.
pub fn generate_instance<R: Rng + ?Sized>(
    mu_q: f64,
    k: usize,
    dim: usize,
    noise_std: f64,
    world_seed: u64,
    rng: &mut R,
) -> Result<Instance> {
    Ok(World::new(mu_q, dim, noise_std, world_seed)?.instance(k, rng))
}
