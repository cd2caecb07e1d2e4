//! Estimating the optimal number of negatives for InfoNCE training.
//!
//! The crate models true and predicted relevance scores as unit-variance
//! Gaussians, derives how often a training sample is informative (good),
//! misleading (bad) or uninformative (easy) for a given negative sampling
//! ratio `K`, and searches for the `K` that maximizes the resulting training
//! effectiveness. It also provides an adaptive warm-up/decay schedule for
//! `K` and a small synthetic contrastive trainer for checking predictions.

pub mod effectiveness;
pub mod error;
pub mod gaussian;
pub mod optimizer;
pub mod schedule;
pub mod sim;

pub use error::{Error, Result};
