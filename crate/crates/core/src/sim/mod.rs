//! Desk-scale contrastive training on synthetic data drawn from the
//! Gaussian score model.

mod data;
mod loss;
mod metrics;
mod train;

pub use data::{generate_instance, Instance, World};
pub use loss::{infonce_loss, infonce_loss_and_gradient, mi_lower_bound};
pub use metrics::mann_whitney_auc;
pub use train::{
    strategy_sweep, train, NegativeStrategy, RunRecord, SimConfig, SimResult, StrategySummary,
    SweepReport, TraceRow, DEFAULT_BATCH_SIZE,
};
