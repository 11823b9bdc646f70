//! The two-block generator, its discriminator, and the training schedule.

mod baseline;
mod config;
mod gan;
mod train;

pub use baseline::HfOnlyModel;
pub use config::{Architecture, TrainingConfig, TrainingMode};
pub use gan::{Checkpoint, GanMdfModel, CHECKPOINT_FORMAT_VERSION};
pub use train::{train, AdversarialOptimizers, LossRecord, LossTrace, TrainingReport};
