//! Restricted Boltzmann machines trained by contrastive divergence or by
//! sampling an annealer, and their use for rebalancing skewed binary
//! intrusion-detection data.

pub mod balance;
pub mod binary;
pub mod classify;
pub mod data;
pub mod error;
pub mod fixture;
pub mod ising;
pub mod metrics;
pub mod rbm;
pub mod rng;
pub mod sampler;

pub use binary::BinaryVector;
pub use data::{ClassLabel, Dataset};
pub use error::{Error, Result};
pub use rbm::{RbmParams, TrainConfig};
pub use sampler::ModelTermSampler;
