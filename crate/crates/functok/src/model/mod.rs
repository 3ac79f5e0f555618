//! Tiny from-scratch causal language model: network, training loop, LoRA
//! adapters, greedy decoding with a KV cache, checkpoint IO, and a
//! finite-difference gradient check.

pub mod checkpoint;
pub mod generate;
pub mod gradcheck;
pub mod lora;
pub mod net;
pub mod train;

pub use checkpoint::Checkpoint;
pub use generate::{generate_greedy, select_function, Generated, GenerateOptions};
pub use lora::{LoraAdapters, LoraConfig};
pub use net::Model;
pub use train::{mean_loss, train, train_lora, train_with, TrainConfig, TrainExample, TrainReport};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Architecture hyperparameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub vocab_size: usize,
    pub context_len: usize,
    pub d_model: usize,
    pub n_layers: usize,
    pub n_heads: usize,
    pub mlp_ratio: usize,
    pub seed: u64,
}

impl ModelConfig {
    /// Validates internal consistency.
    pub fn check(&self) -> Result<(), ModelError> {
        if self.d_model == 0 || self.n_layers == 0 || self.n_heads == 0 || self.mlp_ratio == 0 {
            return Err(ModelError::InvalidConfig(
                "dimensions must be nonzero".into(),
            ));
        }
        if self.d_model % self.n_heads != 0 {
            return Err(ModelError::InvalidConfig(format!(
                "d_model {} not divisible by n_heads {}",
                self.d_model, self.n_heads
            )));
        }
        if self.vocab_size == 0 || self.context_len == 0 {
            return Err(ModelError::InvalidConfig(
                "vocab_size and context_len must be nonzero".into(),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid model config: {0}")]
    InvalidConfig(String),
    #[error("sequence of {len} tokens exceeds context length {max}")]
    SequenceTooLong { len: usize, max: usize },
    #[error("checkpoint format error: {0}")]
    Checkpoint(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
