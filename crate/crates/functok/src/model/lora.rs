//! Low-rank adapters over the attention and MLP projection matrices.
//!
//! Each targeted weight `W` gains a pair `(A, B)` with
//! `W_eff = W + (alpha/rank) * A.dot(B)`. `A` is Gaussian-initialized and `B`
//! starts at zero, so a fresh adapter leaves the base model's function
//! unchanged. During adapter training the base weights stay frozen: the full
//! weight gradient `dW` is projected onto the factors as
//! `dA = s * dW * B^T` and `dB = s * A^T * dW`.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::net::{sc, Model, Scalar};
use super::{ModelConfig, ModelError};

/// Weight matrices that receive adapters, in block order.
pub const LORA_TARGETS: [&str; 6] = ["wq", "wk", "wv", "wo", "w_up", "w_down"];

/// Adapter hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoraConfig {
    pub rank: usize,
    pub alpha: f64,
    pub seed: u64,
}

impl LoraConfig {
    /// Effective scaling applied to `A.dot(B)`.
    pub fn scaling(&self) -> f64 {
        self.alpha / self.rank as f64
    }
}

/// One `(A, B)` factor pair.
#[derive(Debug, Clone)]
pub struct AdapterPair<F> {
    pub a: Array2<F>,
    pub b: Array2<F>,
}

/// Adapters for every targeted matrix in every block.
#[derive(Debug, Clone)]
pub struct LoraAdapters<F> {
    pub config: LoraConfig,
    /// `layers[block][target]` following [`LORA_TARGETS`] order.
    pub layers: Vec<Vec<AdapterPair<F>>>,
}

fn target_shape(model: &ModelConfig, target: &str) -> (usize, usize) {
    let d = model.d_model;
    let m = model.d_model * model.mlp_ratio;
    match target {
        "w_up" => (d, m),
        "w_down" => (m, d),
        _ => (d, d),
    }
}

impl<F: Scalar> LoraAdapters<F> {
    /// Fresh adapters: `A ~ N(0, 0.02)`, `B = 0`.
    pub fn init(model: &ModelConfig, config: &LoraConfig) -> Result<Self, ModelError> {
        if config.rank == 0 {
            return Err(ModelError::InvalidConfig("lora rank must be nonzero".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let r = config.rank;
        let layers = (0..model.n_layers)
            .map(|_| {
                LORA_TARGETS
                    .iter()
                    .map(|t| {
                        let (rows, cols) = target_shape(model, t);
                        AdapterPair {
                            a: Array2::from_shape_fn((rows, r), |_| {
                                sc(gaussian(&mut rng) * 0.02)
                            }),
                            b: Array2::zeros((r, cols)),
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(LoraAdapters {
            config: config.clone(),
            layers,
        })
    }

    /// All-zero adapters with the same shapes; used as gradient accumulators.
    pub fn zeros_like(&self) -> Self {
        LoraAdapters {
            config: self.config.clone(),
            layers: self
                .layers
                .iter()
                .map(|layer| {
                    layer
                        .iter()
                        .map(|p| AdapterPair {
                            a: Array2::zeros(p.a.raw_dim()),
                            b: Array2::zeros(p.b.raw_dim()),
                        })
                        .collect()
                })
                .collect(),
        }
    }

    /// Returns a model whose targeted weights are `W + s * A.dot(B)`. All
    /// other tensors are cloned from `base` unchanged.
    pub fn merge(&self, base: &Model<F>) -> Model<F> {
        let s = sc::<F>(self.config.scaling());
        let mut merged = base.clone();
        for (block, layer) in merged.blocks.iter_mut().zip(&self.layers) {
            for (target, pair) in LORA_TARGETS.iter().zip(layer) {
                let delta = pair.a.dot(&pair.b).mapv(|x| x * s);
                let w = match *target {
                    "wq" => &mut block.wq,
                    "wk" => &mut block.wk,
                    "wv" => &mut block.wv,
                    "wo" => &mut block.wo,
                    "w_up" => &mut block.w_up,
                    "w_down" => &mut block.w_down,
                    _ => unreachable!(),
                };
                *w = &*w + &delta;
            }
        }
        merged
    }

    /// Projects full-weight gradients onto the factors, adding into `grads`.
    pub fn project_grads(&self, weight_grads: &Model<F>, grads: &mut Self) {
        let s = sc::<F>(self.config.scaling());
        for ((layer, block_grads), out) in self
            .layers
            .iter()
            .zip(&weight_grads.blocks)
            .zip(grads.layers.iter_mut())
        {
            for ((target, pair), out_pair) in LORA_TARGETS.iter().zip(layer).zip(out.iter_mut()) {
                let dw = match *target {
                    "wq" => &block_grads.wq,
                    "wk" => &block_grads.wk,
                    "wv" => &block_grads.wv,
                    "wo" => &block_grads.wo,
                    "w_up" => &block_grads.w_up,
                    "w_down" => &block_grads.w_down,
                    _ => unreachable!(),
                };
                out_pair.a = &out_pair.a + &dw.dot(&pair.b.t()).mapv(|x| x * s);
                out_pair.b = &out_pair.b + &pair.a.t().dot(dw).mapv(|x| x * s);
            }
        }
    }

    /// Named factor tensors in a fixed order.
    pub fn tensors(&self) -> Vec<(String, &Array2<F>)> {
        let mut out = Vec::new();
        for (i, layer) in self.layers.iter().enumerate() {
            for (target, pair) in LORA_TARGETS.iter().zip(layer) {
                out.push((format!("block{i}.{target}.lora_a"), &pair.a));
                out.push((format!("block{i}.{target}.lora_b"), &pair.b));
            }
        }
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<(String, &mut Array2<F>)> {
        let mut out = Vec::new();
        for (i, layer) in self.layers.iter_mut().enumerate() {
            for (target, pair) in LORA_TARGETS.iter().zip(layer.iter_mut()) {
                out.push((format!("block{i}.{target}.lora_a"), &mut pair.a));
                out.push((format!("block{i}.{target}.lora_b"), &mut pair.b));
            }
        }
        out
    }

    /// Trainable adapter parameter count.
    pub fn n_params(&self) -> usize {
        self.tensors().iter().map(|(_, t)| t.len()).sum()
    }
}

fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let u1: f64 = rng.gen();
        if u1 <= f64::MIN_POSITIVE {
            continue;
        }
        let u2: f64 = rng.gen();
        return (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
    }
}
