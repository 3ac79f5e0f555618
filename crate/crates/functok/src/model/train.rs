//! Training loop: AdamW with linear warmup and linear decay, gradient
//! clipping, optional per-token loss weights, and a LoRA variant that updates
//! only the adapter factors.
//!
//! The loss over a batch is `sum_t w[y_t] * -log p(y_t) / positions`, where
//! `positions` counts every predicted token in the batch. With unit weights
//! this is the ordinary mean cross-entropy; scaling a token's weight scales
//! its contribution proportionally.
//!
//! Per-sequence forward/backward passes run on a rayon pool, but gradients
//! are summed in a fixed sequence order so training is bitwise deterministic
//! regardless of thread count.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::time::Instant;

use super::lora::LoraAdapters;
use super::net::{decays, weighted_ce_sum, Model};
use super::ModelError;

/// Optimizer and schedule hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub warmup_steps: usize,
    pub weight_decay: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub grad_clip: f64,
    /// Seed for per-epoch shuffling (independent of the model init seed).
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 3,
            batch_size: 32,
            lr: 5e-4,
            warmup_steps: 10,
            weight_decay: 0.01,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            grad_clip: 1.0,
            seed: 7,
        }
    }
}

/// One training sequence, already tokenized. Position `t` predicts
/// `ids[t + 1]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainExample {
    pub ids: Vec<u32>,
}

/// Summary of a finished run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainReport {
    pub epoch_losses: Vec<f64>,
    pub steps: usize,
    pub train_seconds: f64,
}

/// Per-sequence forward/backward; returns (loss sum, predicted positions,
/// gradient accumulator holding this sequence's contribution).
fn sequence_grads(
    model: &Model<f32>,
    ids: &[u32],
    token_weights: &[f64],
) -> Result<(f64, usize, Model<f32>), ModelError> {
    let inputs = &ids[..ids.len() - 1];
    let targets = &ids[1..];
    let (logits, caches) = model.forward_full(inputs)?;
    let (loss, dlogits) = weighted_ce_sum(&logits, targets, token_weights);
    let mut grads = Model::zeros(&model.config);
    model.backward(&caches, &dlogits, &mut grads);
    Ok((loss as f64, targets.len(), grads))
}

/// Batch loss and summed gradients with a fixed accumulation order.
fn batch_grads(
    model: &Model<f32>,
    batch: &[&TrainExample],
    token_weights: &[f64],
) -> Result<(f64, Model<f32>), ModelError> {
    let per_seq: Vec<_> = batch
        .par_iter()
        .map(|ex| sequence_grads(model, &ex.ids, token_weights))
        .collect::<Result<_, _>>()?;
    let total_positions: usize = per_seq.iter().map(|(_, p, _)| p).sum();
    let inv = 1.0 / total_positions.max(1) as f64;
    let mut grads = Model::zeros(&model.config);
    let mut loss = 0.0;
    for (l, _, g) in per_seq {
        loss += l;
        for ((_, mut dst), (_, src)) in grads.tensors_mut().into_iter().zip(g.tensors()) {
            let dst = dst.as_slice_mut();
            for (d, s) in dst.iter_mut().zip(src.as_slice()) {
                *d += s * inv as f32;
            }
        }
    }
    Ok((loss * inv, grads))
}

/// Learning rate at step `step` (0-based) of `total` steps.
fn lr_at(cfg: &TrainConfig, step: usize, total: usize) -> f64 {
    if step < cfg.warmup_steps {
        cfg.lr * (step + 1) as f64 / cfg.warmup_steps as f64
    } else if total > cfg.warmup_steps {
        let rest = (total - cfg.warmup_steps) as f64;
        let done = (step - cfg.warmup_steps) as f64;
        cfg.lr * (1.0 - done / rest).max(0.0)
    } else {
        cfg.lr
    }
}

/// Clips whole-model gradients to a global L2 norm of `clip`.
fn clip_model_grads(grads: &mut Model<f32>, clip: f64) {
    let norm_sq: f64 = grads
        .tensors()
        .iter()
        .map(|(_, t)| t.as_slice().iter().map(|&g| g as f64 * g as f64).sum::<f64>())
        .sum();
    let norm = norm_sq.sqrt();
    if clip > 0.0 && norm > clip {
        let scale = (clip / norm) as f32;
        for (_, mut t) in grads.tensors_mut() {
            for g in t.as_slice_mut() {
                *g *= scale;
            }
        }
    }
}

/// Clips adapter gradients to a global L2 norm of `clip`.
fn clip_lora_grads(grads: &mut LoraAdapters<f32>, clip: f64) {
    let norm_sq: f64 = grads
        .tensors()
        .iter()
        .map(|(_, t)| t.iter().map(|&g| g as f64 * g as f64).sum::<f64>())
        .sum();
    let norm = norm_sq.sqrt();
    if clip > 0.0 && norm > clip {
        let scale = (clip / norm) as f32;
        for (_, t) in grads.tensors_mut() {
            t.mapv_inplace(|g| g * scale);
        }
    }
}

/// One AdamW update over matching (param, grad, m, v) slices.
#[allow(clippy::too_many_arguments)]
fn adamw_step(
    params: &mut [f32],
    grads: &[f32],
    m: &mut [f32],
    v: &mut [f32],
    lr: f64,
    cfg: &TrainConfig,
    t: usize,
    decay: bool,
) {
    let b1 = cfg.beta1;
    let b2 = cfg.beta2;
    let bc1 = 1.0 - b1.powi(t as i32);
    let bc2 = 1.0 - b2.powi(t as i32);
    let wd = if decay { cfg.weight_decay } else { 0.0 };
    for i in 0..params.len() {
        let g = grads[i] as f64;
        let mi = b1 * m[i] as f64 + (1.0 - b1) * g;
        let vi = b2 * v[i] as f64 + (1.0 - b2) * g * g;
        m[i] = mi as f32;
        v[i] = vi as f32;
        let mhat = mi / bc1;
        let vhat = vi / bc2;
        let p = params[i] as f64;
        params[i] = (p - lr * (mhat / (vhat.sqrt() + cfg.eps) + wd * p)) as f32;
    }
}

fn epoch_batches(
    n: usize,
    batch_size: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    order
        .chunks(batch_size.max(1))
        .map(|c| c.to_vec())
        .collect()
}

/// Full-parameter training. Mutates `model` in place.
pub fn train(
    model: &mut Model<f32>,
    examples: &[TrainExample],
    token_weights: &[f64],
    cfg: &TrainConfig,
) -> Result<TrainReport, ModelError> {
    train_with(model, examples, token_weights, cfg, |_, _| {})
}

/// Full-parameter training with a per-epoch observer. `on_epoch` receives
/// the 0-based epoch index and the model state after that epoch's updates.
pub fn train_with<F>(
    model: &mut Model<f32>,
    examples: &[TrainExample],
    token_weights: &[f64],
    cfg: &TrainConfig,
    mut on_epoch: F,
) -> Result<TrainReport, ModelError>
where
    F: FnMut(usize, &Model<f32>),
{
    if examples.is_empty() {
        return Err(ModelError::InvalidConfig("empty training set".into()));
    }
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let steps_per_epoch = examples.len().div_ceil(cfg.batch_size.max(1));
    let total_steps = steps_per_epoch * cfg.epochs;
    let mut m_state = Model::zeros(&model.config);
    let mut v_state = Model::zeros(&model.config);
    let mut step = 0usize;
    let mut epoch_losses = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        let mut epoch_loss = 0.0;
        let batches = epoch_batches(examples.len(), cfg.batch_size, &mut rng);
        let n_batches = batches.len();
        for batch_ids in batches {
            let batch: Vec<&TrainExample> = batch_ids.iter().map(|&i| &examples[i]).collect();
            let (loss, mut grads) = batch_grads(model, &batch, token_weights)?;
            epoch_loss += loss;
            clip_model_grads(&mut grads, cfg.grad_clip);
            let lr = lr_at(cfg, step, total_steps);
            step += 1;
            for ((((name, mut p), (_, g)), (_, mut ms)), (_, mut vs)) in model
                .tensors_mut()
                .into_iter()
                .zip(grads.tensors())
                .zip(m_state.tensors_mut())
                .zip(v_state.tensors_mut())
            {
                adamw_step(
                    p.as_slice_mut(),
                    g.as_slice(),
                    ms.as_slice_mut(),
                    vs.as_slice_mut(),
                    lr,
                    cfg,
                    step,
                    decays(&name),
                );
            }
        }
        epoch_losses.push(epoch_loss / n_batches as f64);
        on_epoch(epoch, model);
    }
    Ok(TrainReport {
        epoch_losses,
        steps: step,
        train_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Adapter-only training: the base model is frozen and only the LoRA factors
/// receive updates.
pub fn train_lora(
    base: &Model<f32>,
    adapters: &mut LoraAdapters<f32>,
    examples: &[TrainExample],
    token_weights: &[f64],
    cfg: &TrainConfig,
) -> Result<TrainReport, ModelError> {
    if examples.is_empty() {
        return Err(ModelError::InvalidConfig("empty training set".into()));
    }
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let steps_per_epoch = examples.len().div_ceil(cfg.batch_size.max(1));
    let total_steps = steps_per_epoch * cfg.epochs;
    let mut m_state = adapters.zeros_like();
    let mut v_state = adapters.zeros_like();
    let mut step = 0usize;
    let mut epoch_losses = Vec::with_capacity(cfg.epochs);
    for _ in 0..cfg.epochs {
        let mut epoch_loss = 0.0;
        let batches = epoch_batches(examples.len(), cfg.batch_size, &mut rng);
        let n_batches = batches.len();
        for batch_ids in batches {
            let merged = adapters.merge(base);
            let batch: Vec<&TrainExample> = batch_ids.iter().map(|&i| &examples[i]).collect();
            let (loss, weight_grads) = batch_grads(&merged, &batch, token_weights)?;
            epoch_loss += loss;
            let mut grads = adapters.zeros_like();
            adapters.project_grads(&weight_grads, &mut grads);
            clip_lora_grads(&mut grads, cfg.grad_clip);
            let lr = lr_at(cfg, step, total_steps);
            step += 1;
            for ((((_, p), (_, g)), (_, ms)), (_, vs)) in adapters
                .tensors_mut()
                .into_iter()
                .zip(grads.tensors())
                .zip(m_state.tensors_mut())
                .zip(v_state.tensors_mut())
            {
                adamw_step(
                    p.as_slice_mut().expect("std layout"),
                    g.as_slice().expect("std layout"),
                    ms.as_slice_mut().expect("std layout"),
                    vs.as_slice_mut().expect("std layout"),
                    lr,
                    cfg,
                    step,
                    true,
                );
            }
        }
        epoch_losses.push(epoch_loss / n_batches as f64);
    }
    Ok(TrainReport {
        epoch_losses,
        steps: step,
        train_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Mean weighted cross-entropy of `model` over `examples` without updates.
pub fn mean_loss(
    model: &Model<f32>,
    examples: &[TrainExample],
    token_weights: &[f64],
) -> Result<f64, ModelError> {
    let per_seq: Vec<_> = examples
        .par_iter()
        .map(|ex| {
            let inputs = &ex.ids[..ex.ids.len() - 1];
            let targets = &ex.ids[1..];
            let logits = model.forward(inputs)?;
            let (loss, _) = weighted_ce_sum(&logits, targets, token_weights);
            Ok::<_, ModelError>((loss as f64, targets.len()))
        })
        .collect::<Result<_, _>>()?;
    let positions: usize = per_seq.iter().map(|(_, p)| p).sum();
    let total: f64 = per_seq.iter().map(|(l, _)| l).sum();
    Ok(total / positions.max(1) as f64)
}
