//! Training studies: dataset size, full vs LoRA fine-tuning, and
//! weighted-loss convergence.
//!
//! All studies train from-scratch models, so they hold the optimization-step
//! budget constant across arms instead of the epoch count: with a fixed
//! number of epochs a smaller dataset would receive proportionally fewer
//! updates and the comparison would conflate dataset size with training
//! length. The per-arm step budget and the realized epoch count are both
//! reported.

use super::{
    evaluate, functoken_example, max_example_len, summarize, token_weights, BenchError,
    BenchRecord, EvalOptions, Pipeline,
};
use crate::datagen::TrainingExample;
use crate::model::{
    mean_loss, train_lora, train_with, LoraAdapters, LoraConfig, Model, ModelConfig, TrainConfig,
    TrainExample, TrainReport,
};
use crate::registry::Registry;
use crate::tokenizer::Vocabulary;
use serde::{Deserialize, Serialize};

/// Shared knobs for study training runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub d_model: usize,
    pub n_layers: usize,
    pub n_heads: usize,
    pub mlp_ratio: usize,
    pub model_seed: u64,
    pub batch_size: usize,
    pub lr: f64,
    pub warmup_steps: usize,
    pub shuffle_seed: u64,
    /// Optimizer steps per training run; epochs are derived per dataset.
    pub step_budget: usize,
    /// Loss weight on functional-token and end-token classes.
    pub omega: f64,
    /// Generation budget during evaluation.
    pub max_new: usize,
}

impl StudyConfig {
    /// Epoch count realizing (at least) the step budget on `n_rows` rows.
    pub fn epochs_for(&self, n_rows: usize) -> usize {
        let steps_per_epoch = n_rows.div_ceil(self.batch_size).max(1);
        self.step_budget.div_ceil(steps_per_epoch).max(1)
    }

    pub fn train_config(&self, n_rows: usize) -> TrainConfig {
        TrainConfig {
            epochs: self.epochs_for(n_rows),
            batch_size: self.batch_size,
            lr: self.lr,
            warmup_steps: self.warmup_steps,
            seed: self.shuffle_seed,
            ..TrainConfig::default()
        }
    }

    pub fn model_config(&self, vocab: &Vocabulary, context_len: usize) -> ModelConfig {
        ModelConfig {
            vocab_size: vocab.total_size(),
            context_len,
            d_model: self.d_model,
            n_layers: self.n_layers,
            n_heads: self.n_heads,
            mlp_ratio: self.mlp_ratio,
            seed: self.model_seed,
        }
    }
}

/// Context length covering every training sequence plus a full generation.
fn fitted_context_len(examples: &[TrainExample], max_new: usize) -> usize {
    max_example_len(examples) + max_new + 8
}

/// Trains a functional-token model on `rows`, observing each epoch via
/// `on_epoch`. Returns the model and the training report.
pub fn train_functoken_with<F>(
    vocab: &Vocabulary,
    rows: &[TrainingExample],
    cfg: &StudyConfig,
    on_epoch: F,
) -> Result<(Model<f32>, TrainReport), BenchError>
where
    F: FnMut(usize, &Model<f32>),
{
    let examples: Vec<TrainExample> = rows.iter().map(|r| functoken_example(vocab, r)).collect();
    let mcfg = cfg.model_config(vocab, fitted_context_len(&examples, cfg.max_new));
    let mut model = Model::<f32>::init(&mcfg)?;
    let weights = token_weights(vocab, cfg.omega);
    let report = train_with(&mut model, &examples, &weights, &cfg.train_config(rows.len()), on_epoch)?;
    Ok((model, report))
}

/// Trains a retrieval-augmented-pipeline model: each row's training text is
/// the top-k candidate prompt for its query followed by the same response.
/// Prompts run to thousands of tokens, so callers normally pass a
/// subsampled `rows`.
pub fn train_rag(
    vocab: &Vocabulary,
    registry: &Registry,
    index: &crate::retrieval::TfIdfIndex,
    rows: &[TrainingExample],
    top_k: usize,
    cfg: &StudyConfig,
) -> Result<(Model<f32>, TrainReport), BenchError> {
    let examples: Vec<TrainExample> = rows
        .iter()
        .map(|r| super::rag_example(vocab, registry, index, r, top_k))
        .collect::<Result<_, _>>()?;
    let mcfg = cfg.model_config(vocab, fitted_context_len(&examples, cfg.max_new));
    let mut model = Model::<f32>::init(&mcfg)?;
    let weights = token_weights(vocab, cfg.omega);
    let report = train_with(
        &mut model,
        &examples,
        &weights,
        &cfg.train_config(rows.len()),
        |_, _| {},
    )?;
    Ok((model, report))
}

/// [`train_functoken_with`] without an epoch observer.
pub fn train_functoken(
    vocab: &Vocabulary,
    rows: &[TrainingExample],
    cfg: &StudyConfig,
) -> Result<(Model<f32>, TrainReport), BenchError> {
    train_functoken_with(vocab, rows, cfg, |_, _| {})
}

/// Evaluates a functional-token model and returns its records.
pub fn eval_functoken(
    model: &Model<f32>,
    vocab: &Vocabulary,
    registry: &Registry,
    eval_rows: &[TrainingExample],
    max_new: usize,
) -> Result<Vec<BenchRecord>, BenchError> {
    evaluate(
        model,
        vocab,
        registry,
        None,
        eval_rows,
        &EvalOptions {
            pipeline: Pipeline::Functoken,
            top_k: 0,
            max_new,
        },
    )
}

/// Keeps the first `size`/`full_size` fraction of `rows` per target
/// function, preserving order. A smaller study arm is therefore a prefix
/// subsample of the full training split and stays disjoint from any split
/// carved out of the full dataset.
pub fn subsample_per_function(
    rows: &[TrainingExample],
    size: usize,
    full_size: usize,
) -> Vec<TrainingExample> {
    assert!(size <= full_size && full_size > 0);
    let mut quota: std::collections::HashMap<&str, usize> = std::collections::HashMap::new();
    let mut counts: std::collections::HashMap<&str, usize> = std::collections::HashMap::new();
    for row in rows {
        *counts.entry(row.target_function.as_str()).or_default() += 1;
    }
    let mut out = Vec::new();
    for row in rows {
        let total = counts[row.target_function.as_str()];
        let keep = (total * size) / full_size;
        let taken = quota.entry(row.target_function.as_str()).or_default();
        if *taken < keep {
            *taken += 1;
            out.push(row.clone());
        }
    }
    out
}

/// One row of the dataset-size table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeStudyRow {
    pub per_api: usize,
    pub n_train: usize,
    pub epochs: usize,
    pub final_train_loss: f64,
    pub function_accuracy: f64,
    pub exact_tolerant_accuracy: f64,
}

/// Trains one model per dataset size (arms are per-function prefix
/// subsamples of `train_rows`, which came from a `full_size`-per-API
/// dataset) and evaluates each on the shared `eval_rows`.
pub fn size_study(
    registry: &Registry,
    vocab: &Vocabulary,
    train_rows: &[TrainingExample],
    eval_rows: &[TrainingExample],
    sizes: &[usize],
    full_size: usize,
    cfg: &StudyConfig,
) -> Result<Vec<SizeStudyRow>, BenchError> {
    let mut out = Vec::new();
    for &size in sizes {
        let arm_rows = if size == full_size {
            train_rows.to_vec()
        } else {
            subsample_per_function(train_rows, size, full_size)
        };
        let (model, report) = train_functoken(vocab, &arm_rows, cfg)?;
        let records = eval_functoken(&model, vocab, registry, eval_rows, cfg.max_new)?;
        let summary = summarize(&records)?;
        out.push(SizeStudyRow {
            per_api: size,
            n_train: arm_rows.len(),
            epochs: report.epoch_losses.len(),
            final_train_loss: *report.epoch_losses.last().unwrap(),
            function_accuracy: summary.function_accuracy,
            exact_tolerant_accuracy: summary.exact_tolerant_accuracy,
        });
    }
    Ok(out)
}

/// One arm of the full-vs-LoRA comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoraStudyArm {
    pub arm: String,
    pub trainable_params: usize,
    pub function_accuracy: f64,
    pub exact_tolerant_accuracy: f64,
    pub final_train_loss: f64,
}

/// Full-vs-LoRA study report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoraStudyReport {
    pub full: LoraStudyArm,
    pub lora: LoraStudyArm,
    /// LoRA trainable parameters over full parameter count.
    pub trainable_fraction: f64,
    /// Base weights bitwise identical before and after adapter training.
    pub base_frozen: bool,
    /// `full.function_accuracy − lora.function_accuracy` (sign reported,
    /// not asserted).
    pub accuracy_delta: f64,
}

fn bitwise_equal(a: &Model<f32>, b: &Model<f32>) -> bool {
    let ta = a.tensors();
    let tb = b.tensors();
    ta.len() == tb.len()
        && ta.iter().zip(&tb).all(|((na, ra), (nb, rb))| {
            na == nb
                && ra.as_slice().len() == rb.as_slice().len()
                && ra
                    .as_slice()
                    .iter()
                    .zip(rb.as_slice())
                    .all(|(x, y)| x.to_bits() == y.to_bits())
        })
}

/// Fine-tunes a shared starting checkpoint on `tune_rows` twice — once with
/// every parameter trainable, once with frozen base weights and LoRA
/// adapters — and compares the two on `eval_rows`. `base_rows` trains the
/// starting checkpoint (the stand-in for a pretrained base model).
pub fn lora_study(
    registry: &Registry,
    vocab: &Vocabulary,
    base_rows: &[TrainingExample],
    tune_rows: &[TrainingExample],
    eval_rows: &[TrainingExample],
    base_cfg: &StudyConfig,
    tune_cfg: &StudyConfig,
    lora_cfg: &LoraConfig,
) -> Result<LoraStudyReport, BenchError> {
    // The base model's context must already fit the tuning sequences.
    let base_examples: Vec<TrainExample> =
        base_rows.iter().map(|r| functoken_example(vocab, r)).collect();
    let tune_examples: Vec<TrainExample> =
        tune_rows.iter().map(|r| functoken_example(vocab, r)).collect();
    let ctx = fitted_context_len(&tune_examples, tune_cfg.max_new)
        .max(fitted_context_len(&base_examples, base_cfg.max_new));
    let mcfg = base_cfg.model_config(vocab, ctx);
    let mut base = Model::<f32>::init(&mcfg)?;
    let weights = token_weights(vocab, base_cfg.omega);
    train_with(
        &mut base,
        &base_examples,
        &weights,
        &base_cfg.train_config(base_rows.len()),
        |_, _| {},
    )?;

    let tune_weights = token_weights(vocab, tune_cfg.omega);
    let tune_train_cfg = tune_cfg.train_config(tune_rows.len());

    // Full-parameter arm.
    let mut full_model = base.clone();
    let full_report = train_with(
        &mut full_model,
        &tune_examples,
        &tune_weights,
        &tune_train_cfg,
        |_, _| {},
    )?;
    let full_records = eval_functoken(&full_model, vocab, registry, eval_rows, tune_cfg.max_new)?;
    let full_summary = summarize(&full_records)?;

    // Adapter arm on the frozen base.
    let base_before = base.clone();
    let mut adapters = LoraAdapters::<f32>::init(&mcfg, lora_cfg)?;
    let lora_report = train_lora(&base, &mut adapters, &tune_examples, &tune_weights, &tune_train_cfg)?;
    let base_frozen = bitwise_equal(&base, &base_before);
    let merged = adapters.merge(&base);
    let lora_records = eval_functoken(&merged, vocab, registry, eval_rows, tune_cfg.max_new)?;
    let lora_summary = summarize(&lora_records)?;

    let full_arm = LoraStudyArm {
        arm: "full".into(),
        trainable_params: full_model.n_params(),
        function_accuracy: full_summary.function_accuracy,
        exact_tolerant_accuracy: full_summary.exact_tolerant_accuracy,
        final_train_loss: *full_report.epoch_losses.last().unwrap(),
    };
    let lora_arm = LoraStudyArm {
        arm: "lora".into(),
        trainable_params: adapters.n_params(),
        function_accuracy: lora_summary.function_accuracy,
        exact_tolerant_accuracy: lora_summary.exact_tolerant_accuracy,
        final_train_loss: *lora_report.epoch_losses.last().unwrap(),
    };
    Ok(LoraStudyReport {
        trainable_fraction: lora_arm.trainable_params as f64 / full_arm.trainable_params as f64,
        accuracy_delta: full_arm.function_accuracy - lora_arm.function_accuracy,
        base_frozen,
        full: full_arm,
        lora: lora_arm,
    })
}

/// One convergence curve of the weighted-loss study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightCurve {
    pub omega: f64,
    /// Unweighted validation loss after each epoch.
    pub val_losses: Vec<f64>,
    pub function_accuracy: f64,
    pub exact_tolerant_accuracy: f64,
}

/// Trains one model per loss weight and records the unweighted validation
/// loss after every epoch. Validation is always measured with unit weights
/// regardless of the surrogate training weights.
pub fn weight_study(
    registry: &Registry,
    vocab: &Vocabulary,
    train_rows: &[TrainingExample],
    val_rows: &[TrainingExample],
    eval_rows: &[TrainingExample],
    omegas: &[f64],
    cfg: &StudyConfig,
) -> Result<Vec<WeightCurve>, BenchError> {
    if !omegas.contains(&1.0) {
        return Err(BenchError::Invalid(
            "weight study requires the ω=1 baseline".into(),
        ));
    }
    let val_examples: Vec<TrainExample> =
        val_rows.iter().map(|r| functoken_example(vocab, r)).collect();
    let unit_weights = vec![1.0f64; vocab.total_size()];
    let mut out = Vec::new();
    for &omega in omegas {
        let mut run_cfg = cfg.clone();
        run_cfg.omega = omega;
        let mut val_losses = Vec::new();
        let (model, _) = train_functoken_with(vocab, train_rows, &run_cfg, |_, m| {
            let loss = mean_loss(m, &val_examples, &unit_weights).expect("validation loss");
            val_losses.push(loss);
        })?;
        let records = eval_functoken(&model, vocab, registry, eval_rows, cfg.max_new)?;
        let summary = summarize(&records)?;
        out.push(WeightCurve {
            omega,
            val_losses,
            function_accuracy: summary.function_accuracy,
            exact_tolerant_accuracy: summary.exact_tolerant_accuracy,
        });
    }
    Ok(out)
}

/// CSV rendering of one weight curve: `epoch,val_loss` rows.
pub fn weight_curve_csv(curve: &WeightCurve) -> String {
    let mut s = String::from("epoch,val_loss\n");
    for (epoch, loss) in curve.val_losses.iter().enumerate() {
        s.push_str(&format!("{epoch},{loss}\n"));
    }
    s
}
