//! Benchmark harness for the two function-calling pipelines.
//!
//! The `functoken` pipeline sends a short fixed prompt and decodes a
//! functional-token response directly; the `rag` pipeline first retrieves
//! top-k candidate function sources into a much longer prompt. [`evaluate`]
//! runs a trained model over held-out rows and records per-query accuracy,
//! token counts, and per-stage wall-clock timings; [`context_report`]
//! measures the prompt-token reduction between the two prompt styles.
//! Reports are written as CSV so runs can be diffed; timing columns can be
//! stripped for bit-for-bit determinism checks.

pub mod studies;

use crate::datagen::{DatagenError, TrainingExample};
use crate::grammar::{self, GrammarError};
use crate::model::{
    generate_greedy, GenerateOptions, Model, ModelError, TrainExample,
};
use crate::prompts;
use crate::registry::{Registry, RegistryError};
use crate::retrieval::{assemble_rag_prompt, RetrievalError, TfIdfIndex};
use crate::tokenizer::{TokenizerError, Vocabulary};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("model error: {0}")]
    Model(#[from] ModelError),
    #[error("retrieval error: {0}")]
    Retrieval(#[from] RetrievalError),
    #[error("dataset error: {0}")]
    Datagen(#[from] DatagenError),
    #[error("tokenizer error: {0}")]
    Tokenizer(#[from] TokenizerError),
    #[error("registry error: {0}")]
    Registry(#[from] RegistryError),
    #[error("grammar error: {0}")]
    Grammar(#[from] GrammarError),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid benchmark input: {0}")]
    Invalid(String),
}

/// Which prompt/decode style a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pipeline {
    /// Short fixed prompt; the model selects the functional token directly.
    Functoken,
    /// Top-k retrieved candidate sources are embedded in the prompt.
    Rag,
}

impl Pipeline {
    pub fn label(self) -> &'static str {
        match self {
            Pipeline::Functoken => "functoken",
            Pipeline::Rag => "rag",
        }
    }
}

/// Per-query benchmark result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub pipeline: String,
    pub query: String,
    pub target: String,
    pub predicted: String,
    pub target_function: String,
    pub predicted_function: String,
    /// First generated token selects the right function.
    pub function_match: bool,
    /// Terminated via the end token, parsed, and validated cleanly.
    pub format_ok: bool,
    /// `format_ok` and canonically equal to the target.
    pub exact_match_strict: bool,
    /// Canonically equal to the target, format requirements overlooked.
    pub exact_match_tolerant: bool,
    pub prompt_tokens: usize,
    pub generated_tokens: usize,
    pub hit_end: bool,
    pub retrieval_seconds: f64,
    pub encode_seconds: f64,
    pub decode_seconds: f64,
}

/// Aggregate over one pipeline's records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSummary {
    pub pipeline: String,
    pub n: usize,
    pub function_accuracy: f64,
    pub exact_strict_accuracy: f64,
    pub exact_tolerant_accuracy: f64,
    pub format_rate: f64,
    pub end_token_rate: f64,
    pub mean_prompt_tokens: f64,
    pub mean_generated_tokens: f64,
    pub mean_retrieval_seconds: f64,
    pub mean_encode_seconds: f64,
    pub mean_decode_seconds: f64,
}

/// Evaluation knobs shared by both pipelines.
#[derive(Debug, Clone, Copy)]
pub struct EvalOptions {
    pub pipeline: Pipeline,
    /// Candidates retrieved into the prompt (rag only).
    pub top_k: usize,
    /// Generation budget per query.
    pub max_new: usize,
}

/// Training text for one dataset row under the functional-token pipeline,
/// tokenized with a BOS prefix.
pub fn functoken_example(vocab: &Vocabulary, row: &TrainingExample) -> TrainExample {
    let text =
        prompts::functoken_training_text(&row.query, &row.response, &row.description_block);
    let mut ids = vec![vocab.bos_id()];
    ids.extend(vocab.encode(&text));
    TrainExample { ids }
}

/// Training text for one row under the retrieval-augmented pipeline: the
/// top-k candidate prompt for the row's query followed by the same response.
pub fn rag_example(
    vocab: &Vocabulary,
    registry: &Registry,
    index: &TfIdfIndex,
    row: &TrainingExample,
    k: usize,
) -> Result<TrainExample, BenchError> {
    let (prompt, _) = assemble_rag_prompt(registry, index, &row.query, k)?;
    let mut ids = vec![vocab.bos_id()];
    ids.extend(vocab.encode(&prompt));
    ids.extend(vocab.encode(&row.response));
    Ok(TrainExample { ids })
}

/// Per-class loss weights: `omega` on the functional tokens and the end
/// token, 1 everywhere else.
pub fn token_weights(vocab: &Vocabulary, omega: f64) -> Vec<f64> {
    let mut weights = vec![1.0; vocab.total_size()];
    for id in vocab.first_function_id()..=vocab.end_id() {
        weights[id as usize] = omega;
    }
    weights
}

/// Longest token sequence in a set of examples.
pub fn max_example_len(examples: &[TrainExample]) -> usize {
    examples.iter().map(|e| e.ids.len()).max().unwrap_or(0)
}

/// Inference prompt ids for a query under `pipeline`. For the rag pipeline
/// the retrieval stage is timed separately and returned as seconds.
fn prompt_ids(
    vocab: &Vocabulary,
    registry: &Registry,
    index: Option<&TfIdfIndex>,
    query: &str,
    opts: &EvalOptions,
) -> Result<(Vec<u32>, f64, f64), BenchError> {
    let (text, retrieval_seconds) = match opts.pipeline {
        Pipeline::Functoken => (prompts::functoken_prompt(query), 0.0),
        Pipeline::Rag => {
            let index = index.ok_or_else(|| {
                BenchError::Invalid("rag evaluation requires a retrieval index".into())
            })?;
            let t = Instant::now();
            let (prompt, _) = assemble_rag_prompt(registry, index, query, opts.top_k)?;
            (prompt, t.elapsed().as_secs_f64())
        }
    };
    let t = Instant::now();
    let mut ids = vec![vocab.bos_id()];
    ids.extend(vocab.encode(&text));
    Ok((ids, retrieval_seconds, t.elapsed().as_secs_f64()))
}

/// Runs `model` over `rows` and returns one record per row, in input order.
pub fn evaluate(
    model: &Model<f32>,
    vocab: &Vocabulary,
    registry: &Registry,
    index: Option<&TfIdfIndex>,
    rows: &[TrainingExample],
    opts: &EvalOptions,
) -> Result<Vec<BenchRecord>, BenchError> {
    let gen_opts = GenerateOptions {
        max_new: opts.max_new,
        end_id: vocab.end_id(),
        first_token_range: Some((
            vocab.first_function_id(),
            vocab.first_function_id() + vocab.n_functions() as u32,
        )),
    };
    rows.par_iter()
        .map(|row| {
            let (ids, retrieval_seconds, encode_seconds) =
                prompt_ids(vocab, registry, index, &row.query, opts)?;
            let prompt_tokens = ids.len() - 1; // BOS is scaffolding, not prompt text
            let t = Instant::now();
            let generated = generate_greedy(model, &ids, &gen_opts)?;
            let decode_seconds = t.elapsed().as_secs_f64();

            let predicted_index = generated.ids.first().and_then(|&id| vocab.function_index(id));
            let predicted_function = predicted_index
                .and_then(|i| registry.spec_at(i))
                .map(|s| s.name.clone())
                .unwrap_or_default();
            let function_match = !predicted_function.is_empty()
                && predicted_function == row.target_function;

            let mut predicted = vocab.decode(&generated.ids)?;
            if generated.hit_end {
                predicted.push_str("<nexa_end>");
            }
            let target_parsed = grammar::parse_response(&row.response, registry)?;
            let (format_ok, exact_tolerant) = match grammar::parse_response(&predicted, registry)
            {
                Ok(parsed) => {
                    let valid = grammar::validate_response(&parsed, registry).is_valid();
                    let equal = grammar::canonical_equal(&parsed, &target_parsed, registry);
                    (generated.hit_end && valid, equal)
                }
                Err(_) => (false, false),
            };
            Ok(BenchRecord {
                pipeline: opts.pipeline.label().to_string(),
                query: row.query.clone(),
                target: row.response.clone(),
                predicted,
                target_function: row.target_function.clone(),
                predicted_function,
                function_match,
                format_ok,
                exact_match_strict: format_ok && exact_tolerant,
                exact_match_tolerant: exact_tolerant,
                prompt_tokens,
                generated_tokens: generated.ids.len(),
                hit_end: generated.hit_end,
                retrieval_seconds,
                encode_seconds,
                decode_seconds,
            })
        })
        .collect()
}

/// Aggregates records (all from one pipeline) into a summary row.
pub fn summarize(records: &[BenchRecord]) -> Result<BenchSummary, BenchError> {
    if records.is_empty() {
        return Err(BenchError::Invalid("no records to summarize".into()));
    }
    let pipeline = records[0].pipeline.clone();
    if records.iter().any(|r| r.pipeline != pipeline) {
        return Err(BenchError::Invalid(
            "summarize expects records from a single pipeline".into(),
        ));
    }
    let n = records.len();
    let frac = |f: &dyn Fn(&BenchRecord) -> bool| {
        records.iter().filter(|r| f(r)).count() as f64 / n as f64
    };
    let mean = |f: &dyn Fn(&BenchRecord) -> f64| {
        records.iter().map(|r| f(r)).sum::<f64>() / n as f64
    };
    Ok(BenchSummary {
        pipeline,
        n,
        function_accuracy: frac(&|r| r.function_match),
        exact_strict_accuracy: frac(&|r| r.exact_match_strict),
        exact_tolerant_accuracy: frac(&|r| r.exact_match_tolerant),
        format_rate: frac(&|r| r.format_ok),
        end_token_rate: frac(&|r| r.hit_end),
        mean_prompt_tokens: mean(&|r| r.prompt_tokens as f64),
        mean_generated_tokens: mean(&|r| r.generated_tokens as f64),
        mean_retrieval_seconds: mean(&|r| r.retrieval_seconds),
        mean_encode_seconds: mean(&|r| r.encode_seconds),
        mean_decode_seconds: mean(&|r| r.decode_seconds),
    })
}

/// Prompt-token comparison between the two pipelines on a set of queries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextReport {
    pub k: usize,
    pub n_queries: usize,
    pub mean_functoken_tokens: f64,
    pub mean_rag_tokens: f64,
    /// Mean over queries of `1 − functoken_tokens / rag_tokens`.
    pub mean_reduction: f64,
}

/// Measures prompt-token counts for both prompt styles with a shared
/// tokenizer; no model is involved.
pub fn context_report(
    registry: &Registry,
    index: &TfIdfIndex,
    vocab: &Vocabulary,
    queries: &[String],
    k: usize,
) -> Result<ContextReport, BenchError> {
    if queries.is_empty() {
        return Err(BenchError::Invalid("no queries for context report".into()));
    }
    let mut ft_sum = 0.0;
    let mut rag_sum = 0.0;
    let mut reduction_sum = 0.0;
    for query in queries {
        let ft = vocab.count_tokens(&prompts::functoken_prompt(query)) as f64;
        let (rag_prompt, _) = assemble_rag_prompt(registry, index, query, k)?;
        let rag = vocab.count_tokens(&rag_prompt) as f64;
        ft_sum += ft;
        rag_sum += rag;
        reduction_sum += 1.0 - ft / rag;
    }
    let n = queries.len() as f64;
    Ok(ContextReport {
        k,
        n_queries: queries.len(),
        mean_functoken_tokens: ft_sum / n,
        mean_rag_tokens: rag_sum / n,
        mean_reduction: reduction_sum / n,
    })
}

/// Serializes records as CSV text.
pub fn records_csv(records: &[BenchRecord]) -> Result<String, BenchError> {
    rows_csv(records)
}

/// Serializes summaries as CSV text.
pub fn summaries_csv(summaries: &[BenchSummary]) -> Result<String, BenchError> {
    rows_csv(summaries)
}

/// Serializes any uniform row type as CSV text.
pub fn rows_csv<T: Serialize>(rows: &[T]) -> Result<String, BenchError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| BenchError::Invalid(format!("csv flush failed: {e}")))?;
    String::from_utf8(bytes).map_err(|e| BenchError::Invalid(format!("non-utf8 csv: {e}")))
}

/// Writes CSV text to a file, creating parent directories.
pub fn write_csv(path: &Path, csv_text: &str) -> Result<(), BenchError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, csv_text)?;
    Ok(())
}

/// Drops every `*_seconds` column from CSV text. Wall-clock timings vary
/// between runs; everything else must be bit-for-bit reproducible.
pub fn strip_timing_columns(csv_text: &str) -> Result<String, BenchError> {
    let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
    let headers = reader.headers()?.clone();
    let keep: Vec<usize> = headers
        .iter()
        .enumerate()
        .filter(|(_, h)| !h.ends_with("_seconds"))
        .map(|(i, _)| i)
        .collect();
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(keep.iter().map(|&i| &headers[i]))?;
    for record in reader.records() {
        let record = record?;
        writer.write_record(keep.iter().map(|&i| &record[i]))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| BenchError::Invalid(format!("csv flush failed: {e}")))?;
    String::from_utf8(bytes).map_err(|e| BenchError::Invalid(format!("non-utf8 csv: {e}")))
}

#[cfg(test)]
mod tests;
