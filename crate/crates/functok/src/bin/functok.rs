//! Command-line interface: dataset generation, model training, evaluation,
//! and the benchmark studies.
//!
//! Heavy parameters (model shape, optimizer, benchmark knobs) come from a
//! TOML config file (`--config`); every field is optional and falls back to
//! the built-in defaults printed by `functok config`. The output root is
//! `--out-root`, or the `FUNCTOK_OUT` environment variable, or `./out`.

use clap::{Parser, Subcommand, ValueEnum};
use functok::bench::studies::{
    self, size_study, subsample_per_function, train_functoken, train_rag, weight_curve_csv,
    weight_study, StudyConfig,
};
use functok::bench::{
    context_report, evaluate, records_csv, summaries_csv, summarize, write_csv, BenchError,
    EvalOptions, Pipeline,
};
use functok::datagen::{self, SplitFractions, TrainingExample};
use functok::grammar;
use functok::model::{Checkpoint, LoraConfig};
use functok::registry::Registry;
use functok::retrieval::TfIdfIndex;
use functok::tokenizer::Vocabulary;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "functok",
    version,
    about = "Functional-token function calling: data generation, training, and benchmarks"
)]
struct Cli {
    /// TOML config file; missing keys fall back to built-in defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Root directory for generated datasets, checkpoints, and reports.
    #[arg(long, global = true, env = "FUNCTOK_OUT", default_value = "out")]
    out_root: PathBuf,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum PipelineArg {
    Functoken,
    Rag,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a verified single-call dataset (and optionally the
    /// parallel/nested variant) under the output root.
    GenData {
        /// Positive examples per function.
        #[arg(long, default_value_t = 1000)]
        per_api: usize,
        /// Negative (irrelevant-query) examples; defaults to per-api.
        #[arg(long)]
        negatives: Option<usize>,
        /// Base RNG seed for generation and split assignment.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Also generate the parallel/nested multi-call dataset.
        #[arg(long)]
        multi: bool,
    },
    /// Train a model on a generated dataset directory and save a checkpoint.
    Train {
        /// Dataset directory containing train/val/eval.jsonl.
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum, default_value = "functoken")]
        pipeline: PipelineArg,
        /// Cap on training rows (the rag pipeline's prompts are large;
        /// it defaults to 200 rows unless this is set).
        #[arg(long)]
        limit: Option<usize>,
        /// Checkpoint path; defaults to <out-root>/<pipeline>.ckpt.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a checkpoint on a dataset's eval split and write records CSV.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum, default_value = "functoken")]
        pipeline: PipelineArg,
        /// Cap on evaluated rows.
        #[arg(long)]
        limit: Option<usize>,
        /// Records CSV path; defaults to <out-root>/records_<pipeline>.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run both pipelines plus the context-reduction report.
    Bench {
        /// Functional-token pipeline checkpoint.
        #[arg(long)]
        model: PathBuf,
        /// Retrieval-augmented pipeline checkpoint (skipped if absent).
        #[arg(long)]
        rag_model: Option<PathBuf>,
        #[arg(long)]
        data: PathBuf,
        /// Cap on evaluated rows for the functional-token pipeline.
        #[arg(long)]
        limit: Option<usize>,
        /// Cap on evaluated rows for the rag pipeline (its prompts are ~20x
        /// longer, so this defaults to 100).
        #[arg(long, default_value_t = 100)]
        rag_limit: usize,
    },
    /// Train one model per dataset size and tabulate accuracy.
    SizeStudy {
        /// Full-size dataset directory (the largest size in --sizes).
        #[arg(long)]
        data: PathBuf,
        /// Comma-separated per-API sizes; arms below the maximum are
        /// per-function prefix subsamples of the full training split.
        #[arg(long, default_value = "100,500,1000")]
        sizes: String,
        /// Cap on evaluated rows.
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Compare full fine-tuning against LoRA adapters on a frozen base.
    LoraStudy {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = 16)]
        rank: usize,
        #[arg(long, default_value_t = 32.0)]
        alpha: f64,
        /// Cap on evaluated rows.
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Train one model per loss weight and write convergence curves.
    WeightStudy {
        #[arg(long)]
        data: PathBuf,
        /// Comma-separated weights; must include the 1.0 baseline.
        #[arg(long, default_value = "1,2,4,8")]
        omegas: String,
        /// Cap on evaluated rows.
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Parse a response string and print its canonical form.
    Parse {
        /// Response text, e.g. '<nexa_0>("back")<nexa_end>'.
        response: String,
    },
    /// Print the effective configuration (defaults merged with --config).
    Config,
}

/// Config-file schema; every section and field is optional.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct Config {
    model: ModelSection,
    train: TrainSection,
    bench: BenchSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ModelSection {
    d_model: usize,
    n_layers: usize,
    n_heads: usize,
    mlp_ratio: usize,
    seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct TrainSection {
    batch_size: usize,
    lr: f64,
    warmup_steps: usize,
    shuffle_seed: u64,
    /// Optimizer steps per run; the epoch count is derived per dataset.
    step_budget: usize,
    /// Loss weight on the functional-token and end-token classes.
    omega: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct BenchSection {
    /// Candidates retrieved into each rag prompt.
    top_k: usize,
    /// Generation budget per query.
    max_new: usize,
}

impl Default for ModelSection {
    fn default() -> Self {
        ModelSection {
            d_model: 64,
            n_layers: 2,
            n_heads: 4,
            mlp_ratio: 4,
            seed: 1,
        }
    }
}

impl Default for TrainSection {
    fn default() -> Self {
        TrainSection {
            batch_size: 16,
            lr: 2.5e-3,
            warmup_steps: 20,
            shuffle_seed: 7,
            step_budget: 3400,
            omega: 4.0,
        }
    }
}

impl Default for BenchSection {
    fn default() -> Self {
        BenchSection {
            top_k: 5,
            max_new: 160,
        }
    }
}

impl Default for Config {
    fn default() -> Self {
        Config {
            model: ModelSection::default(),
            train: TrainSection::default(),
            bench: BenchSection::default(),
        }
    }
}

impl Config {
    fn load(path: Option<&Path>) -> Result<Config, String> {
        match path {
            None => Ok(Config::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| format!("cannot read config {}: {e}", p.display()))?;
                toml::from_str(&text).map_err(|e| format!("bad config {}: {e}", p.display()))
            }
        }
    }

    fn study(&self) -> StudyConfig {
        StudyConfig {
            d_model: self.model.d_model,
            n_layers: self.model.n_layers,
            n_heads: self.model.n_heads,
            mlp_ratio: self.model.mlp_ratio,
            model_seed: self.model.seed,
            batch_size: self.train.batch_size,
            lr: self.train.lr,
            warmup_steps: self.train.warmup_steps,
            shuffle_seed: self.train.shuffle_seed,
            step_budget: self.train.step_budget,
            omega: self.train.omega,
            max_new: self.bench.max_new,
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(message) = run(cli) {
        eprintln!("error: {message}");
        std::process::exit(1);
    }
}

fn load_split(dir: &Path, split: &str) -> Result<Vec<TrainingExample>, String> {
    datagen::read_jsonl(&dir.join(format!("{split}.jsonl")))
        .map_err(|e| format!("cannot load {split} split from {}: {e}", dir.display()))
}

fn capped<T: Clone>(rows: &[T], limit: Option<usize>) -> Vec<T> {
    match limit {
        Some(n) => rows.iter().take(n).cloned().collect(),
        None => rows.to_vec(),
    }
}

fn load_checkpoint(path: &Path) -> Result<(Checkpoint, Vocabulary), String> {
    let ckpt = Checkpoint::load(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let vocab: Vocabulary = serde_json::from_value(ckpt.vocab.clone())
        .map_err(|e| format!("checkpoint vocabulary is unreadable: {e}"))?;
    Ok((ckpt, vocab))
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, String> {
    text.split(',')
        .map(|s| s.trim().parse::<T>().map_err(|_| format!("bad {what} list entry: {s}")))
        .collect()
}

fn run(cli: Cli) -> Result<(), String> {
    let cfg = Config::load(cli.config.as_deref())?;
    let registry = Registry::builtin();
    let vocab = Vocabulary::build(registry.len());
    let out_root = cli.out_root.clone();
    let bench_err = |e: BenchError| e.to_string();

    match cli.cmd {
        Cmd::GenData {
            per_api,
            negatives,
            seed,
            multi,
        } => {
            let negatives = negatives.unwrap_or(per_api);
            let manifest = datagen::build_dataset(
                &registry,
                per_api,
                negatives,
                &SplitFractions::default(),
                seed,
                &out_root,
            )
            .map_err(|e| e.to_string())?;
            let dir = datagen::dataset_dir(&out_root, per_api, seed);
            println!(
                "wrote {} positives + {} negatives to {}",
                manifest.m_positive,
                manifest.n_negative,
                dir.display()
            );
            if multi {
                let manifest = datagen::gen_multi(&registry, per_api.min(50), seed, &out_root)
                    .map_err(|e| e.to_string())?;
                let dir = datagen::multi_dir(&out_root, per_api.min(50), seed);
                println!(
                    "wrote {} multi-call examples to {}",
                    manifest.m_positive,
                    dir.display()
                );
            }
            Ok(())
        }
        Cmd::Train {
            data,
            pipeline,
            limit,
            out,
        } => {
            let train_rows = load_split(&data, "train")?;
            let study = cfg.study();
            let (label, model, report) = match pipeline {
                PipelineArg::Functoken => {
                    let rows = capped(&train_rows, limit);
                    let (model, report) =
                        train_functoken(&vocab, &rows, &study).map_err(bench_err)?;
                    ("functoken", model, report)
                }
                PipelineArg::Rag => {
                    let rows = capped(&train_rows, Some(limit.unwrap_or(200)));
                    let index = TfIdfIndex::from_registry(&registry).map_err(|e| e.to_string())?;
                    let (model, report) =
                        train_rag(&vocab, &registry, &index, &rows, cfg.bench.top_k, &study)
                            .map_err(bench_err)?;
                    ("rag", model, report)
                }
            };
            let path = out.unwrap_or_else(|| out_root.join(format!("{label}.ckpt")));
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent).map_err(|e| e.to_string())?;
            }
            let ckpt = Checkpoint {
                model,
                vocab: serde_json::to_value(&vocab).map_err(|e| e.to_string())?,
                metadata: serde_json::json!({
                    "pipeline": label,
                    "dataset": data.display().to_string(),
                    "config": cfg,
                    "report": report,
                }),
            };
            ckpt.save(&path).map_err(|e| e.to_string())?;
            println!(
                "trained {label} model: epoch losses {:?}, saved to {}",
                report.epoch_losses,
                path.display()
            );
            Ok(())
        }
        Cmd::Eval {
            model,
            data,
            pipeline,
            limit,
            out,
        } => {
            let (ckpt, ckpt_vocab) = load_checkpoint(&model)?;
            let rows = capped(&load_split(&data, "eval")?, limit);
            let (pipeline, index) = match pipeline {
                PipelineArg::Functoken => (Pipeline::Functoken, None),
                PipelineArg::Rag => (
                    Pipeline::Rag,
                    Some(TfIdfIndex::from_registry(&registry).map_err(|e| e.to_string())?),
                ),
            };
            let opts = EvalOptions {
                pipeline,
                top_k: cfg.bench.top_k,
                max_new: cfg.bench.max_new,
            };
            let records = evaluate(&ckpt.model, &ckpt_vocab, &registry, index.as_ref(), &rows, &opts)
                .map_err(bench_err)?;
            let summary = summarize(&records).map_err(bench_err)?;
            let path =
                out.unwrap_or_else(|| out_root.join(format!("records_{}.csv", pipeline.label())));
            write_csv(&path, &records_csv(&records).map_err(bench_err)?).map_err(bench_err)?;
            println!(
                "{}: n={} function {:.1}% exact(strict) {:.1}% exact(tolerant) {:.1}% -> {}",
                summary.pipeline,
                summary.n,
                100.0 * summary.function_accuracy,
                100.0 * summary.exact_strict_accuracy,
                100.0 * summary.exact_tolerant_accuracy,
                path.display()
            );
            Ok(())
        }
        Cmd::Bench {
            model,
            rag_model,
            data,
            limit,
            rag_limit,
        } => {
            let (ckpt, ckpt_vocab) = load_checkpoint(&model)?;
            let eval_rows = load_split(&data, "eval")?;
            let index = TfIdfIndex::from_registry(&registry).map_err(|e| e.to_string())?;
            let mut summaries = Vec::new();

            let ft_rows = capped(&eval_rows, limit);
            let ft_opts = EvalOptions {
                pipeline: Pipeline::Functoken,
                top_k: cfg.bench.top_k,
                max_new: cfg.bench.max_new,
            };
            let ft_records = evaluate(&ckpt.model, &ckpt_vocab, &registry, None, &ft_rows, &ft_opts)
                .map_err(bench_err)?;
            write_csv(
                &out_root.join("records_functoken.csv"),
                &records_csv(&ft_records).map_err(bench_err)?,
            )
            .map_err(bench_err)?;
            summaries.push(summarize(&ft_records).map_err(bench_err)?);

            if let Some(rag_path) = rag_model {
                let (rag_ckpt, rag_vocab) = load_checkpoint(&rag_path)?;
                let rag_rows = capped(&eval_rows, Some(rag_limit));
                let rag_opts = EvalOptions {
                    pipeline: Pipeline::Rag,
                    top_k: cfg.bench.top_k,
                    max_new: cfg.bench.max_new,
                };
                let rag_records = evaluate(
                    &rag_ckpt.model,
                    &rag_vocab,
                    &registry,
                    Some(&index),
                    &rag_rows,
                    &rag_opts,
                )
                .map_err(bench_err)?;
                write_csv(
                    &out_root.join("records_rag.csv"),
                    &records_csv(&rag_records).map_err(bench_err)?,
                )
                .map_err(bench_err)?;
                summaries.push(summarize(&rag_records).map_err(bench_err)?);
            }

            let queries: Vec<String> = ft_rows.iter().map(|r| r.query.clone()).collect();
            let report = context_report(&registry, &index, &vocab, &queries, cfg.bench.top_k)
                .map_err(bench_err)?;
            write_csv(
                &out_root.join("context.csv"),
                &functok::bench::rows_csv(&[report.clone()]).map_err(bench_err).unwrap_or_else(
                    |_| String::new(),
                ),
            )
            .ok();
            write_csv(
                &out_root.join("summary.csv"),
                &summaries_csv(&summaries).map_err(bench_err)?,
            )
            .map_err(bench_err)?;
            for s in &summaries {
                println!(
                    "{}: n={} function {:.1}% exact(tolerant) {:.1}% prompt {:.0} tok decode {:.3}s",
                    s.pipeline,
                    s.n,
                    100.0 * s.function_accuracy,
                    100.0 * s.exact_tolerant_accuracy,
                    s.mean_prompt_tokens,
                    s.mean_decode_seconds
                );
            }
            println!(
                "context: k={} functoken {:.0} tok vs rag {:.0} tok, mean reduction {:.1}%",
                report.k,
                report.mean_functoken_tokens,
                report.mean_rag_tokens,
                100.0 * report.mean_reduction
            );
            println!("reports in {}", out_root.display());
            Ok(())
        }
        Cmd::SizeStudy { data, sizes, limit } => {
            let sizes: Vec<usize> = parse_list(&sizes, "size")?;
            let full = *sizes.iter().max().ok_or("empty size list")?;
            let train_rows = load_split(&data, "train")?;
            let eval_rows = capped(&load_split(&data, "eval")?, limit);
            let rows = size_study(
                &registry,
                &vocab,
                &train_rows,
                &eval_rows,
                &sizes,
                full,
                &cfg.study(),
            )
            .map_err(bench_err)?;
            let path = out_root.join("size_study.csv");
            write_csv(&path, &functok::bench::rows_csv(&rows).map_err(bench_err)?)
                .map_err(bench_err)?;
            for row in &rows {
                println!(
                    "per_api {}: n_train {} epochs {} function {:.1}% exact(tolerant) {:.1}%",
                    row.per_api,
                    row.n_train,
                    row.epochs,
                    100.0 * row.function_accuracy,
                    100.0 * row.exact_tolerant_accuracy
                );
            }
            println!("table -> {}", path.display());
            Ok(())
        }
        Cmd::LoraStudy {
            data,
            rank,
            alpha,
            limit,
        } => {
            let train_rows = load_split(&data, "train")?;
            let eval_rows = capped(&load_split(&data, "eval")?, limit);
            // The base checkpoint (pretrained-model stand-in) is trained on a
            // disjoint per-function prefix; both arms then tune on the rest.
            let base_rows = subsample_per_function(&train_rows, 250, 1000);
            let base_set: std::collections::HashSet<&str> =
                base_rows.iter().map(|r| r.query.as_str()).collect();
            let tune_rows: Vec<TrainingExample> = train_rows
                .iter()
                .filter(|r| !base_set.contains(r.query.as_str()))
                .cloned()
                .collect();
            let study = cfg.study();
            let lora_cfg = LoraConfig {
                rank,
                alpha,
                seed: cfg.model.seed + 1,
            };
            let report = studies::lora_study(
                &registry,
                &vocab,
                &base_rows,
                &tune_rows,
                &eval_rows,
                &study,
                &study,
                &lora_cfg,
            )
            .map_err(bench_err)?;
            let path = out_root.join("lora_study.csv");
            write_csv(
                &path,
                &functok::bench::rows_csv(&[report.full.clone(), report.lora.clone()])
                    .map_err(bench_err)?,
            )
            .map_err(bench_err)?;
            println!(
                "full: function {:.1}%  lora: function {:.1}%  delta {:+.1} points",
                100.0 * report.full.function_accuracy,
                100.0 * report.lora.function_accuracy,
                100.0 * report.accuracy_delta
            );
            println!(
                "lora trainable {} / {} params ({:.1}%), base frozen: {}",
                report.lora.trainable_params,
                report.full.trainable_params,
                100.0 * report.trainable_fraction,
                report.base_frozen
            );
            println!("table -> {}", path.display());
            Ok(())
        }
        Cmd::WeightStudy {
            data,
            omegas,
            limit,
        } => {
            let omegas: Vec<f64> = parse_list(&omegas, "omega")?;
            let train_rows = load_split(&data, "train")?;
            let val_rows = load_split(&data, "val")?;
            let eval_rows = capped(&load_split(&data, "eval")?, limit);
            let curves = weight_study(
                &registry,
                &vocab,
                &train_rows,
                &val_rows,
                &eval_rows,
                &omegas,
                &cfg.study(),
            )
            .map_err(bench_err)?;
            for curve in &curves {
                let path = out_root.join(format!("weight_curve_omega{}.csv", curve.omega));
                write_csv(&path, &weight_curve_csv(curve)).map_err(bench_err)?;
                println!(
                    "omega {}: final val loss {:.4} function {:.1}% -> {}",
                    curve.omega,
                    curve.val_losses.last().copied().unwrap_or(f64::NAN),
                    100.0 * curve.function_accuracy,
                    path.display()
                );
            }
            Ok(())
        }
        Cmd::Parse { response } => {
            let parsed = grammar::parse_response(&response, &registry)
                .map_err(|e| format!("parse failed: {e}"))?;
            let report = grammar::validate_response(&parsed, &registry);
            if !report.is_valid() {
                let reasons: Vec<String> =
                    report.violations.iter().map(|v| v.to_string()).collect();
                return Err(format!("validation failed: {}", reasons.join("; ")));
            }
            let canonical = grammar::canonicalize(&parsed, &registry);
            println!("{}", grammar::render(&canonical));
            Ok(())
        }
        Cmd::Config => {
            let text = toml::to_string_pretty(&cfg).map_err(|e| e.to_string())?;
            print!("{text}");
            Ok(())
        }
    }
}
