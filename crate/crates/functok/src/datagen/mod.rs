//! Synthetic dataset generation: template-filled positive queries per
//! function, off-domain negatives targeting the irrelevant function,
//! rule-based verification with bounded regeneration, deterministic
//! train/val/eval splitting by unique query string, and JSONL + manifest
//! output under a directory keyed by (per-API count, seed).

pub mod templates;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use thiserror::Error;

use crate::grammar::{self, ArgValue, CallExpr, Response};
use crate::prompts;
use crate::registry::{FunctionSpec, ParamSpec, Registry};
use templates::{Domain, Template, NEGATIVE_TEMPLATES, PREFIXES, SUFFIXES};

#[derive(Debug, Error)]
pub enum DatagenError {
    #[error("no query templates for function `{0}`")]
    NoTemplates(String),
    #[error("verification kept failing for function `{function}` after {attempts} attempts: {last_reason}")]
    RetryExhausted {
        function: String,
        attempts: usize,
        last_reason: String,
    },
    #[error("invalid split fractions: {0}")]
    InvalidSplit(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("record decode error: {0}")]
    Decode(#[from] serde_json::Error),
}

/// Maximum verification retries per example before giving up.
pub const MAX_RETRIES: usize = 5;

/// Dataset split membership.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Eval,
}

/// Split fractions; must sum to 1.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SplitFractions {
    pub train: f64,
    pub val: f64,
    pub eval: f64,
}

impl Default for SplitFractions {
    fn default() -> Self {
        SplitFractions {
            train: 0.85,
            val: 0.05,
            eval: 0.10,
        }
    }
}

impl SplitFractions {
    pub fn check(&self) -> Result<(), DatagenError> {
        let sum = self.train + self.val + self.eval;
        if (sum - 1.0).abs() > 1e-9 || self.train < 0.0 || self.val < 0.0 || self.eval < 0.0 {
            return Err(DatagenError::InvalidSplit(format!(
                "fractions {self:?} must be non-negative and sum to 1"
            )));
        }
        Ok(())
    }
}

/// One dataset record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingExample {
    pub query: String,
    pub response: String,
    pub description_block: String,
    pub target_function: String,
    pub split: Split,
    pub is_negative: bool,
}

/// Verifier bookkeeping for a generation run.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct VerifierStats {
    pub passed: usize,
    pub failed_attempts: usize,
    pub regenerated: usize,
}

/// Summary of a generated dataset.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub per_api: usize,
    pub negative_count: usize,
    pub seed: u64,
    pub m_positive: usize,
    pub n_negative: usize,
    pub per_function: Vec<(String, usize)>,
    pub split_counts: BTreeMap<Split, usize>,
    pub verifier: VerifierStats,
    pub files: Vec<String>,
}

/// Why an example failed verification.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyOutcome {
    pub ok: bool,
    pub reasons: Vec<String>,
}

fn derived_seed(base: u64, stream: u64) -> u64 {
    base.wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Samples one slot: the query surface text and the argument value.
fn sample_slot<R: Rng>(rng: &mut R, domain: &Domain) -> (String, ArgValue) {
    match domain {
        Domain::Words(options) => {
            let w = options[rng.gen_range(0..options.len())];
            (w.to_string(), ArgValue::Str(w.to_string()))
        }
        Domain::Choice(options) => {
            let w = options[rng.gen_range(0..options.len())];
            (w.to_string(), ArgValue::Str(w.to_string()))
        }
        Domain::Int { lo, hi } => {
            let v = rng.gen_range(*lo..=*hi);
            (v.to_string(), ArgValue::Int(v))
        }
        Domain::Bool(options) => {
            let (surface, value) = options[rng.gen_range(0..options.len())];
            (surface.to_string(), ArgValue::Bool(value))
        }
        Domain::List { pool, min, max } => {
            let n = rng.gen_range(*min..=*max).min(pool.len());
            let mut picked: Vec<&str> = Vec::new();
            while picked.len() < n {
                let item = pool[rng.gen_range(0..pool.len())];
                if !picked.contains(&item) {
                    picked.push(item);
                }
            }
            let surface = picked.join(" and ");
            let value = ArgValue::List(
                picked.iter().map(|s| ArgValue::Str(s.to_string())).collect(),
            );
            (surface, value)
        }
    }
}

/// Fills a template: returns the affixed query plus (param, value) bindings.
fn fill_template<R: Rng>(rng: &mut R, template: &Template) -> (String, Vec<(String, ArgValue)>) {
    let mut query = template.pattern.to_string();
    let mut args = Vec::new();
    for (i, slot) in template.slots.iter().enumerate() {
        let (surface, value) = sample_slot(rng, &slot.domain);
        query = query.replace(&format!("{{{i}}}"), &surface);
        if slot.param != "_" {
            args.push((slot.param.to_string(), value));
        }
    }
    let prefix = PREFIXES[rng.gen_range(0..PREFIXES.len())];
    let suffix = SUFFIXES[rng.gen_range(0..SUFFIXES.len())];
    (format!("{prefix}{query}{suffix}"), args)
}

fn call_for(registry: &Registry, function: &str, named: Vec<(String, ArgValue)>) -> CallExpr {
    let token = registry
        .token_for(function)
        .expect("template bank only names registered functions");
    CallExpr {
        token,
        positional: Vec::new(),
        named,
    }
}

fn canonical_response(registry: &Registry, calls: Vec<CallExpr>) -> String {
    let response = Response {
        calls,
        terminated: true,
    };
    grammar::render(&grammar::canonicalize(&response, registry))
}

/// Generates `count` verified positive examples for one function.
/// Split is assigned later by [`build_dataset`]; standalone callers get
/// `Split::Train`.
pub fn gen_positive(
    registry: &Registry,
    spec: &FunctionSpec,
    count: usize,
    seed: u64,
) -> Result<Vec<TrainingExample>, DatagenError> {
    let mut stats = VerifierStats::default();
    gen_positive_tracked(registry, spec, count, seed, &mut stats)
}

fn gen_positive_tracked(
    registry: &Registry,
    spec: &FunctionSpec,
    count: usize,
    seed: u64,
    stats: &mut VerifierStats,
) -> Result<Vec<TrainingExample>, DatagenError> {
    let bank = templates::templates_for(&spec.name)
        .ok_or_else(|| DatagenError::NoTemplates(spec.name.clone()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        out.push(regenerate(registry, &spec.name, stats, || {
            let template = &bank[rng.gen_range(0..bank.len())];
            let (query, args) = fill_template(&mut rng, template);
            let response = canonical_response(registry, vec![call_for(registry, &spec.name, args)]);
            TrainingExample {
                query,
                response,
                description_block: prompts::description_block(&spec.description),
                target_function: spec.name.clone(),
                split: Split::Train,
                is_negative: false,
            }
        })?);
    }
    Ok(out)
}

/// Generates `count` verified negative examples from the off-domain bank.
pub fn gen_negative(
    registry: &Registry,
    count: usize,
    seed: u64,
) -> Result<Vec<TrainingExample>, DatagenError> {
    let mut stats = VerifierStats::default();
    gen_negative_tracked(registry, count, seed, &mut stats)
}

fn gen_negative_tracked(
    registry: &Registry,
    count: usize,
    seed: u64,
    stats: &mut VerifierStats,
) -> Result<Vec<TrainingExample>, DatagenError> {
    let irrelevant_index = registry
        .irrelevant_index()
        .expect("builtin registry includes the irrelevant function");
    let irrelevant = registry.spec_at(irrelevant_index).unwrap().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        out.push(regenerate(registry, &irrelevant.name, stats, || {
            let template = &NEGATIVE_TEMPLATES[rng.gen_range(0..NEGATIVE_TEMPLATES.len())];
            let (query, _) = fill_template(&mut rng, template);
            let response =
                canonical_response(registry, vec![call_for(registry, &irrelevant.name, vec![])]);
            // The description block shows one randomly chosen function's
            // description plus the irrelevant function's own.
            let shown = registry
                .spec_at(rng.gen_range(0..registry.len()))
                .unwrap();
            let block = prompts::description_block(&format!(
                "{} {}",
                shown.description, irrelevant.description
            ));
            TrainingExample {
                query,
                response,
                description_block: block,
                target_function: irrelevant.name.clone(),
                split: Split::Train,
                is_negative: true,
            }
        })?);
    }
    Ok(out)
}

/// Runs `make` until the produced example verifies, up to [`MAX_RETRIES`].
fn regenerate<F>(
    registry: &Registry,
    function: &str,
    stats: &mut VerifierStats,
    mut make: F,
) -> Result<TrainingExample, DatagenError>
where
    F: FnMut() -> TrainingExample,
{
    let mut last_reason = String::new();
    for attempt in 0..MAX_RETRIES {
        let example = make();
        let outcome = verify(&example, registry);
        if outcome.ok {
            stats.passed += 1;
            if attempt > 0 {
                stats.regenerated += 1;
            }
            return Ok(example);
        }
        stats.failed_attempts += 1;
        last_reason = outcome.reasons.join("; ");
    }
    Err(DatagenError::RetryExhausted {
        function: function.to_string(),
        attempts: MAX_RETRIES,
        last_reason,
    })
}

fn render_scalar(value: &ArgValue) -> Option<String> {
    match value {
        ArgValue::Str(s) => Some(s.clone()),
        ArgValue::Int(v) => Some(v.to_string()),
        ArgValue::Float(v) => Some(format!("{v:?}")),
        _ => None,
    }
}

fn is_default(param: &ParamSpec, value: &ArgValue) -> bool {
    param
        .default
        .as_ref()
        .map(|d| &ArgValue::from_literal(d) == value)
        .unwrap_or(false)
}

/// Query-consistency rule: every bound non-default string/integer/float/list
/// argument must appear verbatim in the query. Booleans and nulls are exempt
/// (their surface wording varies); nested calls are checked recursively
/// against the nested function's spec.
fn check_consistency(
    registry: &Registry,
    call: &CallExpr,
    query: &str,
    reasons: &mut Vec<String>,
) {
    let spec = match registry.lookup_token(&call.token) {
        Ok(s) => s,
        Err(_) => return, // unknown token already reported by validation
    };
    let mut bound: Vec<(&ParamSpec, &ArgValue)> = Vec::new();
    for (i, v) in call.positional.iter().enumerate() {
        if let Some(p) = spec.params.get(i) {
            bound.push((p, v));
        }
    }
    for (name, v) in &call.named {
        if let Some(p) = spec.params.iter().find(|p| &p.name == name) {
            bound.push((p, v));
        }
    }
    for (param, value) in bound {
        if is_default(param, value) {
            continue;
        }
        match value {
            ArgValue::List(items) => {
                for item in items {
                    if let Some(s) = render_scalar(item) {
                        if !query.contains(&s) {
                            reasons.push(format!(
                                "list item `{s}` for `{}` missing from query",
                                param.name
                            ));
                        }
                    }
                }
            }
            ArgValue::Nested(inner) => check_consistency(registry, inner, query, reasons),
            other => {
                if let Some(s) = render_scalar(other) {
                    if !query.contains(&s) {
                        reasons.push(format!(
                            "value `{s}` for `{}` missing from query",
                            param.name
                        ));
                    }
                }
            }
        }
    }
}

/// Rule-based binary verification: parse, validate with an empty report,
/// target-token match, and query consistency.
pub fn verify(example: &TrainingExample, registry: &Registry) -> VerifyOutcome {
    let mut reasons = Vec::new();
    let response = match grammar::parse_response(&example.response, registry) {
        Ok(r) => r,
        Err(e) => {
            return VerifyOutcome {
                ok: false,
                reasons: vec![format!("parse: {e}")],
            }
        }
    };
    let report = grammar::validate_response(&response, registry);
    for v in &report.violations {
        reasons.push(format!("validate: {v}"));
    }
    match response.calls.first() {
        Some(first) => {
            let selected = registry
                .lookup_token(&first.token)
                .map(|s| s.name.clone())
                .unwrap_or_default();
            if selected != example.target_function {
                reasons.push(format!(
                    "target mismatch: response selects `{selected}`, expected `{}`",
                    example.target_function
                ));
            }
        }
        None => reasons.push("empty response".into()),
    }
    let canonical = grammar::canonicalize(&response, registry);
    for call in &canonical.calls {
        check_consistency(registry, call, &example.query, &mut reasons);
    }
    VerifyOutcome {
        ok: reasons.is_empty(),
        reasons,
    }
}

/// Directory for a generated dataset, keyed by the per-API count and seed.
pub fn dataset_dir(root: &Path, per_api: usize, seed: u64) -> PathBuf {
    root.join(format!("data_v1_per{per_api}_seed{seed}"))
}

/// Directory for a multi-call dataset.
pub fn multi_dir(root: &Path, per_api: usize, seed: u64) -> PathBuf {
    root.join(format!("multi_v1_per{per_api}_seed{seed}"))
}

/// Assigns each unique query string to exactly one split, deterministically
/// under `seed`, in first-appearance order.
fn assign_splits(
    examples: &mut [TrainingExample],
    fractions: &SplitFractions,
    seed: u64,
) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assigned: HashMap<String, Split> = HashMap::new();
    for ex in examples.iter_mut() {
        let split = *assigned.entry(ex.query.clone()).or_insert_with(|| {
            let u: f64 = rng.gen();
            if u < fractions.train {
                Split::Train
            } else if u < fractions.train + fractions.val {
                Split::Val
            } else {
                Split::Eval
            }
        });
        ex.split = split;
    }
}

/// Writes examples as one JSON object per line.
pub fn write_jsonl<'a>(
    path: &Path,
    examples: impl IntoIterator<Item = &'a TrainingExample>,
) -> Result<(), DatagenError> {
    let mut w = std::io::BufWriter::new(fs::File::create(path)?);
    for ex in examples {
        serde_json::to_writer(&mut w, ex)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a JSONL example file.
pub fn read_jsonl(path: &Path) -> Result<Vec<TrainingExample>, DatagenError> {
    let r = BufReader::new(fs::File::open(path)?);
    let mut out = Vec::new();
    for line in r.lines() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push(serde_json::from_str(&line)?);
        }
    }
    Ok(out)
}

fn write_dataset_files(
    dir: &Path,
    examples: &[TrainingExample],
    manifest: &mut DatasetManifest,
) -> Result<(), DatagenError> {
    fs::create_dir_all(dir)?;
    for (split, file) in [
        (Split::Train, "train.jsonl"),
        (Split::Val, "val.jsonl"),
        (Split::Eval, "eval.jsonl"),
    ] {
        let rows: Vec<&TrainingExample> =
            examples.iter().filter(|e| e.split == split).collect();
        manifest.split_counts.insert(split, rows.len());
        write_jsonl(&dir.join(file), rows)?;
        manifest.files.push(file.to_string());
    }
    let manifest_path = dir.join("manifest.json");
    fs::write(&manifest_path, serde_json::to_string_pretty(manifest)?)?;
    Ok(())
}

/// Generates, verifies, splits, and writes a full dataset. Returns the
/// manifest (also written as `manifest.json` in the dataset directory).
pub fn build_dataset(
    registry: &Registry,
    per_api: usize,
    negative_count: usize,
    fractions: &SplitFractions,
    seed: u64,
    root: &Path,
) -> Result<DatasetManifest, DatagenError> {
    fractions.check()?;
    let irrelevant_index = registry.irrelevant_index();
    let mut stats = VerifierStats::default();
    let mut examples: Vec<TrainingExample> = Vec::new();
    let mut per_function = Vec::new();
    for i in 0..registry.len() {
        if Some(i) == irrelevant_index {
            continue;
        }
        let spec = registry.spec_at(i).unwrap().clone();
        let rows = gen_positive_tracked(
            registry,
            &spec,
            per_api,
            derived_seed(seed, i as u64 + 1),
            &mut stats,
        )?;
        per_function.push((spec.name.clone(), rows.len()));
        examples.extend(rows);
    }
    let m_positive = examples.len();
    let negatives = gen_negative_tracked(
        registry,
        negative_count,
        derived_seed(seed, 0x4E45_47),
        &mut stats,
    )?;
    let n_negative = negatives.len();
    if let Some(i) = irrelevant_index {
        per_function.push((registry.spec_at(i).unwrap().name.clone(), n_negative));
    }
    examples.extend(negatives);
    assign_splits(&mut examples, fractions, derived_seed(seed, 0x5350_4C49_54));
    let mut manifest = DatasetManifest {
        per_api,
        negative_count,
        seed,
        m_positive,
        n_negative,
        per_function,
        split_counts: BTreeMap::new(),
        verifier: stats,
        files: Vec::new(),
    };
    let dir = dataset_dir(root, per_api, seed);
    write_dataset_files(&dir, &examples, &mut manifest)?;
    Ok(manifest)
}

/// One nested-call recipe: the outer call wraps the inner call's result.
struct NestedCombo {
    outer: &'static str,
    inner: &'static str,
    /// `{0}`.. filled from `slots`; outer args listed first.
    pattern: &'static str,
    outer_slots: &'static [templates::Slot],
    /// Outer parameter that receives the nested call.
    nest_param: &'static str,
    inner_slots: &'static [templates::Slot],
}

const NESTED_COMBOS: [NestedCombo; 3] = [
    NestedCombo {
        outer: "send_text_message",
        inner: "get_weather_forecast",
        pattern: "text {0} the weather forecast for {1}",
        outer_slots: &[templates::Slot {
            param: "phone_number",
            domain: Domain::Words(&["555-0123", "555-0148", "555-0199", "212-555-0154"]),
        }],
        nest_param: "message",
        inner_slots: &[templates::Slot {
            param: "location",
            domain: Domain::Words(&["Boston", "Seattle", "Denver", "Miami"]),
        }],
    },
    NestedCombo {
        outer: "send_email",
        inner: "get_trending_news",
        pattern: "email {0} the trending {1} news with subject {2}",
        outer_slots: &[
            templates::Slot {
                param: "recipient",
                domain: Domain::Words(&["alice@example.com", "bob@example.com", "carol@example.com"]),
            },
            templates::Slot {
                param: "subject",
                domain: Domain::Words(&["Daily digest", "News roundup", "Morning briefing"]),
            },
        ],
        nest_param: "body",
        inner_slots: &[templates::Slot {
            param: "category",
            domain: Domain::Words(&["technology", "sports", "business", "science"]),
        }],
    },
    NestedCombo {
        outer: "send_text_message",
        inner: "search_web",
        pattern: "text {0} the top web result for {1}",
        outer_slots: &[templates::Slot {
            param: "phone_number",
            domain: Domain::Words(&["555-0162", "202-555-0117", "415-555-0186"]),
        }],
        nest_param: "message",
        inner_slots: &[templates::Slot {
            param: "query",
            domain: Domain::Words(&[
                "rust programming tutorials",
                "best hiking trails",
                "electric car reviews",
            ]),
        }],
    },
];

fn sample_nested<R: Rng>(rng: &mut R, registry: &Registry) -> TrainingExample {
    let combo = &NESTED_COMBOS[rng.gen_range(0..NESTED_COMBOS.len())];
    let mut query = combo.pattern.to_string();
    let mut slot_idx = 0;
    let mut outer_args: Vec<(String, ArgValue)> = Vec::new();
    for slot in combo.outer_slots {
        let (surface, value) = sample_slot(rng, &slot.domain);
        query = query.replace(&format!("{{{slot_idx}}}"), &surface);
        // Pattern order interleaves outer and inner slots: outer slot 0,
        // inner slots, then remaining outer slots.
        outer_args.push((slot.param.to_string(), value));
        slot_idx += if slot_idx == 0 { combo.inner_slots.len() + 1 } else { 1 };
    }
    let mut inner_args: Vec<(String, ArgValue)> = Vec::new();
    for (j, slot) in combo.inner_slots.iter().enumerate() {
        let (surface, value) = sample_slot(rng, &slot.domain);
        query = query.replace(&format!("{{{}}}", j + 1), &surface);
        inner_args.push((slot.param.to_string(), value));
    }
    let inner_call = call_for(registry, combo.inner, inner_args);
    outer_args.push((
        combo.nest_param.to_string(),
        ArgValue::Nested(Box::new(inner_call)),
    ));
    let prefix = PREFIXES[rng.gen_range(0..PREFIXES.len())];
    let suffix = SUFFIXES[rng.gen_range(0..SUFFIXES.len())];
    let query = format!("{prefix}{query}{suffix}");
    let outer_spec = registry.lookup_name(combo.outer).unwrap();
    let response = canonical_response(registry, vec![call_for(registry, combo.outer, outer_args)]);
    TrainingExample {
        query,
        response,
        description_block: prompts::description_block(&outer_spec.description),
        target_function: combo.outer.to_string(),
        split: Split::Train,
        is_negative: false,
    }
}

/// Generates parallel-call and nested-call datasets with the same
/// verification loop and writes them under the multi-call directory.
pub fn gen_multi(
    registry: &Registry,
    per_api: usize,
    seed: u64,
    root: &Path,
) -> Result<DatasetManifest, DatagenError> {
    if per_api == 0 {
        return Err(DatagenError::InvalidSplit("per_api must be ≥ 1".into()));
    }
    let irrelevant_index = registry.irrelevant_index();
    let functions: Vec<FunctionSpec> = (0..registry.len())
        .filter(|&i| Some(i) != irrelevant_index)
        .map(|i| registry.spec_at(i).unwrap().clone())
        .collect();
    let mut stats = VerifierStats::default();
    let mut examples = Vec::new();
    // Parallel: two independent sub-queries joined in one query.
    let mut rng = ChaCha8Rng::seed_from_u64(derived_seed(seed, 0x50_41_52));
    for (fi, spec) in functions.iter().enumerate() {
        let bank = templates::templates_for(&spec.name)
            .ok_or_else(|| DatagenError::NoTemplates(spec.name.clone()))?;
        for _ in 0..per_api {
            let other = &functions[(fi + 1 + rng.gen_range(0..functions.len() - 1)) % functions.len()];
            let other_bank = templates::templates_for(&other.name)
                .ok_or_else(|| DatagenError::NoTemplates(other.name.clone()))?;
            let example = regenerate(registry, &spec.name, &mut stats, || {
                let t1 = &bank[rng.gen_range(0..bank.len())];
                let t2 = &other_bank[rng.gen_range(0..other_bank.len())];
                let (q1, a1) = fill_template(&mut rng, t1);
                let (q2, a2) = fill_template(&mut rng, t2);
                let response = canonical_response(
                    registry,
                    vec![
                        call_for(registry, &spec.name, a1),
                        call_for(registry, &other.name, a2),
                    ],
                );
                TrainingExample {
                    query: format!("{q1}, and also {q2}"),
                    response,
                    description_block: prompts::description_block(&format!(
                        "{} {}",
                        spec.description, other.description
                    )),
                    target_function: spec.name.clone(),
                    split: Split::Train,
                    is_negative: false,
                }
            })?;
            examples.push(example);
        }
    }
    let m_parallel = examples.len();
    // Nested: one function's output feeding another's argument.
    let mut rng = ChaCha8Rng::seed_from_u64(derived_seed(seed, 0x4E_45_53));
    for _ in 0..per_api {
        let example = regenerate(registry, "nested", &mut stats, || {
            sample_nested(&mut rng, registry)
        })?;
        examples.push(example);
    }
    assign_splits(
        &mut examples,
        &SplitFractions::default(),
        derived_seed(seed, 0x5350_4C49_54),
    );
    let mut manifest = DatasetManifest {
        per_api,
        negative_count: 0,
        seed,
        m_positive: examples.len(),
        n_negative: 0,
        per_function: vec![
            ("parallel".into(), m_parallel),
            ("nested".into(), examples.len() - m_parallel),
        ],
        split_counts: BTreeMap::new(),
        verifier: stats,
        files: Vec::new(),
    };
    let dir = multi_dir(root, per_api, seed);
    write_dataset_files(&dir, &examples, &mut manifest)?;
    Ok(manifest)
}

#[cfg(test)]
mod tests;
