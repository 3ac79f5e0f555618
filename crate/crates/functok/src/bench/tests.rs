//! Unit tests for the benchmark harness.

use super::studies::{subsample_per_function, weight_curve_csv, StudyConfig, WeightCurve};
use super::*;
use crate::datagen::{self, Split};
use crate::registry::Registry;

fn registry() -> Registry {
    Registry::builtin()
}

fn sample_rows(n: usize) -> Vec<TrainingExample> {
    let reg = registry();
    let mut rows = Vec::new();
    for i in 0..reg.len() {
        if Some(i) == reg.irrelevant_index() {
            continue;
        }
        let spec = reg.spec_at(i).unwrap().clone();
        rows.extend(datagen::gen_positive(&reg, &spec, 2, 5).unwrap());
        if rows.len() >= n {
            break;
        }
    }
    rows.truncate(n);
    rows
}

fn record(pipeline: &str, function_match: bool, exact: bool, prompt_tokens: usize) -> BenchRecord {
    BenchRecord {
        pipeline: pipeline.into(),
        query: "q".into(),
        target: "t".into(),
        predicted: "p".into(),
        target_function: "f".into(),
        predicted_function: if function_match { "f".into() } else { "g".into() },
        function_match,
        format_ok: exact,
        exact_match_strict: exact,
        exact_match_tolerant: exact,
        prompt_tokens,
        generated_tokens: 4,
        hit_end: true,
        retrieval_seconds: 0.25,
        encode_seconds: 0.5,
        decode_seconds: 1.0,
    }
}

#[test]
fn functoken_example_wraps_prompt_response_and_description() {
    let reg = registry();
    let vocab = Vocabulary::build(reg.len());
    let rows = sample_rows(1);
    let ex = functoken_example(&vocab, &rows[0]);
    assert_eq!(ex.ids[0], vocab.bos_id());
    let target_index = reg.token_for(&rows[0].target_function).unwrap().index().unwrap();
    assert!(ex.ids.contains(&vocab.function_id(target_index)));
    assert!(ex.ids.contains(&vocab.end_id()));
    // Round-trips to the exact training text.
    let text = vocab.decode(&ex.ids[1..]).unwrap();
    assert!(text.contains(&rows[0].query));
    assert!(text.contains(&rows[0].response));
}

#[test]
fn rag_example_embeds_candidates_and_response() {
    let reg = registry();
    let vocab = Vocabulary::build(reg.len());
    let index = TfIdfIndex::from_registry(&reg).unwrap();
    let rows = sample_rows(1);
    let ex = rag_example(&vocab, &reg, &index, &rows[0], 5).unwrap();
    let text = vocab.decode(&ex.ids[1..]).unwrap();
    assert!(text.contains("candidate functions"));
    assert!(text.ends_with(&rows[0].response));
}

#[test]
fn token_weights_cover_exactly_the_special_classes() {
    let vocab = Vocabulary::build(21);
    let w = token_weights(&vocab, 4.0);
    assert_eq!(w.len(), vocab.total_size());
    let boosted = w.iter().filter(|&&x| x == 4.0).count();
    assert_eq!(boosted, 22); // 21 function tokens + end token
    assert_eq!(w[vocab.bos_id() as usize], 1.0);
    assert_eq!(w[65], 1.0);
    assert_eq!(w[vocab.end_id() as usize], 4.0);
}

#[test]
fn summary_means_match_hand_computation() {
    let records = vec![
        record("functoken", true, true, 100),
        record("functoken", true, false, 200),
        record("functoken", false, false, 300),
        record("functoken", true, true, 400),
    ];
    let s = summarize(&records).unwrap();
    assert_eq!(s.n, 4);
    assert!((s.function_accuracy - 0.75).abs() < 1e-12);
    assert!((s.exact_strict_accuracy - 0.5).abs() < 1e-12);
    assert!((s.mean_prompt_tokens - 250.0).abs() < 1e-12);
    assert!((s.mean_retrieval_seconds - 0.25).abs() < 1e-12);
    assert!((s.end_token_rate - 1.0).abs() < 1e-12);
}

#[test]
fn summary_rejects_mixed_or_empty_input() {
    assert!(summarize(&[]).is_err());
    let mixed = vec![record("functoken", true, true, 1), record("rag", true, true, 1)];
    assert!(summarize(&mixed).is_err());
}

#[test]
fn context_reduction_grows_with_k() {
    let reg = registry();
    let vocab = Vocabulary::build(reg.len());
    let index = TfIdfIndex::from_registry(&reg).unwrap();
    let queries: Vec<String> = sample_rows(10).into_iter().map(|r| r.query).collect();
    let r1 = context_report(&reg, &index, &vocab, &queries, 1).unwrap();
    let r5 = context_report(&reg, &index, &vocab, &queries, 5).unwrap();
    assert!(r1.mean_reduction < r5.mean_reduction);
    assert!(r5.mean_reduction > 0.5);
    assert!(r5.mean_rag_tokens > r5.mean_functoken_tokens);
}

#[test]
fn context_report_handles_empty_query_via_template_sizes() {
    let reg = registry();
    let vocab = Vocabulary::build(reg.len());
    let index = TfIdfIndex::from_registry(&reg).unwrap();
    let r = context_report(&reg, &index, &vocab, &[String::new()], 5).unwrap();
    // With no query text the ratio is fixed by the two template sizes.
    assert!(r.mean_reduction > 0.0 && r.mean_reduction < 1.0);
    assert!(context_report(&reg, &index, &vocab, &[], 5).is_err());
}

#[test]
fn evaluate_record_invariants_hold_for_an_untrained_model() {
    let reg = registry();
    let vocab = Vocabulary::build(reg.len());
    let rows = sample_rows(3);
    let cfg = crate::model::ModelConfig {
        vocab_size: vocab.total_size(),
        context_len: 512,
        d_model: 16,
        n_layers: 1,
        n_heads: 2,
        mlp_ratio: 2,
        seed: 5,
    };
    let model = Model::<f32>::init(&cfg).unwrap();
    let opts = EvalOptions {
        pipeline: Pipeline::Functoken,
        top_k: 0,
        max_new: 8,
    };
    let records = evaluate(&model, &vocab, &reg, None, &rows, &opts).unwrap();
    assert_eq!(records.len(), rows.len());
    for (record, row) in records.iter().zip(&rows) {
        assert_eq!(record.pipeline, "functoken");
        assert_eq!(record.query, row.query);
        assert!(record.prompt_tokens > 0);
        assert!(record.generated_tokens >= 1);
        // The first token is constrained to the function range, so some
        // function is always named.
        assert!(!record.predicted_function.is_empty());
        assert!(!record.exact_match_strict || record.format_ok);
        assert!(!record.exact_match_strict || record.exact_match_tolerant);
        assert!(!record.exact_match_tolerant || record.function_match);
        assert_eq!(record.retrieval_seconds, 0.0);
    }
}

#[test]
fn evaluate_is_deterministic_apart_from_timings() {
    let reg = registry();
    let vocab = Vocabulary::build(reg.len());
    let rows = sample_rows(2);
    let cfg = crate::model::ModelConfig {
        vocab_size: vocab.total_size(),
        context_len: 512,
        d_model: 16,
        n_layers: 1,
        n_heads: 2,
        mlp_ratio: 2,
        seed: 5,
    };
    let model = Model::<f32>::init(&cfg).unwrap();
    let opts = EvalOptions {
        pipeline: Pipeline::Functoken,
        top_k: 0,
        max_new: 6,
    };
    let a = evaluate(&model, &vocab, &reg, None, &rows, &opts).unwrap();
    let b = evaluate(&model, &vocab, &reg, None, &rows, &opts).unwrap();
    let strip = |records: &[BenchRecord]| {
        strip_timing_columns(&records_csv(records).unwrap()).unwrap()
    };
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn rag_evaluation_requires_an_index() {
    let reg = registry();
    let vocab = Vocabulary::build(reg.len());
    let rows = sample_rows(1);
    let cfg = crate::model::ModelConfig {
        vocab_size: vocab.total_size(),
        context_len: 8192,
        d_model: 16,
        n_layers: 1,
        n_heads: 2,
        mlp_ratio: 2,
        seed: 5,
    };
    let model = Model::<f32>::init(&cfg).unwrap();
    let opts = EvalOptions {
        pipeline: Pipeline::Rag,
        top_k: 5,
        max_new: 4,
    };
    assert!(evaluate(&model, &vocab, &reg, None, &rows, &opts).is_err());
    let index = TfIdfIndex::from_registry(&reg).unwrap();
    let records = evaluate(&model, &vocab, &reg, Some(&index), &rows, &opts).unwrap();
    assert_eq!(records[0].pipeline, "rag");
    assert!(records[0].prompt_tokens > 1000);
}

#[test]
fn timing_columns_strip_cleanly() {
    let records = vec![record("functoken", true, true, 10)];
    let csv_text = records_csv(&records).unwrap();
    assert!(csv_text.contains("retrieval_seconds"));
    let stripped = strip_timing_columns(&csv_text).unwrap();
    assert!(!stripped.contains("_seconds"));
    assert!(stripped.contains("prompt_tokens"));
    assert!(stripped.lines().count() == csv_text.lines().count());
}

#[test]
fn subsample_keeps_a_per_function_prefix() {
    let mut rows = Vec::new();
    for i in 0..10 {
        for name in ["a", "b"] {
            rows.push(TrainingExample {
                query: format!("{name}{i}"),
                response: String::new(),
                description_block: String::new(),
                target_function: name.into(),
                split: Split::Train,
                is_negative: false,
            });
        }
    }
    let sub = subsample_per_function(&rows, 100, 1000);
    assert_eq!(sub.len(), 2);
    assert_eq!(sub[0].query, "a0");
    assert_eq!(sub[1].query, "b0");
    let half = subsample_per_function(&rows, 500, 1000);
    assert_eq!(half.len(), 10);
    assert!(half.iter().filter(|r| r.target_function == "a").count() == 5);
    let all = subsample_per_function(&rows, 1000, 1000);
    assert_eq!(all.len(), rows.len());
}

#[test]
fn step_budget_derives_epoch_counts() {
    let cfg = StudyConfig {
        d_model: 16,
        n_layers: 1,
        n_heads: 2,
        mlp_ratio: 2,
        model_seed: 1,
        batch_size: 16,
        lr: 1e-3,
        warmup_steps: 5,
        shuffle_seed: 2,
        step_budget: 100,
        omega: 4.0,
        max_new: 8,
    };
    // 160 rows -> 10 steps/epoch -> 10 epochs to reach 100 steps.
    assert_eq!(cfg.epochs_for(160), 10);
    // 1600 rows -> 100 steps/epoch -> single epoch suffices.
    assert_eq!(cfg.epochs_for(1600), 1);
    assert_eq!(cfg.epochs_for(1), 100);
    assert_eq!(cfg.train_config(160).epochs, 10);
}

#[test]
fn weight_curve_csv_lists_one_row_per_epoch() {
    let curve = WeightCurve {
        omega: 2.0,
        val_losses: vec![1.5, 1.25],
        function_accuracy: 0.5,
        exact_tolerant_accuracy: 0.25,
    };
    let csv_text = weight_curve_csv(&curve);
    let lines: Vec<&str> = csv_text.lines().collect();
    assert_eq!(lines, vec!["epoch,val_loss", "0,1.5", "1,1.25"]);
}
