//! Unit tests for dataset generation, verification, and file output.

use super::*;
use crate::grammar;
use crate::registry::Registry;
use std::collections::{HashMap as Map, HashSet};

fn registry() -> Registry {
    Registry::builtin()
}

#[test]
fn every_function_has_at_least_five_templates() {
    let reg = registry();
    for i in 0..reg.len() {
        let name = &reg.spec_at(i).unwrap().name;
        if Some(i) == reg.irrelevant_index() {
            assert!(templates::templates_for(name).is_none());
            continue;
        }
        let bank = templates::templates_for(name)
            .unwrap_or_else(|| panic!("no templates for {name}"));
        assert!(bank.len() >= 5, "{name} has {} templates", bank.len());
    }
    assert!(NEGATIVE_TEMPLATES.len() >= 20);
}

#[test]
fn gen_positive_produces_verified_examples() {
    let reg = registry();
    let spec = reg.lookup_name("take_a_photo").unwrap().clone();
    let rows = gen_positive(&reg, &spec, 3, 7).unwrap();
    assert_eq!(rows.len(), 3);
    for row in &rows {
        assert!(row.response.starts_with("<nexa_0>("), "{}", row.response);
        assert!(row.response.ends_with("<nexa_end>"));
        let outcome = verify(row, &reg);
        assert!(outcome.ok, "{:?}", outcome.reasons);
        assert!(!row.is_negative);
        assert_eq!(row.target_function, "take_a_photo");
    }
}

#[test]
fn gen_positive_zero_count_is_empty() {
    let reg = registry();
    let spec = reg.lookup_name("search_web").unwrap().clone();
    assert!(gen_positive(&reg, &spec, 0, 1).unwrap().is_empty());
}

#[test]
fn gen_positive_rejects_unknown_function() {
    let reg = registry();
    let mut spec = reg.lookup_name("search_web").unwrap().clone();
    spec.name = "not_in_the_bank".into();
    assert!(matches!(
        gen_positive(&reg, &spec, 1, 1),
        Err(DatagenError::NoTemplates(_))
    ));
}

#[test]
fn all_functions_generate_cleanly() {
    let reg = registry();
    for i in 0..reg.len() {
        if Some(i) == reg.irrelevant_index() {
            continue;
        }
        let spec = reg.spec_at(i).unwrap().clone();
        let rows = gen_positive(&reg, &spec, 25, 11).unwrap();
        assert_eq!(rows.len(), 25);
        for row in &rows {
            let outcome = verify(row, &reg);
            assert!(outcome.ok, "{}: {:?}", spec.name, outcome.reasons);
        }
    }
}

#[test]
fn negatives_target_the_irrelevant_function() {
    let reg = registry();
    let rows = gen_negative(&reg, 50, 3).unwrap();
    assert_eq!(rows.len(), 50);
    let irr = reg.irrelevant_index().unwrap();
    let expected = format!("<nexa_{irr}>()<nexa_end>");
    for row in &rows {
        assert!(row.is_negative);
        assert_eq!(row.response, expected);
        assert!(verify(row, &reg).ok);
        // Block shows some function description plus the irrelevant one.
        assert!(row.description_block.contains("not related to any"));
    }
}

#[test]
fn negative_seeds_change_the_query_multiset() {
    let reg = registry();
    let a: Vec<String> = gen_negative(&reg, 40, 1)
        .unwrap()
        .into_iter()
        .map(|e| e.query)
        .collect();
    let b: Vec<String> = gen_negative(&reg, 40, 2)
        .unwrap()
        .into_iter()
        .map(|e| e.query)
        .collect();
    assert_ne!(a, b);
}

#[test]
fn verify_rejects_missing_required_parameter() {
    let reg = registry();
    let example = TrainingExample {
        query: "set the thermostat to 72 degrees".into(),
        response: "<nexa_12>()<nexa_end>".into(),
        description_block: String::new(),
        target_function: "set_thermostat_temperature".into(),
        split: Split::Train,
        is_negative: false,
    };
    let outcome = verify(&example, &reg);
    assert!(!outcome.ok);
    assert!(
        outcome.reasons.iter().any(|r| r.contains("missing required")),
        "{:?}",
        outcome.reasons
    );
}

#[test]
fn verify_rejects_corrupted_enum_value() {
    let reg = registry();
    let spec = reg.lookup_name("take_a_photo").unwrap().clone();
    let mut row = gen_positive(&reg, &spec, 30, 5)
        .unwrap()
        .into_iter()
        .find(|r| r.response.contains("4K"))
        .expect("some sample uses 4K");
    row.response = row.response.replace("4K", "8K");
    row.query = row.query.replace("4K", "8K");
    let outcome = verify(&row, &reg);
    assert!(!outcome.ok);
    assert!(
        outcome.reasons.iter().any(|r| r.contains("does not allow")),
        "{:?}",
        outcome.reasons
    );
}

#[test]
fn verify_rejects_target_mismatch() {
    let reg = registry();
    let spec = reg.lookup_name("make_phone_call").unwrap().clone();
    let mut row = gen_positive(&reg, &spec, 1, 5).unwrap().remove(0);
    row.target_function = "search_web".into();
    let outcome = verify(&row, &reg);
    assert!(!outcome.ok);
    assert!(outcome.reasons.iter().any(|r| r.contains("target mismatch")));
}

#[test]
fn verify_rejects_value_absent_from_query() {
    let reg = registry();
    let example = TrainingExample {
        query: "call my friend".into(),
        response: "<nexa_1>(\"555-0123\")<nexa_end>".into(),
        description_block: String::new(),
        target_function: "make_phone_call".into(),
        split: Split::Train,
        is_negative: false,
    };
    let outcome = verify(&example, &reg);
    assert!(!outcome.ok);
    assert!(outcome.reasons.iter().any(|r| r.contains("missing from query")));
}

#[test]
fn build_dataset_writes_verified_disjoint_splits() {
    let reg = registry();
    let dir = tempfile::tempdir().unwrap();
    let fractions = SplitFractions::default();
    let manifest = build_dataset(&reg, 15, 15, &fractions, 42, dir.path()).unwrap();
    assert_eq!(manifest.m_positive, 15 * (reg.len() - 1));
    assert_eq!(manifest.n_negative, 15);
    assert_eq!(manifest.verifier.failed_attempts, 0);
    let data_dir = dataset_dir(dir.path(), 15, 42);
    let mut split_of: Map<String, Split> = Map::new();
    let mut total = 0;
    for file in ["train.jsonl", "val.jsonl", "eval.jsonl"] {
        let rows = read_jsonl(&data_dir.join(file)).unwrap();
        total += rows.len();
        for row in rows {
            assert!(verify(&row, &reg).ok, "emitted record fails verify");
            if let Some(prev) = split_of.insert(row.query.clone(), row.split) {
                assert_eq!(prev, row.split, "query `{}` in two splits", row.query);
            }
        }
    }
    assert_eq!(total, manifest.m_positive + manifest.n_negative);
    assert!(data_dir.join("manifest.json").exists());
}

#[test]
fn build_dataset_is_byte_deterministic() {
    let reg = registry();
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    let fractions = SplitFractions::default();
    build_dataset(&reg, 5, 5, &fractions, 9, d1.path()).unwrap();
    build_dataset(&reg, 5, 5, &fractions, 9, d2.path()).unwrap();
    for file in ["train.jsonl", "val.jsonl", "eval.jsonl", "manifest.json"] {
        let a = std::fs::read(dataset_dir(d1.path(), 5, 9).join(file)).unwrap();
        let b = std::fs::read(dataset_dir(d2.path(), 5, 9).join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between identical runs");
    }
}

#[test]
fn build_dataset_rejects_bad_fractions() {
    let reg = registry();
    let dir = tempfile::tempdir().unwrap();
    let bad = SplitFractions {
        train: 0.5,
        val: 0.2,
        eval: 0.2,
    };
    assert!(matches!(
        build_dataset(&reg, 1, 1, &bad, 1, dir.path()),
        Err(DatagenError::InvalidSplit(_))
    ));
}

#[test]
fn multi_dataset_has_parallel_and_nested_forms() {
    let reg = registry();
    let dir = tempfile::tempdir().unwrap();
    let manifest = gen_multi(&reg, 3, 8, dir.path()).unwrap();
    let data_dir = multi_dir(dir.path(), 3, 8);
    let mut rows = Vec::new();
    for file in &manifest.files {
        rows.extend(read_jsonl(&data_dir.join(file)).unwrap());
    }
    assert_eq!(rows.len(), 3 * (reg.len() - 1) + 3);
    let mut saw_parallel = 0;
    let mut saw_nested = 0;
    for row in &rows {
        assert!(verify(row, &reg).ok, "{:?}", verify(row, &reg).reasons);
        let parsed = grammar::parse_response(&row.response, &reg).unwrap();
        if parsed.calls.len() == 2 {
            saw_parallel += 1;
        }
        let nested_args = parsed
            .calls
            .iter()
            .flat_map(|c| c.positional.iter().chain(c.named.iter().map(|(_, v)| v)))
            .filter(|v| matches!(v, grammar::ArgValue::Nested(_)))
            .count();
        if nested_args > 0 {
            assert_eq!(parsed.calls.len(), 1);
            assert_eq!(nested_args, 1, "exactly one nested argument");
            saw_nested += 1;
        }
    }
    assert_eq!(saw_parallel, 3 * (reg.len() - 1));
    assert_eq!(saw_nested, 3);
}

#[test]
fn queries_never_contain_special_token_surfaces() {
    let reg = registry();
    let dir = tempfile::tempdir().unwrap();
    build_dataset(&reg, 10, 10, &SplitFractions::default(), 4, dir.path()).unwrap();
    let data_dir = dataset_dir(dir.path(), 10, 4);
    for file in ["train.jsonl", "val.jsonl", "eval.jsonl"] {
        for row in read_jsonl(&data_dir.join(file)).unwrap() {
            assert!(!row.query.contains("<nexa_"), "{}", row.query);
        }
    }
}

#[test]
fn jsonl_round_trip_preserves_records() {
    let reg = registry();
    let spec = reg.lookup_name("send_email").unwrap().clone();
    let rows = gen_positive(&reg, &spec, 8, 2).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.jsonl");
    write_jsonl(&path, rows.iter()).unwrap();
    let back = read_jsonl(&path).unwrap();
    assert_eq!(rows, back);
}

#[test]
fn unique_query_space_is_large_enough_for_eval() {
    // Even the smallest-domain function must produce enough distinct queries
    // that a 10 % eval fraction has something to hold out.
    let reg = registry();
    let spec = reg.lookup_name("toggle_bluetooth").unwrap().clone();
    let rows = gen_positive(&reg, &spec, 400, 17).unwrap();
    let unique: HashSet<&str> = rows.iter().map(|r| r.query.as_str()).collect();
    assert!(unique.len() >= 100, "only {} unique queries", unique.len());
}
