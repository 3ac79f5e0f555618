//! Unit tests for the network, optimizer, adapters, decoding, and IO.

use super::generate::{generate_greedy, GenerateOptions};
use super::gradcheck;
use super::lora::{LoraAdapters, LoraConfig};
use super::net::{softmax_rows, weighted_ce_sum, Model};
use super::train::{mean_loss, train, train_lora, TrainConfig, TrainExample};
use super::{Checkpoint, ModelConfig};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tiny_config() -> ModelConfig {
    ModelConfig {
        vocab_size: 40,
        context_len: 24,
        d_model: 16,
        n_layers: 2,
        n_heads: 2,
        mlp_ratio: 2,
        seed: 3,
    }
}

fn random_ids(rng: &mut ChaCha8Rng, len: usize, vocab: usize) -> Vec<u32> {
    (0..len).map(|_| rng.gen_range(0..vocab as u32)).collect()
}

#[test]
fn config_validation() {
    let mut c = tiny_config();
    c.d_model = 15;
    assert!(c.check().is_err());
    c = tiny_config();
    c.n_heads = 0;
    assert!(c.check().is_err());
    assert!(tiny_config().check().is_ok());
}

#[test]
fn init_is_deterministic() {
    let c = tiny_config();
    let a = Model::<f32>::init(&c).unwrap();
    let b = Model::<f32>::init(&c).unwrap();
    for ((_, ta), (_, tb)) in a.tensors().into_iter().zip(b.tensors()) {
        assert_eq!(ta.as_slice(), tb.as_slice());
    }
    let mut c2 = c.clone();
    c2.seed = 4;
    let d = Model::<f32>::init(&c2).unwrap();
    assert_ne!(a.tok_emb.as_slice().unwrap(), d.tok_emb.as_slice().unwrap());
}

#[test]
fn softmax_rows_are_distributions() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let logits = Array2::from_shape_fn((6, 11), |_| rng.gen_range(-8.0f64..8.0));
    let p = softmax_rows(&logits);
    for row in p.outer_iter() {
        assert!((row.sum() - 1.0).abs() < 1e-12);
        assert!(row.iter().all(|&x| x > 0.0));
    }
}

#[test]
fn uniform_logits_give_log_vocab_loss() {
    // Oracle: with all-equal logits the mean cross-entropy is ln(V) exactly.
    let v = 40;
    let logits = Array2::<f64>::zeros((7, v));
    let targets: Vec<u32> = (0..7).map(|i| (i * 5 % v) as u32).collect();
    let weights = vec![1.0; v];
    let (sum, _) = weighted_ce_sum(&logits, &targets, &weights);
    let mean = sum / targets.len() as f64;
    assert!((mean - (v as f64).ln()).abs() < 1e-12, "{mean}");
}

#[test]
fn doubling_weights_doubles_loss() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let v = 12;
    let logits = Array2::from_shape_fn((9, v), |_| rng.gen_range(-3.0f64..3.0));
    let targets: Vec<u32> = (0..9).map(|_| rng.gen_range(0..v as u32)).collect();
    let ones = vec![1.0; v];
    let twos = vec![2.0; v];
    let (l1, d1) = weighted_ce_sum(&logits, &targets, &ones);
    let (l2, d2) = weighted_ce_sum(&logits, &targets, &twos);
    assert!((l2 - 2.0 * l1).abs() < 1e-9);
    for (a, b) in d1.iter().zip(d2.iter()) {
        assert!((b - 2.0 * a).abs() < 1e-9);
    }
}

#[test]
fn unit_weights_match_plain_cross_entropy_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let v = 10;
    let logits = Array2::from_shape_fn((5, v), |_| rng.gen_range(-4.0f64..4.0));
    let targets: Vec<u32> = (0..5).map(|_| rng.gen_range(0..v as u32)).collect();
    let (sum, _) = weighted_ce_sum(&logits, &targets, &vec![1.0; v]);
    // Independent oracle: direct log-sum-exp per row.
    let mut expect = 0.0;
    for (t, &y) in targets.iter().enumerate() {
        let row = logits.row(t);
        let lse = row.iter().map(|x| x.exp()).sum::<f64>().ln();
        expect += lse - row[y as usize];
    }
    assert!((sum - expect).abs() < 1e-9);
}

#[test]
fn forward_is_causal() {
    // Changing a later token must not change logits at earlier positions.
    let c = tiny_config();
    let model = Model::<f64>::init(&c).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let ids = random_ids(&mut rng, 12, c.vocab_size);
    let base = model.forward(&ids).unwrap();
    for t in 1..ids.len() {
        let mut mutated = ids.clone();
        mutated[t] = (mutated[t] + 1) % c.vocab_size as u32;
        let out = model.forward(&mutated).unwrap();
        for earlier in 0..t {
            let a = base.row(earlier);
            let b = out.row(earlier);
            for (x, y) in a.iter().zip(b.iter()) {
                assert_eq!(x, y, "position {earlier} changed by edit at {t}");
            }
        }
    }
}

#[test]
fn rejects_overlong_sequence() {
    let c = tiny_config();
    let model = Model::<f32>::init(&c).unwrap();
    let ids = vec![0u32; c.context_len + 1];
    assert!(model.forward(&ids).is_err());
}

#[test]
fn analytic_gradients_match_finite_differences() {
    let c = tiny_config();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let ids = random_ids(&mut rng, 14, c.vocab_size);
    // Non-uniform weights exercise the weighted-loss path end to end.
    let mut weights = vec![1.0; c.vocab_size];
    weights[3] = 2.0;
    weights[17] = 4.0;
    let worst = gradcheck::max_rel_error(&c, &ids, &weights, 4, 1e-5).unwrap();
    assert!(worst < 1e-5, "max relative gradient error {worst}");
}

#[test]
fn kv_cache_decoding_matches_full_forward() {
    let c = tiny_config();
    let model = Model::<f64>::init(&c).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for trial in 0..5 {
        let prompt = random_ids(&mut rng, 6 + trial, c.vocab_size);
        let opts = GenerateOptions {
            max_new: 10,
            end_id: c.vocab_size as u32, // never produced: ids are < vocab
            first_token_range: None,
        };
        let fast = generate_greedy(&model, &prompt, &opts).unwrap();
        // Oracle: re-run the batched forward pass from scratch every step.
        let mut ids = prompt.clone();
        let mut slow = Vec::new();
        for _ in 0..opts.max_new {
            if ids.len() >= c.context_len {
                break;
            }
            let logits = model.forward(&ids).unwrap();
            let last = logits.row(logits.nrows() - 1);
            let next = last
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .unwrap()
                .0 as u32;
            slow.push(next);
            ids.push(next);
        }
        assert_eq!(fast.ids, slow, "trial {trial}");
    }
}

#[test]
fn constrained_first_token_stays_in_range() {
    let c = tiny_config();
    let model = Model::<f32>::init(&c).unwrap();
    let opts = GenerateOptions {
        max_new: 3,
        end_id: 39,
        first_token_range: Some((8, 12)),
    };
    for p in 0..8u32 {
        let out = generate_greedy(&model, &[p, p + 1], &opts).unwrap();
        if let Some(&first) = out.ids.first() {
            assert!((8..12).contains(&first), "first token {first}");
        }
    }
}

#[test]
fn select_function_matches_constrained_generate() {
    let c = tiny_config();
    let model = Model::<f32>::init(&c).unwrap();
    let prompt = [1u32, 2, 3, 4];
    let picked = super::select_function(&model, &prompt, 8, 4).unwrap();
    let opts = GenerateOptions {
        max_new: 1,
        end_id: c.vocab_size as u32,
        first_token_range: Some((8, 12)),
    };
    let gen = generate_greedy(&model, &prompt, &opts).unwrap();
    assert_eq!(gen.ids, vec![picked]);
}

fn toy_examples(c: &ModelConfig, n: usize) -> Vec<TrainExample> {
    // A deterministic next-token pattern the model can memorize.
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    (0..n)
        .map(|_| {
            let start = rng.gen_range(0..8u32);
            let ids: Vec<u32> = (0..10).map(|i| (start + 3 * i) % c.vocab_size as u32).collect();
            TrainExample { ids }
        })
        .collect()
}

#[test]
fn training_reduces_loss_and_is_deterministic() {
    let c = tiny_config();
    let examples = toy_examples(&c, 24);
    let weights = vec![1.0; c.vocab_size];
    let cfg = TrainConfig {
        epochs: 10,
        batch_size: 8,
        lr: 1e-2,
        warmup_steps: 3,
        ..TrainConfig::default()
    };
    let mut m1 = Model::<f32>::init(&c).unwrap();
    let before = mean_loss(&m1, &examples, &weights).unwrap();
    let r1 = train(&mut m1, &examples, &weights, &cfg).unwrap();
    let after = mean_loss(&m1, &examples, &weights).unwrap();
    assert!(after < before * 0.7, "loss {before} -> {after}");
    assert_eq!(r1.epoch_losses.len(), 10);

    // Same seed, same data: bitwise identical result.
    let mut m2 = Model::<f32>::init(&c).unwrap();
    train(&mut m2, &examples, &weights, &cfg).unwrap();
    for ((_, a), (_, b)) in m1.tensors().into_iter().zip(m2.tensors()) {
        assert_eq!(a.as_slice(), b.as_slice());
    }
}

#[test]
fn fresh_adapters_do_not_change_the_model() {
    let c = tiny_config();
    let base = Model::<f32>::init(&c).unwrap();
    let lora = LoraAdapters::<f32>::init(&c, &LoraConfig { rank: 4, alpha: 8.0, seed: 9 }).unwrap();
    let merged = lora.merge(&base);
    let ids = [1u32, 5, 9, 2];
    let a = base.forward(&ids).unwrap();
    let b = merged.forward(&ids).unwrap();
    for (x, y) in a.iter().zip(b.iter()) {
        assert_eq!(x, y);
    }
}

#[test]
fn adapter_training_leaves_base_frozen_but_changes_merged_model() {
    let c = tiny_config();
    let base = Model::<f32>::init(&c).unwrap();
    let snapshot = base.clone();
    let mut lora =
        LoraAdapters::<f32>::init(&c, &LoraConfig { rank: 4, alpha: 8.0, seed: 9 }).unwrap();
    let examples = toy_examples(&c, 16);
    let weights = vec![1.0; c.vocab_size];
    let cfg = TrainConfig {
        epochs: 2,
        batch_size: 8,
        lr: 3e-3,
        warmup_steps: 1,
        ..TrainConfig::default()
    };
    let before = mean_loss(&lora.merge(&base), &examples, &weights).unwrap();
    train_lora(&base, &mut lora, &examples, &weights, &cfg).unwrap();
    let after = mean_loss(&lora.merge(&base), &examples, &weights).unwrap();
    assert!(after < before, "loss {before} -> {after}");
    for ((_, a), (_, b)) in base.tensors().into_iter().zip(snapshot.tensors()) {
        assert_eq!(a.as_slice(), b.as_slice(), "base weights moved");
    }
}

#[test]
fn adapter_gradients_match_finite_differences() {
    // Check dA/dB through the merged model against central differences in f64.
    let c = tiny_config();
    let base = Model::<f64>::init(&c).unwrap();
    let mut lora =
        LoraAdapters::<f64>::init(&c, &LoraConfig { rank: 3, alpha: 6.0, seed: 13 }).unwrap();
    // Give B nonzero values so dA is nontrivial.
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for (_, t) in lora.tensors_mut() {
        t.mapv_inplace(|_| rng.gen_range(-0.05..0.05));
    }
    let ids = random_ids(&mut rng, 10, c.vocab_size);
    let weights = vec![1.0; c.vocab_size];
    let loss_of = |l: &LoraAdapters<f64>| -> f64 {
        let merged = l.merge(&base);
        let inputs = &ids[..ids.len() - 1];
        let targets = &ids[1..];
        let logits = merged.forward(inputs).unwrap();
        let (s, _) = weighted_ce_sum(&logits, targets, &weights);
        s / targets.len() as f64
    };
    // Analytic adapter gradients.
    let merged = lora.merge(&base);
    let inputs = &ids[..ids.len() - 1];
    let targets = &ids[1..];
    let (logits, caches) = merged.forward_full(inputs).unwrap();
    let (_, mut dlogits) = weighted_ce_sum(&logits, targets, &weights);
    dlogits.mapv_inplace(|x| x / targets.len() as f64);
    let mut wgrads = Model::<f64>::zeros(&c);
    merged.backward(&caches, &dlogits, &mut wgrads);
    let mut agrads = lora.zeros_like();
    lora.project_grads(&wgrads, &mut agrads);

    let h = 1e-6;
    let mut rng2 = ChaCha8Rng::seed_from_u64(15);
    for ti in 0..agrads.tensors().len() {
        let len = agrads.tensors()[ti].1.len();
        let idx = rng2.gen_range(0..len);
        let analytic = agrads.tensors()[ti].1.as_slice().unwrap()[idx];
        let mut probe = lora.clone();
        probe.tensors_mut()[ti].1.as_slice_mut().unwrap()[idx] += h;
        let lp = loss_of(&probe);
        probe.tensors_mut()[ti].1.as_slice_mut().unwrap()[idx] -= 2.0 * h;
        let lm = loss_of(&probe);
        let numeric = (lp - lm) / (2.0 * h);
        let denom = analytic.abs().max(numeric.abs()).max(1e-4);
        assert!(
            (analytic - numeric).abs() / denom < 1e-4,
            "tensor {ti} entry {idx}: analytic {analytic} vs numeric {numeric}"
        );
    }
}

#[test]
fn adapter_param_count_is_small() {
    let c = tiny_config();
    let base = Model::<f32>::init(&c).unwrap();
    let lora = LoraAdapters::<f32>::init(&c, &LoraConfig { rank: 1, alpha: 2.0, seed: 1 }).unwrap();
    assert!(lora.n_params() * 4 < base.n_params(), "{} vs {}", lora.n_params(), base.n_params());
}

#[test]
fn checkpoint_round_trip_is_bitwise() {
    let c = tiny_config();
    let model = Model::<f32>::init(&c).unwrap();
    let ckpt = Checkpoint {
        model,
        vocab: serde_json::json!({"n_functions": 4}),
        metadata: serde_json::json!({"note": "test"}),
    };
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.ftcp");
    ckpt.save(&path).unwrap();
    let back = Checkpoint::load(&path).unwrap();
    assert_eq!(back.model.config, ckpt.model.config);
    assert_eq!(back.vocab, ckpt.vocab);
    assert_eq!(back.metadata, ckpt.metadata);
    for ((na, a), (nb, b)) in ckpt.model.tensors().into_iter().zip(back.model.tensors()) {
        assert_eq!(na, nb);
        assert_eq!(a.as_slice(), b.as_slice());
    }
}

#[test]
fn checkpoint_rejects_corruption() {
    let c = tiny_config();
    let ckpt = Checkpoint {
        model: Model::<f32>::init(&c).unwrap(),
        vocab: serde_json::Value::Null,
        metadata: serde_json::Value::Null,
    };
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.ftcp");
    ckpt.save(&path).unwrap();
    let mut bytes = std::fs::read(&path).unwrap();
    bytes[0] = b'X';
    std::fs::write(&path, &bytes).unwrap();
    assert!(Checkpoint::load(&path).is_err());
    // Truncated data section.
    ckpt.save(&path).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    std::fs::write(&path, &bytes[..bytes.len() - 128]).unwrap();
    assert!(Checkpoint::load(&path).is_err());
}
