//! Finite-difference validation of the analytic backward pass.
//!
//! Runs entirely in `f64`: central differences with step `h` are compared
//! against the analytic gradient on a deterministic sample of entries from
//! every parameter tensor.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::net::{weighted_ce_sum, Model};
use super::{ModelConfig, ModelError};

/// Mean weighted cross-entropy of the model on one sequence.
fn loss(model: &Model<f64>, ids: &[u32], weights: &[f64]) -> Result<f64, ModelError> {
    let inputs = &ids[..ids.len() - 1];
    let targets = &ids[1..];
    let logits = model.forward(inputs)?;
    let (l, _) = weighted_ce_sum(&logits, targets, weights);
    Ok(l / targets.len() as f64)
}

/// Maximum relative error between analytic and numeric gradients, sampling
/// `per_tensor` entries from each parameter tensor.
pub fn max_rel_error(
    config: &ModelConfig,
    ids: &[u32],
    weights: &[f64],
    per_tensor: usize,
    h: f64,
) -> Result<f64, ModelError> {
    let model = Model::<f64>::init(config)?;
    let inputs = &ids[..ids.len() - 1];
    let targets = &ids[1..];
    let (logits, caches) = model.forward_full(inputs)?;
    let (_, mut dlogits) = weighted_ce_sum(&logits, targets, weights);
    dlogits.mapv_inplace(|x| x / targets.len() as f64);
    let mut analytic = Model::<f64>::zeros(config);
    model.backward(&caches, &dlogits, &mut analytic);

    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst = 0.0f64;
    let names: Vec<String> = model.tensors().into_iter().map(|(n, _)| n).collect();
    for (ti, name) in names.iter().enumerate() {
        let len = analytic.tensors()[ti].1.as_slice().len();
        for _ in 0..per_tensor.min(len) {
            let idx = rng.gen_range(0..len);
            let a = analytic.tensors()[ti].1.as_slice()[idx];
            let mut probe = model.clone();
            probe.tensors_mut()[ti].1.as_slice_mut()[idx] += h;
            let lp = loss(&probe, ids, weights)?;
            probe.tensors_mut()[ti].1.as_slice_mut()[idx] -= 2.0 * h;
            let lm = loss(&probe, ids, weights)?;
            let n = (lp - lm) / (2.0 * h);
            // Floor the denominator: entries with ~1e-6 gradients are
            // dominated by central-difference truncation noise.
            let denom = a.abs().max(n.abs()).max(1e-4);
            let rel = (a - n).abs() / denom;
            if rel > worst {
                worst = rel;
            }
            let _ = name;
        }
    }
    Ok(worst)
}
