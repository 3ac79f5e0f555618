//! Greedy decoding with an incremental key/value cache.
//!
//! The prompt is prefilled in one batched forward pass (matrix-matrix work),
//! the per-block key/value projections are kept, and each generated token
//! then costs a handful of matrix-vector products plus attention over the
//! cached keys. A constrained first step restricts the initial token to the
//! functional-token id range so the pipeline always names some function.

use ndarray::{s, Array1, Array2};

use super::net::{Model, Scalar};
use super::ModelError;

/// Decoding controls.
#[derive(Debug, Clone)]
pub struct GenerateOptions {
    /// Maximum number of tokens to generate (excluding the prompt).
    pub max_new: usize,
    /// Token id that terminates generation and is not included in the output.
    pub end_id: u32,
    /// Optional `[lo, hi)` id range the first generated token must fall in.
    pub first_token_range: Option<(u32, u32)>,
}

/// Decoding result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generated {
    /// Generated token ids, without the prompt and without the end token.
    pub ids: Vec<u32>,
    /// Whether decoding stopped at the end token (vs budget or context).
    pub hit_end: bool,
}

struct KvCache<F> {
    /// Per block: rows are cached positions.
    layers: Vec<(Array2<F>, Array2<F>)>,
}

impl<F: Scalar> KvCache<F> {
    fn push(&mut self, layer: usize, k: &Array1<F>, v: &Array1<F>) {
        let (ks, vs) = &mut self.layers[layer];
        ks.push_row(k.view()).expect("matching width");
        vs.push_row(v.view()).expect("matching width");
    }

    fn len(&self) -> usize {
        self.layers[0].0.nrows()
    }
}

fn layernorm_vec<F: Scalar>(x: &Array1<F>, g: &Array1<F>, b: &Array1<F>) -> Array1<F> {
    let n = x.len();
    let inv_n = F::from_usize(n).unwrap().recip();
    let mean = x.sum() * inv_n;
    let centered = x.mapv(|v| v - mean);
    let var = centered.mapv(|v| v * v).sum() * inv_n;
    let eps = F::from_f64(1e-5).unwrap();
    let r = F::one() / (var + eps).sqrt();
    centered.mapv(|v| v * r) * g + b
}

fn gelu<F: Scalar>(x: F) -> F {
    let c = F::from_f64(0.7978845608028654).unwrap();
    let a = F::from_f64(0.044715).unwrap();
    let half = F::from_f64(0.5).unwrap();
    half * x * (F::one() + (c * (x + a * x * x * x)).tanh())
}

/// Logits for a single new token at absolute position `pos`, extending the
/// cache in place.
fn forward_next<F: Scalar>(
    model: &Model<F>,
    id: u32,
    pos: usize,
    cache: &mut KvCache<F>,
) -> Array1<F> {
    let n_heads = model.config.n_heads;
    let d = model.config.d_model;
    let dh = d / n_heads;
    let scale = F::from_f64(1.0 / (dh as f64).sqrt()).unwrap();
    let mut x = &model.tok_emb.row(id as usize) + &model.pos_emb.row(pos);
    for (layer, block) in model.blocks.iter().enumerate() {
        let a = layernorm_vec(&x, &block.ln1_g, &block.ln1_b);
        let q = a.dot(&block.wq) + &block.bq;
        let k = a.dot(&block.wk) + &block.bk;
        let v = a.dot(&block.wv) + &block.bv;
        cache.push(layer, &k, &v);
        let (ks, vs) = &cache.layers[layer];
        let t_len = ks.nrows();
        let mut att = Array1::zeros(d);
        for h in 0..n_heads {
            let cols = s![.., h * dh..(h + 1) * dh];
            let qh = q.slice(s![h * dh..(h + 1) * dh]);
            let kh = ks.slice(cols);
            let vh = vs.slice(cols);
            let mut scores = kh.dot(&qh);
            scores.mapv_inplace(|x| x * scale);
            let max = scores.iter().cloned().fold(F::neg_infinity(), F::max);
            scores.mapv_inplace(|x| (x - max).exp());
            let inv = F::one() / scores.sum();
            scores.mapv_inplace(|x| x * inv);
            debug_assert_eq!(scores.len(), t_len);
            let ctx = scores.dot(&vh);
            att.slice_mut(s![h * dh..(h + 1) * dh]).assign(&ctx);
        }
        let att_out = att.dot(&block.wo) + &block.bo;
        let x_mid = &x + &att_out;
        let h_in = layernorm_vec(&x_mid, &block.ln2_g, &block.ln2_b);
        let hidden = (h_in.dot(&block.w_up) + &block.b_up).mapv(gelu);
        let mlp_out = hidden.dot(&block.w_down) + &block.b_down;
        x = x_mid + mlp_out;
    }
    let xf = layernorm_vec(&x, &model.lnf_g, &model.lnf_b);
    xf.dot(&model.head_w) + &model.head_b
}

fn argmax<F: Scalar>(logits: &Array1<F>, range: Option<(u32, u32)>) -> u32 {
    let (lo, hi) = range
        .map(|(lo, hi)| (lo as usize, hi as usize))
        .unwrap_or((0, logits.len()));
    let mut best = lo;
    let mut best_val = F::neg_infinity();
    for i in lo..hi.min(logits.len()) {
        if logits[i] > best_val {
            best_val = logits[i];
            best = i;
        }
    }
    best as u32
}

/// Greedy decoding from `prompt_ids`.
pub fn generate_greedy<F: Scalar>(
    model: &Model<F>,
    prompt_ids: &[u32],
    opts: &GenerateOptions,
) -> Result<Generated, ModelError> {
    if prompt_ids.is_empty() {
        return Err(ModelError::InvalidConfig("empty prompt".into()));
    }
    let (logits, caches) = model.forward_full(prompt_ids)?;
    let mut cache = KvCache {
        layers: caches.kv_pairs(),
    };
    let mut last_logits = logits.row(logits.nrows() - 1).to_owned();
    let mut ids = Vec::new();
    let mut hit_end = false;
    for step in 0..opts.max_new {
        let range = if step == 0 { opts.first_token_range } else { None };
        let next = argmax(&last_logits, range);
        if next == opts.end_id {
            hit_end = true;
            break;
        }
        ids.push(next);
        let pos = cache.len();
        if pos >= model.config.context_len {
            break;
        }
        last_logits = forward_next(model, next, pos, &mut cache);
    }
    Ok(Generated { ids, hit_end })
}

/// Argmax token id over `[first_fn_id, first_fn_id + n_functions)` at the
/// position following the prompt — the function-selection head of the
/// pipeline.
pub fn select_function<F: Scalar>(
    model: &Model<F>,
    prompt_ids: &[u32],
    first_fn_id: u32,
    n_functions: usize,
) -> Result<u32, ModelError> {
    let logits = model.forward(prompt_ids)?;
    let last = logits.row(logits.nrows() - 1).to_owned();
    Ok(argmax(
        &last,
        Some((first_fn_id, first_fn_id + n_functions as u32)),
    ))
}
