//! Decoder-only transformer with an expanded LM head, hand-rolled forward and
//! backward passes.
//!
//! The network is a standard pre-norm stack: learned positional embeddings,
//! `n_layers` blocks of causal self-attention plus a GELU MLP, a final layer
//! norm, and an untied head of width `vocab_size`. Everything is generic over
//! `f32`/`f64` so the finite-difference gradient check can run in wide
//! precision while training stays fast.

use ndarray::{s, Array1, Array2, Axis, NdFloat};
use num_traits::FromPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ModelConfig, ModelError};

/// Float types the network runs on.
pub trait Scalar: NdFloat + FromPrimitive + std::iter::Sum {}
impl Scalar for f32 {}
impl Scalar for f64 {}

pub(crate) fn sc<F: Scalar>(x: f64) -> F {
    F::from_f64(x).expect("finite constant")
}

const LN_EPS: f64 = 1e-5;

#[derive(Debug, Clone)]
pub struct Block<F> {
    pub ln1_g: Array1<F>,
    pub ln1_b: Array1<F>,
    pub wq: Array2<F>,
    pub bq: Array1<F>,
    pub wk: Array2<F>,
    pub bk: Array1<F>,
    pub wv: Array2<F>,
    pub bv: Array1<F>,
    pub wo: Array2<F>,
    pub bo: Array1<F>,
    pub ln2_g: Array1<F>,
    pub ln2_b: Array1<F>,
    pub w_up: Array2<F>,
    pub b_up: Array1<F>,
    pub w_down: Array2<F>,
    pub b_down: Array1<F>,
}

/// All parameters of the network.
#[derive(Debug, Clone)]
pub struct Model<F> {
    pub config: ModelConfig,
    pub tok_emb: Array2<F>,
    pub pos_emb: Array2<F>,
    pub blocks: Vec<Block<F>>,
    pub lnf_g: Array1<F>,
    pub lnf_b: Array1<F>,
    pub head_w: Array2<F>,
    pub head_b: Array1<F>,
}

/// Borrowed view of one named tensor.
pub enum TensorRef<'a, F> {
    M(&'a Array2<F>),
    V(&'a Array1<F>),
}

pub enum TensorMut<'a, F> {
    M(&'a mut Array2<F>),
    V(&'a mut Array1<F>),
}

impl<'a, F: Scalar> TensorRef<'a, F> {
    pub fn as_slice(&self) -> &[F] {
        match self {
            TensorRef::M(a) => a.as_slice().expect("std layout"),
            TensorRef::V(a) => a.as_slice().expect("std layout"),
        }
    }

    pub fn shape(&self) -> Vec<usize> {
        match self {
            TensorRef::M(a) => a.shape().to_vec(),
            TensorRef::V(a) => a.shape().to_vec(),
        }
    }
}

impl<'a, F: Scalar> TensorMut<'a, F> {
    pub fn as_slice_mut(&mut self) -> &mut [F] {
        match self {
            TensorMut::M(a) => a.as_slice_mut().expect("std layout"),
            TensorMut::V(a) => a.as_slice_mut().expect("std layout"),
        }
    }
}

/// Whether a tensor takes weight decay (matrices yes, biases/norms/embeddings no).
pub fn decays(name: &str) -> bool {
    let last = name.rsplit('.').next().unwrap_or(name);
    matches!(last, "wq" | "wk" | "wv" | "wo" | "w_up" | "w_down" | "head_w")
}

impl<F: Scalar> Model<F> {
    /// Deterministic initialization from `config.seed`.
    pub fn init(config: &ModelConfig) -> Result<Self, ModelError> {
        config.check()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let d = config.d_model;
        let m = config.d_model * config.mlp_ratio;
        let v = config.vocab_size;
        let std = 0.02;
        let mut normal = |shape: (usize, usize), std: f64| -> Array2<F> {
            Array2::from_shape_fn(shape, |_| sc(gaussian(&mut rng) * std))
        };
        let blocks = (0..config.n_layers)
            .map(|_| Block {
                ln1_g: Array1::ones(d),
                ln1_b: Array1::zeros(d),
                wq: normal((d, d), std),
                bq: Array1::zeros(d),
                wk: normal((d, d), std),
                bk: Array1::zeros(d),
                wv: normal((d, d), std),
                bv: Array1::zeros(d),
                wo: normal((d, d), std / (2.0 * config.n_layers as f64).sqrt()),
                bo: Array1::zeros(d),
                ln2_g: Array1::ones(d),
                ln2_b: Array1::zeros(d),
                w_up: normal((d, m), std),
                b_up: Array1::zeros(m),
                w_down: normal((m, d), std / (2.0 * config.n_layers as f64).sqrt()),
                b_down: Array1::zeros(d),
            })
            .collect();
        Ok(Model {
            config: config.clone(),
            tok_emb: normal((v, d), std),
            pos_emb: normal((config.context_len, d), std),
            blocks,
            lnf_g: Array1::ones(d),
            lnf_b: Array1::zeros(d),
            head_w: normal((d, v), std),
            head_b: Array1::zeros(v),
        })
    }

    /// All-zero model with the same shapes; used as a gradient accumulator.
    pub fn zeros(config: &ModelConfig) -> Self {
        let d = config.d_model;
        let m = config.d_model * config.mlp_ratio;
        let v = config.vocab_size;
        let blocks = (0..config.n_layers)
            .map(|_| Block {
                ln1_g: Array1::zeros(d),
                ln1_b: Array1::zeros(d),
                wq: Array2::zeros((d, d)),
                bq: Array1::zeros(d),
                wk: Array2::zeros((d, d)),
                bk: Array1::zeros(d),
                wv: Array2::zeros((d, d)),
                bv: Array1::zeros(d),
                wo: Array2::zeros((d, d)),
                bo: Array1::zeros(d),
                ln2_g: Array1::zeros(d),
                ln2_b: Array1::zeros(d),
                w_up: Array2::zeros((d, m)),
                b_up: Array1::zeros(m),
                w_down: Array2::zeros((m, d)),
                b_down: Array1::zeros(d),
            })
            .collect();
        Model {
            config: config.clone(),
            tok_emb: Array2::zeros((v, d)),
            pos_emb: Array2::zeros((config.context_len, d)),
            blocks,
            lnf_g: Array1::zeros(d),
            lnf_b: Array1::zeros(d),
            head_w: Array2::zeros((d, v)),
            head_b: Array1::zeros(v),
        }
    }

    /// Named tensors in a fixed order.
    pub fn tensors(&self) -> Vec<(String, TensorRef<'_, F>)> {
        let mut out: Vec<(String, TensorRef<'_, F>)> = vec![
            ("tok_emb".into(), TensorRef::M(&self.tok_emb)),
            ("pos_emb".into(), TensorRef::M(&self.pos_emb)),
        ];
        for (i, b) in self.blocks.iter().enumerate() {
            let p = format!("block{i}");
            out.extend([
                (format!("{p}.ln1_g"), TensorRef::V(&b.ln1_g)),
                (format!("{p}.ln1_b"), TensorRef::V(&b.ln1_b)),
                (format!("{p}.wq"), TensorRef::M(&b.wq)),
                (format!("{p}.bq"), TensorRef::V(&b.bq)),
                (format!("{p}.wk"), TensorRef::M(&b.wk)),
                (format!("{p}.bk"), TensorRef::V(&b.bk)),
                (format!("{p}.wv"), TensorRef::M(&b.wv)),
                (format!("{p}.bv"), TensorRef::V(&b.bv)),
                (format!("{p}.wo"), TensorRef::M(&b.wo)),
                (format!("{p}.bo"), TensorRef::V(&b.bo)),
                (format!("{p}.ln2_g"), TensorRef::V(&b.ln2_g)),
                (format!("{p}.ln2_b"), TensorRef::V(&b.ln2_b)),
                (format!("{p}.w_up"), TensorRef::M(&b.w_up)),
                (format!("{p}.b_up"), TensorRef::V(&b.b_up)),
                (format!("{p}.w_down"), TensorRef::M(&b.w_down)),
                (format!("{p}.b_down"), TensorRef::V(&b.b_down)),
            ]);
        }
        out.extend([
            ("lnf_g".into(), TensorRef::V(&self.lnf_g)),
            ("lnf_b".into(), TensorRef::V(&self.lnf_b)),
            ("head_w".into(), TensorRef::M(&self.head_w)),
            ("head_b".into(), TensorRef::V(&self.head_b)),
        ]);
        out
    }

    /// Mutable named tensors; same order as [`Model::tensors`].
    pub fn tensors_mut(&mut self) -> Vec<(String, TensorMut<'_, F>)> {
        let mut out: Vec<(String, TensorMut<'_, F>)> = vec![
            ("tok_emb".into(), TensorMut::M(&mut self.tok_emb)),
            ("pos_emb".into(), TensorMut::M(&mut self.pos_emb)),
        ];
        for (i, b) in self.blocks.iter_mut().enumerate() {
            let p = format!("block{i}");
            out.extend([
                (format!("{p}.ln1_g"), TensorMut::V(&mut b.ln1_g)),
                (format!("{p}.ln1_b"), TensorMut::V(&mut b.ln1_b)),
                (format!("{p}.wq"), TensorMut::M(&mut b.wq)),
                (format!("{p}.bq"), TensorMut::V(&mut b.bq)),
                (format!("{p}.wk"), TensorMut::M(&mut b.wk)),
                (format!("{p}.bk"), TensorMut::V(&mut b.bk)),
                (format!("{p}.wv"), TensorMut::M(&mut b.wv)),
                (format!("{p}.bv"), TensorMut::V(&mut b.bv)),
                (format!("{p}.wo"), TensorMut::M(&mut b.wo)),
                (format!("{p}.bo"), TensorMut::V(&mut b.bo)),
                (format!("{p}.ln2_g"), TensorMut::V(&mut b.ln2_g)),
                (format!("{p}.ln2_b"), TensorMut::V(&mut b.ln2_b)),
                (format!("{p}.w_up"), TensorMut::M(&mut b.w_up)),
                (format!("{p}.b_up"), TensorMut::V(&mut b.b_up)),
                (format!("{p}.w_down"), TensorMut::M(&mut b.w_down)),
                (format!("{p}.b_down"), TensorMut::V(&mut b.b_down)),
            ]);
        }
        out.extend([
            ("lnf_g".into(), TensorMut::V(&mut self.lnf_g)),
            ("lnf_b".into(), TensorMut::V(&mut self.lnf_b)),
            ("head_w".into(), TensorMut::M(&mut self.head_w)),
            ("head_b".into(), TensorMut::V(&mut self.head_b)),
        ]);
        out
    }

    /// Total parameter count.
    pub fn n_params(&self) -> usize {
        self.tensors()
            .iter()
            .map(|(_, t)| t.as_slice().len())
            .sum()
    }

    /// Plain forward pass: logits for every position, no caches.
    pub fn forward(&self, ids: &[u32]) -> Result<Array2<F>, ModelError> {
        let (logits, _) = self.forward_full(ids)?;
        Ok(logits)
    }

    /// Forward pass keeping every activation needed by `backward`.
    pub fn forward_full(&self, ids: &[u32]) -> Result<(Array2<F>, Caches<F>), ModelError> {
        let t_len = ids.len();
        if t_len > self.config.context_len {
            return Err(ModelError::SequenceTooLong {
                len: t_len,
                max: self.config.context_len,
            });
        }
        let d = self.config.d_model;
        let mut x = Array2::zeros((t_len, d));
        for (t, &id) in ids.iter().enumerate() {
            let row = &self.tok_emb.row(id as usize) + &self.pos_emb.row(t);
            x.row_mut(t).assign(&row);
        }
        let mut caches = Caches {
            ids: ids.to_vec(),
            blocks: Vec::with_capacity(self.blocks.len()),
            lnf: None,
            xf: None,
        };
        for b in &self.blocks {
            let (a, ln1) = layernorm(&x, &b.ln1_g, &b.ln1_b);
            let q = a.dot(&b.wq) + &b.bq;
            let k = a.dot(&b.wk) + &b.bk;
            let v = a.dot(&b.wv) + &b.bv;
            let (att_concat, probs) = causal_attention(&q, &k, &v, self.config.n_heads);
            let att_out = att_concat.dot(&b.wo) + &b.bo;
            let x_mid = &x + &att_out;
            let (h_in, ln2) = layernorm(&x_mid, &b.ln2_g, &b.ln2_b);
            let hpre = h_in.dot(&b.w_up) + &b.b_up;
            let hact = hpre.mapv(gelu);
            let mlp_out = hact.dot(&b.w_down) + &b.b_down;
            x = &x_mid + &mlp_out;
            caches.blocks.push(BlockCache {
                ln1,
                a,
                q,
                k,
                v,
                probs,
                att_concat,
                ln2,
                h_in,
                hpre,
                hact,
            });
        }
        let (xf, lnf) = layernorm(&x, &self.lnf_g, &self.lnf_b);
        let logits = xf.dot(&self.head_w) + &self.head_b;
        caches.lnf = Some(lnf);
        caches.xf = Some(xf);
        Ok((logits, caches))
    }

    /// Backward pass from `dlogits`, adding parameter gradients into `grads`.
    pub fn backward(&self, caches: &Caches<F>, dlogits: &Array2<F>, grads: &mut Model<F>) {
        let xf = caches.xf.as_ref().expect("forward_full caches");
        let lnf = caches.lnf.as_ref().unwrap();
        grads.head_w = &grads.head_w + &xf.t().dot(dlogits);
        grads.head_b = &grads.head_b + &dlogits.sum_axis(Axis(0));
        let dxf = dlogits.dot(&self.head_w.t());
        let mut dx = layernorm_backward(
            &dxf,
            lnf,
            &self.lnf_g,
            &mut grads.lnf_g,
            &mut grads.lnf_b,
        );
        for (b, (c, g)) in self
            .blocks
            .iter()
            .zip(caches.blocks.iter().zip(grads.blocks.iter_mut()))
            .rev()
        {
            // MLP branch
            g.w_down = &g.w_down + &c.hact.t().dot(&dx);
            g.b_down = &g.b_down + &dx.sum_axis(Axis(0));
            let dhact = dx.dot(&b.w_down.t());
            let dhpre = &dhact * &c.hpre.mapv(gelu_grad);
            g.w_up = &g.w_up + &c.h_in.t().dot(&dhpre);
            g.b_up = &g.b_up + &dhpre.sum_axis(Axis(0));
            let dh_in = dhpre.dot(&b.w_up.t());
            let dx_mid_from_ln =
                layernorm_backward(&dh_in, &c.ln2, &b.ln2_g, &mut g.ln2_g, &mut g.ln2_b);
            let dx_mid = &dx + &dx_mid_from_ln;
            // attention branch
            g.wo = &g.wo + &c.att_concat.t().dot(&dx_mid);
            g.bo = &g.bo + &dx_mid.sum_axis(Axis(0));
            let do_concat = dx_mid.dot(&b.wo.t());
            let (dq, dk, dv) =
                causal_attention_backward(&c.q, &c.k, &c.v, &c.probs, &do_concat, self.config.n_heads);
            g.wq = &g.wq + &c.a.t().dot(&dq);
            g.bq = &g.bq + &dq.sum_axis(Axis(0));
            g.wk = &g.wk + &c.a.t().dot(&dk);
            g.bk = &g.bk + &dk.sum_axis(Axis(0));
            g.wv = &g.wv + &c.a.t().dot(&dv);
            g.bv = &g.bv + &dv.sum_axis(Axis(0));
            let da = dq.dot(&b.wq.t()) + dk.dot(&b.wk.t()) + dv.dot(&b.wv.t());
            let dx_in_from_ln =
                layernorm_backward(&da, &c.ln1, &b.ln1_g, &mut g.ln1_g, &mut g.ln1_b);
            dx = &dx_mid + &dx_in_from_ln;
        }
        // embeddings
        let t_len = caches.ids.len();
        for t in 0..t_len {
            let row = dx.row(t);
            let mut p = grads.pos_emb.row_mut(t);
            p += &row;
            let mut e = grads.tok_emb.row_mut(caches.ids[t] as usize);
            e += &row;
        }
    }
}

/// Per-block activation cache.
pub struct BlockCache<F> {
    ln1: LnCache<F>,
    a: Array2<F>,
    q: Array2<F>,
    k: Array2<F>,
    v: Array2<F>,
    probs: Vec<Array2<F>>,
    att_concat: Array2<F>,
    ln2: LnCache<F>,
    h_in: Array2<F>,
    hpre: Array2<F>,
    hact: Array2<F>,
}

pub struct Caches<F> {
    ids: Vec<u32>,
    blocks: Vec<BlockCache<F>>,
    lnf: Option<LnCache<F>>,
    xf: Option<Array2<F>>,
}

impl<F: Scalar> Caches<F> {
    /// Per-block (K, V) projections, used to seed an incremental-decoding
    /// cache after a batched prefill.
    pub fn kv_pairs(&self) -> Vec<(Array2<F>, Array2<F>)> {
        self.blocks
            .iter()
            .map(|b| (b.k.clone(), b.v.clone()))
            .collect()
    }
}

pub struct LnCache<F> {
    xhat: Array2<F>,
    rstd: Array1<F>,
}

fn layernorm<F: Scalar>(x: &Array2<F>, g: &Array1<F>, b: &Array1<F>) -> (Array2<F>, LnCache<F>) {
    let n = x.ncols();
    let inv_n = sc::<F>(1.0 / n as f64);
    let mut xhat = Array2::zeros(x.raw_dim());
    let mut rstd = Array1::zeros(x.nrows());
    for (i, row) in x.outer_iter().enumerate() {
        let mean = row.sum() * inv_n;
        let centered = row.mapv(|v| v - mean);
        let var = centered.mapv(|v| v * v).sum() * inv_n;
        let r = F::one() / (var + sc::<F>(LN_EPS)).sqrt();
        xhat.row_mut(i).assign(&centered.mapv(|v| v * r));
        rstd[i] = r;
    }
    let y = &xhat * g + b;
    (y, LnCache { xhat, rstd })
}

fn layernorm_backward<F: Scalar>(
    dy: &Array2<F>,
    cache: &LnCache<F>,
    g: &Array1<F>,
    dg: &mut Array1<F>,
    db: &mut Array1<F>,
) -> Array2<F> {
    let n = dy.ncols();
    let inv_n = sc::<F>(1.0 / n as f64);
    *dg = &*dg + &(dy * &cache.xhat).sum_axis(Axis(0));
    *db = &*db + &dy.sum_axis(Axis(0));
    let dxhat = dy * g;
    let mut dx = Array2::zeros(dy.raw_dim());
    for i in 0..dy.nrows() {
        let dxh = dxhat.row(i);
        let xh = cache.xhat.row(i);
        let m1 = dxh.sum() * inv_n;
        let m2 = (&dxh * &xh).sum() * inv_n;
        let r = cache.rstd[i];
        let row = dxh
            .iter()
            .zip(xh.iter())
            .map(|(&dv, &xv)| (dv - m1 - xv * m2) * r)
            .collect::<Array1<F>>();
        dx.row_mut(i).assign(&row);
    }
    dx
}

/// Multi-head causal self-attention; returns the concatenated context and the
/// per-head attention probabilities.
fn causal_attention<F: Scalar>(
    q: &Array2<F>,
    k: &Array2<F>,
    v: &Array2<F>,
    n_heads: usize,
) -> (Array2<F>, Vec<Array2<F>>) {
    let t_len = q.nrows();
    let d = q.ncols();
    let dh = d / n_heads;
    let scale = sc::<F>(1.0 / (dh as f64).sqrt());
    let mut out = Array2::zeros((t_len, d));
    let mut probs = Vec::with_capacity(n_heads);
    for h in 0..n_heads {
        let cols = s![.., h * dh..(h + 1) * dh];
        let qh = q.slice(cols);
        let kh = k.slice(cols);
        let vh = v.slice(cols);
        let mut scores = qh.dot(&kh.t());
        scores.mapv_inplace(|x| x * scale);
        // causal mask + row softmax
        for i in 0..t_len {
            let mut row = scores.row_mut(i);
            let visible = i + 1;
            let max = row
                .iter()
                .take(visible)
                .cloned()
                .fold(F::neg_infinity(), F::max);
            let mut sum = F::zero();
            for j in 0..t_len {
                if j < visible {
                    let e = (row[j] - max).exp();
                    row[j] = e;
                    sum = sum + e;
                } else {
                    row[j] = F::zero();
                }
            }
            let inv = F::one() / sum;
            for j in 0..visible {
                row[j] = row[j] * inv;
            }
        }
        let ctx = scores.dot(&vh);
        out.slice_mut(cols).assign(&ctx);
        probs.push(scores);
    }
    (out, probs)
}

fn causal_attention_backward<F: Scalar>(
    q: &Array2<F>,
    k: &Array2<F>,
    v: &Array2<F>,
    probs: &[Array2<F>],
    do_concat: &Array2<F>,
    n_heads: usize,
) -> (Array2<F>, Array2<F>, Array2<F>) {
    let d = q.ncols();
    let dh = d / n_heads;
    let scale = sc::<F>(1.0 / (dh as f64).sqrt());
    let mut dq = Array2::zeros(q.raw_dim());
    let mut dk = Array2::zeros(k.raw_dim());
    let mut dv = Array2::zeros(v.raw_dim());
    for h in 0..n_heads {
        let cols = s![.., h * dh..(h + 1) * dh];
        let qh = q.slice(cols);
        let kh = k.slice(cols);
        let vh = v.slice(cols);
        let p = &probs[h];
        let doh = do_concat.slice(cols);
        dv.slice_mut(cols).assign(&p.t().dot(&doh));
        let dp = doh.dot(&vh.t());
        // softmax backward per row; masked entries have p == 0 so they vanish
        let row_dot = (&dp * p).sum_axis(Axis(1));
        let mut ds = p.clone();
        for i in 0..ds.nrows() {
            let rd = row_dot[i];
            let dpr = dp.row(i);
            for (j, cell) in ds.row_mut(i).iter_mut().enumerate() {
                *cell = *cell * (dpr[j] - rd);
            }
        }
        ds.mapv_inplace(|x| x * scale);
        dq.slice_mut(cols).assign(&ds.dot(&kh));
        dk.slice_mut(cols).assign(&ds.t().dot(&qh));
    }
    (dq, dk, dv)
}

fn gelu<F: Scalar>(x: F) -> F {
    let c = sc::<F>(0.7978845608028654); // sqrt(2/pi)
    let a = sc::<F>(0.044715);
    let half = sc::<F>(0.5);
    half * x * (F::one() + (c * (x + a * x * x * x)).tanh())
}

fn gelu_grad<F: Scalar>(x: F) -> F {
    let c = sc::<F>(0.7978845608028654);
    let a = sc::<F>(0.044715);
    let half = sc::<F>(0.5);
    let three = sc::<F>(3.0);
    let inner = c * (x + a * x * x * x);
    let t = inner.tanh();
    half * (F::one() + t) + half * x * (F::one() - t * t) * c * (F::one() + three * a * x * x)
}

/// Standard-normal sample via Box-Muller, deterministic under the RNG seed.
fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let u1: f64 = rng.gen();
        if u1 <= f64::MIN_POSITIVE {
            continue;
        }
        let u2: f64 = rng.gen();
        return (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
    }
}

/// Row softmax of logits (stable).
pub fn softmax_rows<F: Scalar>(logits: &Array2<F>) -> Array2<F> {
    let mut out = logits.clone();
    for mut row in out.outer_iter_mut() {
        let max = row.iter().cloned().fold(F::neg_infinity(), F::max);
        row.mapv_inplace(|x| (x - max).exp());
        let sum = row.sum();
        row.mapv_inplace(|x| x / sum);
    }
    out
}

/// Weighted cross-entropy over one sequence's logits.
///
/// Returns the *sum* over positions of `w[target] * -log p[target]` plus the
/// position count; callers divide by the total weighted-position count to get
/// the mean-reduced loss. With unit weights this is exactly the unweighted
/// loss sum.
pub fn weighted_ce_sum<F: Scalar>(
    logits: &Array2<F>,
    targets: &[u32],
    weights: &[f64],
) -> (F, Array2<F>) {
    assert_eq!(logits.nrows(), targets.len(), "shape mismatch");
    let probs = softmax_rows(logits);
    let mut dlogits = probs.clone();
    let mut loss = F::zero();
    for (t, &y) in targets.iter().enumerate() {
        let y = y as usize;
        let w = sc::<F>(weights[y]);
        let p = probs[(t, y)];
        loss = loss - w * p.max(sc::<F>(1e-300)).ln();
        let mut row = dlogits.row_mut(t);
        row.mapv_inplace(|x| x * w);
        row[y] = row[y] - w;
    }
    (loss, dlogits)
}
