//! Layer implementations with hand-written forward/backward passes.
//!
//! Activations flow through [`Value`]: flat vectors for dense paths,
//! row-major `(time x channels)` sequences for embedding/conv paths, and raw
//! token ids feeding an embedding layer. Left padding means a sequence's
//! invalid positions are always a prefix, tracked by `valid_from`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::neural::LayerSpec;
use crate::text::embedding::EmbeddingMatrix;

/// Activation value between layers.
#[derive(Debug, Clone)]
pub enum Value {
    Flat(Vec<f64>),
    Seq {
        data: Vec<f64>,
        len: usize,
        ch: usize,
        valid_from: usize,
    },
    Tokens(Vec<usize>),
}

/// Seeded Glorot-uniform initializer.
pub struct GlorotInit {
    rng: ChaCha8Rng,
}

impl GlorotInit {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn sample(&mut self, n: usize, fan_in: usize, fan_out: usize) -> Vec<f64> {
        let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
        (0..n)
            .map(|_| self.rng.random_range(-limit..limit))
            .collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "layer", rename_all = "snake_case")]
pub enum Layer {
    Dense(Dense),
    Relu(Relu),
    Sigmoid(Sigmoid),
    Embedding(Embedding),
    Conv1d(Conv1d),
    GlobalMaxPool(GlobalMaxPool),
    MeanPool(MeanPool),
    ToSequence(ToSequence),
}

impl Layer {
    pub fn forward(&mut self, x: Value) -> Value {
        match self {
            Layer::Dense(l) => l.forward(x),
            Layer::Relu(l) => l.forward(x),
            Layer::Sigmoid(l) => l.forward(x),
            Layer::Embedding(l) => l.forward(x),
            Layer::Conv1d(l) => l.forward(x),
            Layer::GlobalMaxPool(l) => l.forward(x),
            Layer::MeanPool(l) => l.forward(x),
            Layer::ToSequence(l) => l.forward(x),
        }
    }

    pub fn infer(&self, x: Value) -> Value {
        match self {
            Layer::Dense(l) => l.infer(x),
            Layer::Relu(l) => l.infer(x),
            Layer::Sigmoid(l) => l.infer(x),
            Layer::Embedding(l) => l.infer(x),
            Layer::Conv1d(l) => l.infer(x),
            Layer::GlobalMaxPool(l) => l.infer(x),
            Layer::MeanPool(l) => l.infer(x),
            Layer::ToSequence(l) => l.infer(x),
        }
    }

    pub fn backward(&mut self, grad: Value) -> Value {
        match self {
            Layer::Dense(l) => l.backward(grad),
            Layer::Relu(l) => l.backward(grad),
            Layer::Sigmoid(l) => l.backward(grad),
            Layer::Embedding(l) => l.backward(grad),
            Layer::Conv1d(l) => l.backward(grad),
            Layer::GlobalMaxPool(l) => l.backward(grad),
            Layer::MeanPool(l) => l.backward(grad),
            Layer::ToSequence(l) => l.backward(grad),
        }
    }

    /// Disjoint (parameters, gradients) pairs for the optimizer.
    pub fn param_grad_pairs(&mut self) -> Vec<(&mut Vec<f64>, &mut Vec<f64>)> {
        match self {
            Layer::Dense(l) => {
                l.ensure_grads();
                vec![(&mut l.w, &mut l.grad_w), (&mut l.b, &mut l.grad_b)]
            }
            Layer::Conv1d(l) => {
                l.ensure_grads();
                vec![(&mut l.w, &mut l.grad_w), (&mut l.b, &mut l.grad_b)]
            }
            Layer::Embedding(l) => {
                l.ensure_grads();
                vec![(&mut l.table, &mut l.grad)]
            }
            _ => Vec::new(),
        }
    }

    pub fn zero_grads(&mut self) {
        match self {
            Layer::Dense(l) => {
                l.ensure_grads();
                l.grad_w.iter_mut().for_each(|g| *g = 0.0);
                l.grad_b.iter_mut().for_each(|g| *g = 0.0);
            }
            Layer::Conv1d(l) => {
                l.ensure_grads();
                l.grad_w.iter_mut().for_each(|g| *g = 0.0);
                l.grad_b.iter_mut().for_each(|g| *g = 0.0);
            }
            Layer::Embedding(l) => {
                l.ensure_grads();
                l.grad.iter_mut().for_each(|g| *g = 0.0);
            }
            _ => {}
        }
    }

    pub fn param_count(&self) -> usize {
        match self {
            Layer::Dense(l) => l.w.len() + l.b.len(),
            Layer::Conv1d(l) => l.w.len() + l.b.len(),
            Layer::Embedding(l) => l.table.len(),
            _ => 0,
        }
    }

    /// Leading entries of parameter array 0 that never receive gradient
    /// (the embedding padding row).
    pub fn frozen_param_prefix(&self) -> usize {
        match self {
            Layer::Embedding(l) => l.dim,
            _ => 0,
        }
    }

    pub fn spec(&self) -> LayerSpec {
        match self {
            Layer::Dense(l) => LayerSpec::Dense { units: l.out_dim },
            Layer::Relu(_) => LayerSpec::Relu,
            Layer::Sigmoid(_) => LayerSpec::Sigmoid,
            Layer::Embedding(l) => LayerSpec::Embedding { dim: l.dim },
            Layer::Conv1d(l) => LayerSpec::Conv1d {
                filters: l.filters,
                width: l.width,
            },
            Layer::GlobalMaxPool(_) => LayerSpec::GlobalMaxPool,
            Layer::MeanPool(_) => LayerSpec::MeanPool,
            Layer::ToSequence(_) => LayerSpec::ToSequence,
        }
    }
}

/// Elementwise `max(0, x)`; the subgradient at the kink is 0.
pub fn relu(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

// ---------------------------------------------------------------- dense

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Dense {
    pub(crate) w: Vec<f64>, // out x in, row-major
    pub(crate) b: Vec<f64>,
    in_dim: usize,
    out_dim: usize,
    #[serde(skip)]
    pub(crate) grad_w: Vec<f64>,
    #[serde(skip)]
    pub(crate) grad_b: Vec<f64>,
    #[serde(skip)]
    cache_x: Vec<f64>,
}

impl Dense {
    pub fn glorot(in_dim: usize, out_dim: usize, init: &mut GlorotInit) -> Self {
        Self {
            w: init.sample(in_dim * out_dim, in_dim, out_dim),
            b: vec![0.0; out_dim],
            in_dim,
            out_dim,
            grad_w: Vec::new(),
            grad_b: Vec::new(),
            cache_x: Vec::new(),
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn bias(&self) -> &[f64] {
        &self.b
    }

    fn ensure_grads(&mut self) {
        if self.grad_w.len() != self.w.len() {
            self.grad_w = vec![0.0; self.w.len()];
            self.grad_b = vec![0.0; self.b.len()];
        }
    }

    fn compute(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.in_dim, "dense input width");
        (0..self.out_dim)
            .map(|o| {
                let row = &self.w[o * self.in_dim..(o + 1) * self.in_dim];
                row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.b[o]
            })
            .collect()
    }

    fn forward(&mut self, x: Value) -> Value {
        let Value::Flat(x) = x else {
            panic!("dense expects a flat input")
        };
        let y = self.compute(&x);
        self.cache_x = x;
        Value::Flat(y)
    }

    fn infer(&self, x: Value) -> Value {
        let Value::Flat(x) = x else {
            panic!("dense expects a flat input")
        };
        Value::Flat(self.compute(&x))
    }

    fn backward(&mut self, grad: Value) -> Value {
        let Value::Flat(dy) = grad else {
            panic!("dense expects a flat gradient")
        };
        self.ensure_grads();
        let mut dx = vec![0.0; self.in_dim];
        for o in 0..self.out_dim {
            let g = dy[o];
            self.grad_b[o] += g;
            let row = o * self.in_dim;
            for i in 0..self.in_dim {
                self.grad_w[row + i] += g * self.cache_x[i];
                dx[i] += g * self.w[row + i];
            }
        }
        Value::Flat(dx)
    }
}

// ---------------------------------------------------------------- relu

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Relu {
    #[serde(skip)]
    cache: Option<Value>,
}

fn map_elementwise(v: &Value, f: impl Fn(f64) -> f64) -> Value {
    match v {
        Value::Flat(x) => Value::Flat(x.iter().map(|&a| f(a)).collect()),
        Value::Seq {
            data,
            len,
            ch,
            valid_from,
        } => Value::Seq {
            data: data.iter().map(|&a| f(a)).collect(),
            len: *len,
            ch: *ch,
            valid_from: *valid_from,
        },
        Value::Tokens(_) => panic!("elementwise op on token ids"),
    }
}

impl Relu {
    fn forward(&mut self, x: Value) -> Value {
        let y = map_elementwise(&x, relu);
        self.cache = Some(x);
        y
    }

    fn infer(&self, x: Value) -> Value {
        map_elementwise(&x, relu)
    }

    fn backward(&mut self, grad: Value) -> Value {
        let cached = self.cache.as_ref().expect("relu backward before forward");
        match (cached, grad) {
            (Value::Flat(x), Value::Flat(dy)) => Value::Flat(
                x.iter()
                    .zip(dy)
                    .map(|(&a, g)| if a > 0.0 { g } else { 0.0 })
                    .collect(),
            ),
            (
                Value::Seq {
                    data,
                    len,
                    ch,
                    valid_from,
                },
                Value::Seq { data: dy, .. },
            ) => Value::Seq {
                data: data
                    .iter()
                    .zip(dy)
                    .map(|(&a, g)| if a > 0.0 { g } else { 0.0 })
                    .collect(),
                len: *len,
                ch: *ch,
                valid_from: *valid_from,
            },
            _ => panic!("relu gradient shape mismatch"),
        }
    }
}

// ---------------------------------------------------------------- sigmoid

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Sigmoid {
    #[serde(skip)]
    cache_y: Vec<f64>,
}

impl Sigmoid {
    fn forward(&mut self, x: Value) -> Value {
        let Value::Flat(x) = x else {
            panic!("sigmoid expects a flat input")
        };
        let y: Vec<f64> = x.iter().map(|&a| sigmoid(a)).collect();
        self.cache_y = y.clone();
        Value::Flat(y)
    }

    fn infer(&self, x: Value) -> Value {
        map_elementwise(&x, sigmoid)
    }

    fn backward(&mut self, grad: Value) -> Value {
        let Value::Flat(dy) = grad else {
            panic!("sigmoid expects a flat gradient")
        };
        Value::Flat(
            self.cache_y
                .iter()
                .zip(dy)
                .map(|(&y, g)| g * y * (1.0 - y))
                .collect(),
        )
    }
}

// ---------------------------------------------------------------- embedding

/// Trainable lookup table initialized from a pre-trained matrix. Row 0 is the
/// padding vector and stays frozen at zero.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Embedding {
    pub(crate) table: Vec<f64>, // rows x dim
    rows: usize,
    dim: usize,
    #[serde(skip)]
    pub(crate) grad: Vec<f64>,
    #[serde(skip)]
    cache_ids: Vec<usize>,
}

impl Embedding {
    pub fn from_matrix(matrix: &EmbeddingMatrix) -> Self {
        let rows = matrix.num_rows();
        let dim = matrix.dim();
        let mut table = Vec::with_capacity(rows * dim);
        for r in 0..rows {
            table.extend_from_slice(matrix.row(r));
        }
        Self {
            table,
            rows,
            dim,
            grad: Vec::new(),
            cache_ids: Vec::new(),
        }
    }

    fn ensure_grads(&mut self) {
        if self.grad.len() != self.table.len() {
            self.grad = vec![0.0; self.table.len()];
        }
    }

    fn lookup(&self, ids: &[usize]) -> Value {
        let mut data = Vec::with_capacity(ids.len() * self.dim);
        for &id in ids {
            assert!(id < self.rows, "token id {id} out of range");
            data.extend_from_slice(&self.table[id * self.dim..(id + 1) * self.dim]);
        }
        let valid_from = ids.iter().take_while(|&&id| id == 0).count();
        Value::Seq {
            data,
            len: ids.len(),
            ch: self.dim,
            valid_from,
        }
    }

    fn forward(&mut self, x: Value) -> Value {
        let Value::Tokens(ids) = x else {
            panic!("embedding expects token ids")
        };
        let out = self.lookup(&ids);
        self.cache_ids = ids;
        out
    }

    fn infer(&self, x: Value) -> Value {
        let Value::Tokens(ids) = x else {
            panic!("embedding expects token ids")
        };
        self.lookup(&ids)
    }

    fn backward(&mut self, grad: Value) -> Value {
        let Value::Seq { data, len, ch, .. } = grad else {
            panic!("embedding expects a sequence gradient")
        };
        assert_eq!(ch, self.dim);
        self.ensure_grads();
        for (t, &id) in self.cache_ids.iter().enumerate().take(len) {
            if id == 0 {
                continue; // padding row stays frozen
            }
            let row = id * self.dim;
            for d in 0..self.dim {
                self.grad[row + d] += data[t * ch + d];
            }
        }
        Value::Tokens(Vec::new())
    }
}

// ---------------------------------------------------------------- conv1d

/// Valid (no padding) 1-D convolution over a `(time x channels)` sequence.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Conv1d {
    pub(crate) w: Vec<f64>, // filters x (width * in_ch)
    pub(crate) b: Vec<f64>,
    filters: usize,
    width: usize,
    in_ch: usize,
    #[serde(skip)]
    pub(crate) grad_w: Vec<f64>,
    #[serde(skip)]
    pub(crate) grad_b: Vec<f64>,
    #[serde(skip)]
    cache: Option<(Vec<f64>, usize, usize)>, // (data, len, ch)
    #[serde(skip)]
    last_out_len: usize,
}

impl Conv1d {
    pub fn glorot(filters: usize, width: usize, in_ch: usize, init: &mut GlorotInit) -> Self {
        Self {
            w: init.sample(filters * width * in_ch, width * in_ch, width * filters),
            b: vec![0.0; filters],
            filters,
            width,
            in_ch,
            grad_w: Vec::new(),
            grad_b: Vec::new(),
            cache: None,
            last_out_len: 0,
        }
    }

    pub fn bias(&self) -> &[f64] {
        &self.b
    }

    pub fn last_output_len(&self) -> usize {
        self.last_out_len
    }

    fn ensure_grads(&mut self) {
        if self.grad_w.len() != self.w.len() {
            self.grad_w = vec![0.0; self.w.len()];
            self.grad_b = vec![0.0; self.b.len()];
        }
    }

    fn compute(&self, data: &[f64], len: usize, ch: usize) -> (Vec<f64>, usize) {
        assert_eq!(ch, self.in_ch, "conv channel width");
        assert!(len >= self.width, "sequence shorter than kernel");
        let out_len = len - self.width + 1;
        let window = self.width * ch;
        let mut out = vec![0.0; out_len * self.filters];
        for t in 0..out_len {
            // the receptive field is contiguous in row-major (time x ch) layout
            let x = &data[t * ch..t * ch + window];
            for f in 0..self.filters {
                let wrow = &self.w[f * window..(f + 1) * window];
                let mut acc = self.b[f];
                for (wv, xv) in wrow.iter().zip(x) {
                    acc += wv * xv;
                }
                out[t * self.filters + f] = acc;
            }
        }
        (out, out_len)
    }

    fn forward(&mut self, x: Value) -> Value {
        let Value::Seq { data, len, ch, .. } = x else {
            panic!("conv expects a sequence")
        };
        let (out, out_len) = self.compute(&data, len, ch);
        self.cache = Some((data, len, ch));
        self.last_out_len = out_len;
        Value::Seq {
            data: out,
            len: out_len,
            ch: self.filters,
            valid_from: 0,
        }
    }

    fn infer(&self, x: Value) -> Value {
        let Value::Seq { data, len, ch, .. } = x else {
            panic!("conv expects a sequence")
        };
        let (out, out_len) = self.compute(&data, len, ch);
        Value::Seq {
            data: out,
            len: out_len,
            ch: self.filters,
            valid_from: 0,
        }
    }

    fn backward(&mut self, grad: Value) -> Value {
        let Value::Seq {
            data: dy,
            len: out_len,
            ch: out_ch,
            ..
        } = grad
        else {
            panic!("conv expects a sequence gradient")
        };
        assert_eq!(out_ch, self.filters);
        self.ensure_grads();
        let (x, len, ch) = self.cache.as_ref().expect("conv backward before forward");
        let window = self.width * ch;
        let mut dx = vec![0.0; len * ch];
        for t in 0..out_len {
            let x_win = &x[t * ch..t * ch + window];
            let dx_win = &mut dx[t * ch..t * ch + window];
            for f in 0..self.filters {
                let g = dy[t * self.filters + f];
                if g == 0.0 {
                    continue;
                }
                self.grad_b[f] += g;
                let wrow = f * window;
                for k in 0..window {
                    self.grad_w[wrow + k] += g * x_win[k];
                    dx_win[k] += g * self.w[wrow + k];
                }
            }
        }
        Value::Seq {
            data: dx,
            len: *len,
            ch: *ch,
            valid_from: 0,
        }
    }
}

// ---------------------------------------------------------------- pooling

/// Per-channel max over time; gradients route to the first argmax position.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct GlobalMaxPool {
    #[serde(skip)]
    argmax: Vec<usize>,
    #[serde(skip)]
    in_shape: (usize, usize),
}

impl GlobalMaxPool {
    fn compute(data: &[f64], len: usize, ch: usize) -> (Vec<f64>, Vec<usize>) {
        assert!(len > 0);
        let mut out = vec![f64::NEG_INFINITY; ch];
        let mut arg = vec![0usize; ch];
        for t in 0..len {
            for c in 0..ch {
                let v = data[t * ch + c];
                if v > out[c] {
                    out[c] = v;
                    arg[c] = t;
                }
            }
        }
        (out, arg)
    }

    fn forward(&mut self, x: Value) -> Value {
        let Value::Seq { data, len, ch, .. } = x else {
            panic!("max pool expects a sequence")
        };
        let (out, arg) = Self::compute(&data, len, ch);
        self.argmax = arg;
        self.in_shape = (len, ch);
        Value::Flat(out)
    }

    fn infer(&self, x: Value) -> Value {
        let Value::Seq { data, len, ch, .. } = x else {
            panic!("max pool expects a sequence")
        };
        Value::Flat(Self::compute(&data, len, ch).0)
    }

    fn backward(&mut self, grad: Value) -> Value {
        let Value::Flat(dy) = grad else {
            panic!("max pool expects a flat gradient")
        };
        let (len, ch) = self.in_shape;
        let mut dx = vec![0.0; len * ch];
        for c in 0..ch {
            dx[self.argmax[c] * ch + c] = dy[c];
        }
        Value::Seq {
            data: dx,
            len,
            ch,
            valid_from: 0,
        }
    }
}

/// Mean over non-pad time positions; all-pad input pools to zero.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct MeanPool {
    #[serde(skip)]
    in_shape: (usize, usize),
    #[serde(skip)]
    valid_from: usize,
}

impl MeanPool {
    fn compute(data: &[f64], len: usize, ch: usize, valid_from: usize) -> Vec<f64> {
        let n = len - valid_from;
        let mut out = vec![0.0; ch];
        if n == 0 {
            return out;
        }
        for t in valid_from..len {
            for c in 0..ch {
                out[c] += data[t * ch + c] / n as f64;
            }
        }
        out
    }

    fn forward(&mut self, x: Value) -> Value {
        let Value::Seq {
            data,
            len,
            ch,
            valid_from,
        } = x
        else {
            panic!("mean pool expects a sequence")
        };
        self.in_shape = (len, ch);
        self.valid_from = valid_from;
        Value::Flat(Self::compute(&data, len, ch, valid_from))
    }

    fn infer(&self, x: Value) -> Value {
        let Value::Seq {
            data,
            len,
            ch,
            valid_from,
        } = x
        else {
            panic!("mean pool expects a sequence")
        };
        Value::Flat(Self::compute(&data, len, ch, valid_from))
    }

    fn backward(&mut self, grad: Value) -> Value {
        let Value::Flat(dy) = grad else {
            panic!("mean pool expects a flat gradient")
        };
        let (len, ch) = self.in_shape;
        let mut dx = vec![0.0; len * ch];
        let n = len - self.valid_from;
        if n > 0 {
            for t in self.valid_from..len {
                for c in 0..ch {
                    dx[t * ch + c] = dy[c] / n as f64;
                }
            }
        }
        Value::Seq {
            data: dx,
            len,
            ch,
            valid_from: self.valid_from,
        }
    }
}

/// Reads a flat feature vector as a length-`F` 1-channel sequence.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ToSequence {
    #[serde(skip)]
    dim: usize,
}

impl ToSequence {
    fn forward(&mut self, x: Value) -> Value {
        let Value::Flat(x) = x else {
            panic!("to-sequence expects a flat input")
        };
        self.dim = x.len();
        let len = x.len();
        Value::Seq {
            data: x,
            len,
            ch: 1,
            valid_from: 0,
        }
    }

    fn infer(&self, x: Value) -> Value {
        let Value::Flat(x) = x else {
            panic!("to-sequence expects a flat input")
        };
        let len = x.len();
        Value::Seq {
            data: x,
            len,
            ch: 1,
            valid_from: 0,
        }
    }

    fn backward(&mut self, grad: Value) -> Value {
        let Value::Seq { data, .. } = grad else {
            panic!("to-sequence expects a sequence")
        };
        Value::Flat(data)
    }
}
