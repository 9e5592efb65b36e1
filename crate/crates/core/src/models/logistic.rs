//! Class-weighted logistic regression trained by full-batch gradient descent.

use serde::{Deserialize, Serialize};

use crate::models::{validate_features, ClassWeights};
use crate::Result;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LogisticParams {
    pub l2: f64,
    pub lr: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for LogisticParams {
    fn default() -> Self {
        Self {
            l2: 1e-4,
            lr: 0.1,
            epochs: 500,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub params: LogisticParams,
    /// mean weighted loss after each epoch
    pub loss_trace: Vec<f64>,
}

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

impl LogisticModel {
    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        let z: f64 = self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias;
        sigmoid(z)
    }
}

/// Mean class-weighted cross-entropy plus `l2 * ||w||^2`, and its gradient.
/// The bias is unregularized.
pub fn loss_and_grad(
    weights: &[f64],
    bias: f64,
    xs: &[Vec<f64>],
    ys: &[u8],
    class_weights: &ClassWeights,
    l2: f64,
) -> (f64, Vec<f64>, f64) {
    let n = xs.len() as f64;
    let dim = weights.len();
    let mut loss = 0.0;
    let mut grad_w = vec![0.0; dim];
    let mut grad_b = 0.0;
    for (x, &y) in xs.iter().zip(ys) {
        let z: f64 = weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + bias;
        let p = sigmoid(z).clamp(1e-15, 1.0 - 1e-15);
        let cw = class_weights.for_label(y);
        let yf = y as f64;
        loss += -cw * (yf * p.ln() + (1.0 - yf) * (1.0 - p).ln()) / n;
        let g = cw * (p - yf) / n;
        for (gw, v) in grad_w.iter_mut().zip(x) {
            *gw += g * v;
        }
        grad_b += g;
    }
    for (gw, w) in grad_w.iter_mut().zip(weights) {
        loss += l2 * w * w;
        *gw += 2.0 * l2 * w;
    }
    (loss, grad_w, grad_b)
}

/// Trains on standardized features. Deterministic: zero initialization and
/// full-batch updates make the seed irrelevant to the result.
pub fn train_logistic(
    xs: &[Vec<f64>],
    ys: &[u8],
    class_weights: &ClassWeights,
    params: &LogisticParams,
) -> Result<LogisticModel> {
    validate_features(xs)?;
    assert_eq!(xs.len(), ys.len());
    let dim = xs[0].len();
    let mut weights = vec![0.0; dim];
    let mut bias = 0.0;
    let mut loss_trace = Vec::with_capacity(params.epochs);
    for _ in 0..params.epochs {
        let (loss, grad_w, grad_b) =
            loss_and_grad(&weights, bias, xs, ys, class_weights, params.l2);
        for (w, g) in weights.iter_mut().zip(&grad_w) {
            *w -= params.lr * g;
        }
        bias -= params.lr * grad_b;
        loss_trace.push(loss);
    }
    Ok(LogisticModel {
        weights,
        bias,
        params: params.clone(),
        loss_trace,
    })
}
