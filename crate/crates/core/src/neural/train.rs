//! Mini-batch training on class-weighted binary cross-entropy.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::models::{ClassWeights, ModelInput};
use crate::neural::adam::Adam;
use crate::neural::Network;
use crate::{Error, Result};

/// Predictions are clamped into `[CLAMP, 1 - CLAMP]` inside the loss, which
/// bounds the per-example loss at about `16.1 * w`.
pub const CLAMP: f64 = 1e-7;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 250,
            batch_size: 32,
            learning_rate: 0.001,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            seed: 0,
        }
    }
}

/// `-w_y * [y log p + (1-y) log(1-p)]` with `p` clamped away from 0 and 1.
pub fn weighted_bce(p: f64, y: u8, weights: &ClassWeights) -> f64 {
    let p = p.clamp(CLAMP, 1.0 - CLAMP);
    let w = weights.for_label(y);
    if y == 1 {
        -w * p.ln()
    } else {
        -w * (1.0 - p).ln()
    }
}

/// d(weighted_bce)/dp at the clamped prediction.
fn weighted_bce_grad(p: f64, y: u8, weights: &ClassWeights) -> f64 {
    let p = p.clamp(CLAMP, 1.0 - CLAMP);
    let w = weights.for_label(y);
    if y == 1 {
        -w / p
    } else {
        w / (1.0 - p)
    }
}

/// Owned training input, one per example.
#[derive(Debug, Clone)]
pub enum TrainInput {
    Dense(Vec<f64>),
    Tokens(Vec<usize>),
}

impl TrainInput {
    pub fn as_model_input(&self) -> ModelInput<'_> {
        match self {
            TrainInput::Dense(x) => ModelInput::Dense(x),
            TrainInput::Tokens(ids) => ModelInput::Tokens(ids),
        }
    }
}

/// Trains in place and returns the per-epoch mean loss trace. Examples are
/// reshuffled every epoch from a seeded stream; a non-finite loss aborts with
/// [`Error::DivergedLoss`].
pub fn train_network(
    network: &mut Network,
    inputs: &[TrainInput],
    labels: &[u8],
    class_weights: &ClassWeights,
    config: &TrainConfig,
) -> Result<Vec<f64>> {
    assert_eq!(inputs.len(), labels.len());
    let n = inputs.len();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut adam = Adam::new(
        config.learning_rate,
        config.beta1,
        config.beta2,
        config.epsilon,
    );
    let mut order: Vec<usize> = (0..n).collect();
    let mut trace = Vec::with_capacity(config.epochs);

    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(config.batch_size.max(1)) {
            network.zero_grads();
            let scale = 1.0 / batch.len() as f64;
            for &i in batch {
                let p = network.forward_train(&inputs[i].as_model_input())?;
                epoch_loss += weighted_bce(p, labels[i], class_weights);
                network.backward(weighted_bce_grad(p, labels[i], class_weights) * scale);
            }
            let mut pairs: Vec<(&mut Vec<f64>, &mut Vec<f64>)> = Vec::new();
            for layer in &mut network.layers {
                pairs.extend(layer.param_grad_pairs());
            }
            adam.step(&mut pairs);
        }
        let mean_loss = epoch_loss / n as f64;
        if !mean_loss.is_finite() {
            return Err(Error::DivergedLoss { epoch });
        }
        trace.push(mean_loss);
    }
    Ok(trace)
}
