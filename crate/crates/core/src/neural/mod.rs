//! Minimal feed-forward / convolutional network engine.
//!
//! Reverse-mode gradients are hand-written per layer; Adam drives the
//! updates and the loss is class-weighted binary cross-entropy. Four fixed
//! variants cover both feature sets:
//!
//! * `acoustic_ann`  — dense 128/64/32 with ReLU, sigmoid output
//! * `linguistic_ann` — embedding, mean pool over non-pad positions, dense 128
//! * `acoustic_cnn`  — the feature vector read as a 1-channel sequence,
//!   250 width-3 filters, global max pool
//! * `linguistic_cnn` — embedding, 250 width-3 filters, global max pool
//!
//! All weights are Glorot-uniform from a seeded stream; embedding layers are
//! initialized from a trained [`EmbeddingMatrix`](crate::text::embedding::EmbeddingMatrix)
//! and stay trainable except for the frozen all-zero padding row.

pub mod adam;
pub mod layers;
pub mod train;

use serde::{Deserialize, Serialize};

use crate::models::ModelInput;
use crate::text::embedding::EmbeddingMatrix;
use crate::{Error, Result};
use layers::{Conv1d, Dense, Embedding, Layer, Value};

pub use train::{train_network, weighted_bce, TrainConfig};

/// The four fixed architectures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NetworkVariant {
    AcousticAnn,
    LinguisticAnn,
    AcousticCnn,
    LinguisticCnn,
}

impl NetworkVariant {
    pub fn needs_tokens(&self) -> bool {
        matches!(
            self,
            NetworkVariant::LinguisticAnn | NetworkVariant::LinguisticCnn
        )
    }
}

/// Shape information the builder needs.
pub enum InputMeta<'a> {
    Dense {
        dim: usize,
    },
    Tokens {
        max_len: usize,
        embedding: &'a EmbeddingMatrix,
    },
}

/// Architecture summary of one layer, for reports and validation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayerSpec {
    Dense { units: usize },
    Relu,
    Sigmoid,
    Embedding { dim: usize },
    Conv1d { filters: usize, width: usize },
    GlobalMaxPool,
    MeanPool,
    ToSequence,
}

/// A built network: an ordered layer stack plus its variant tag.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Network {
    pub variant: NetworkVariant,
    pub layers: Vec<Layer>,
    /// filters for conv variants, hidden width for the dense variants
    pub conv_filters: usize,
    pub conv_width: usize,
}

/// Number of conv filters in both CNN variants.
pub const DEFAULT_CONV_FILTERS: usize = 250;
/// Conv kernel width (valid padding).
pub const DEFAULT_CONV_WIDTH: usize = 3;

/// Builds a seeded, Glorot-initialized network.
pub fn build_network(variant: NetworkVariant, meta: &InputMeta, seed: u64) -> Result<Network> {
    build_network_sized(
        variant,
        meta,
        seed,
        DEFAULT_CONV_FILTERS,
        DEFAULT_CONV_WIDTH,
    )
}

/// [`build_network`] with explicit conv shape, for tests and config overrides.
pub fn build_network_sized(
    variant: NetworkVariant,
    meta: &InputMeta,
    seed: u64,
    conv_filters: usize,
    conv_width: usize,
) -> Result<Network> {
    let mut init = layers::GlorotInit::new(seed);
    let layers = match (variant, meta) {
        (NetworkVariant::AcousticAnn, InputMeta::Dense { dim }) => vec![
            Layer::Dense(Dense::glorot(*dim, 128, &mut init)),
            Layer::Relu(Default::default()),
            Layer::Dense(Dense::glorot(128, 64, &mut init)),
            Layer::Relu(Default::default()),
            Layer::Dense(Dense::glorot(64, 32, &mut init)),
            Layer::Relu(Default::default()),
            Layer::Dense(Dense::glorot(32, 1, &mut init)),
            Layer::Sigmoid(Default::default()),
        ],
        (NetworkVariant::AcousticCnn, InputMeta::Dense { dim }) => {
            if *dim < conv_width {
                return Err(Error::IncompatibleInputMeta(format!(
                    "feature dim {dim} shorter than conv width {conv_width}"
                )));
            }
            vec![
                Layer::ToSequence(Default::default()),
                Layer::Conv1d(Conv1d::glorot(conv_filters, conv_width, 1, &mut init)),
                Layer::Relu(Default::default()),
                Layer::GlobalMaxPool(Default::default()),
                Layer::Dense(Dense::glorot(conv_filters, 1, &mut init)),
                Layer::Sigmoid(Default::default()),
            ]
        }
        (NetworkVariant::LinguisticAnn, InputMeta::Tokens { embedding, .. }) => {
            let dim = embedding.dim();
            vec![
                Layer::Embedding(Embedding::from_matrix(embedding)),
                Layer::MeanPool(Default::default()),
                Layer::Dense(Dense::glorot(dim, 128, &mut init)),
                Layer::Relu(Default::default()),
                Layer::Dense(Dense::glorot(128, 1, &mut init)),
                Layer::Sigmoid(Default::default()),
            ]
        }
        (NetworkVariant::LinguisticCnn, InputMeta::Tokens { max_len, embedding }) => {
            if *max_len < conv_width {
                return Err(Error::IncompatibleInputMeta(format!(
                    "max_len {max_len} shorter than conv width {conv_width}"
                )));
            }
            let dim = embedding.dim();
            vec![
                Layer::Embedding(Embedding::from_matrix(embedding)),
                Layer::Conv1d(Conv1d::glorot(conv_filters, conv_width, dim, &mut init)),
                Layer::Relu(Default::default()),
                Layer::GlobalMaxPool(Default::default()),
                Layer::Dense(Dense::glorot(conv_filters, 1, &mut init)),
                Layer::Sigmoid(Default::default()),
            ]
        }
        _ => {
            return Err(Error::IncompatibleInputMeta(
                "variant and input meta disagree (dense vs tokens)".into(),
            ))
        }
    };
    Ok(Network {
        variant,
        layers,
        conv_filters,
        conv_width,
    })
}

impl Network {
    /// Architecture summary in layer order.
    pub fn spec(&self) -> Vec<LayerSpec> {
        self.layers.iter().map(Layer::spec).collect()
    }

    /// Total number of trainable parameters.
    pub fn param_count(&self) -> usize {
        self.layers.iter().map(Layer::param_count).sum()
    }

    fn value_from(&self, input: &ModelInput) -> Result<Value> {
        match (self.variant.needs_tokens(), input) {
            (false, ModelInput::Dense(x)) => Ok(Value::Flat(x.to_vec())),
            (true, ModelInput::Tokens(ids)) => Ok(Value::Tokens(ids.to_vec())),
            _ => Err(Error::IncompatibleInputMeta(
                "network variant and input kind disagree".into(),
            )),
        }
    }

    /// Training-path forward pass; caches intermediates for [`Self::backward`].
    pub fn forward_train(&mut self, input: &ModelInput) -> Result<f64> {
        let mut value = self.value_from(input)?;
        for layer in &mut self.layers {
            value = layer.forward(value);
        }
        match value {
            Value::Flat(v) if v.len() == 1 => Ok(v[0]),
            _ => Err(Error::IncompatibleInputMeta(
                "network does not end in a scalar".into(),
            )),
        }
    }

    /// Backpropagates the scalar loss gradient recorded against the last
    /// forward pass, accumulating parameter gradients.
    pub fn backward(&mut self, grad_output: f64) {
        let mut grad = Value::Flat(vec![grad_output]);
        for layer in self.layers.iter_mut().rev() {
            grad = layer.backward(grad);
        }
    }

    /// Inference-path forward pass; no caches, no mutation.
    pub fn score(&self, input: &ModelInput) -> Result<f64> {
        let mut value = self.value_from(input)?;
        for layer in &self.layers {
            value = layer.infer(value);
        }
        match value {
            Value::Flat(v) if v.len() == 1 => Ok(v[0]),
            _ => Err(Error::IncompatibleInputMeta(
                "network does not end in a scalar".into(),
            )),
        }
    }

    pub fn zero_grads(&mut self) {
        for layer in &mut self.layers {
            layer.zero_grads();
        }
    }
}
