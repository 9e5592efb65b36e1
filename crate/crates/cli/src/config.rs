//! The single config schema every numeric default lives in.
//!
//! `speechrisk config` prints it; `--config file.json` loads overrides and
//! individual flags override on top of that.

use serde::{Deserialize, Serialize};
use speechrisk::models::forest::ForestParams;
use speechrisk::models::logistic::LogisticParams;
use speechrisk::models::svm::SvmParams;
use speechrisk::neural::TrainConfig;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct FramingConfig {
    pub frame_size_ms: f64,
    pub frame_step_ms: f64,
}

impl Default for FramingConfig {
    fn default() -> Self {
        Self {
            frame_size_ms: 50.0,
            frame_step_ms: 25.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct EmbeddingDefaults {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub initial_lr: f64,
    pub min_lr: f64,
}

impl Default for EmbeddingDefaults {
    fn default() -> Self {
        Self {
            dim: 100,
            window: 5,
            negatives: 5,
            epochs: 5,
            initial_lr: 0.025,
            min_lr: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct NeuralDefaults {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub conv_filters: usize,
    pub conv_width: usize,
}

impl Default for NeuralDefaults {
    fn default() -> Self {
        let t = TrainConfig::default();
        Self {
            epochs: t.epochs,
            batch_size: t.batch_size,
            learning_rate: t.learning_rate,
            beta1: t.beta1,
            beta2: t.beta2,
            epsilon: t.epsilon,
            conv_filters: speechrisk::neural::DEFAULT_CONV_FILTERS,
            conv_width: speechrisk::neural::DEFAULT_CONV_WIDTH,
        }
    }
}

/// Every tunable default of the toolkit, JSON-serializable.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ToolConfig {
    pub framing: FramingConfig,
    pub embedding: EmbeddingDefaults,
    /// pad/truncate length; None means the longest message in the corpus
    pub max_len: Option<usize>,
    pub k_folds: KFoldDefault,
    pub logistic: LogisticParams,
    pub svm: SvmParams,
    pub forest: ForestParams,
    pub neural: NeuralDefaults,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KFoldDefault(pub usize);

impl Default for KFoldDefault {
    fn default() -> Self {
        Self(5)
    }
}

impl ToolConfig {
    pub fn load(path: Option<&std::path::Path>) -> anyhow::Result<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)?;
                Ok(serde_json::from_str(&text)?)
            }
        }
    }

    pub fn neural_train_config(&self, seed: u64) -> TrainConfig {
        TrainConfig {
            epochs: self.neural.epochs,
            batch_size: self.neural.batch_size,
            learning_rate: self.neural.learning_rate,
            beta1: self.neural.beta1,
            beta2: self.neural.beta2,
            epsilon: self.neural.epsilon,
            seed,
        }
    }
}
