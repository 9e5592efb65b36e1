//! Skip-gram word embeddings with negative sampling.
//!
//! Single-threaded, seed-deterministic training: unigram^0.75 negative
//! sampling table, linear learning-rate decay, and a per-epoch mean loss
//! trace. Row 0 of the resulting matrix is the all-zero padding vector.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::text::{tokenize, Vocabulary};
use crate::{Error, Result};

/// Hyperparameters for embedding training.
#[derive(Debug, Clone)]
pub struct EmbeddingConfig {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub initial_lr: f64,
    pub min_lr: f64,
    pub seed: u64,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        Self {
            dim: 100,
            window: 5,
            negatives: 5,
            epochs: 5,
            initial_lr: 0.025,
            min_lr: 1e-4,
            seed: 0,
        }
    }
}

/// `(V+1) x dim` embedding table; row index equals vocabulary rank and row 0
/// is the padding vector.
#[derive(Debug, Clone)]
pub struct EmbeddingMatrix {
    rows: Vec<Vec<f64>>,
    dim: usize,
}

impl EmbeddingMatrix {
    /// Builds a matrix from explicit rows; row 0 must be the padding vector.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let dim = rows.first().map(Vec::len).unwrap_or(0);
        debug_assert!(rows.iter().all(|r| r.len() == dim));
        Self { rows, dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, index: usize) -> &[f64] {
        &self.rows[index]
    }

    /// Mean of the embedding rows for all non-pad ids; the zero vector when
    /// every id is padding.
    pub fn mean_embedding(&self, ids: &[usize]) -> Vec<f64> {
        let mut acc = vec![0.0; self.dim];
        let mut n = 0usize;
        for &id in ids.iter().filter(|&&id| id != 0) {
            for (a, v) in acc.iter_mut().zip(&self.rows[id]) {
                *a += v;
            }
            n += 1;
        }
        if n > 0 {
            for a in acc.iter_mut() {
                *a /= n as f64;
            }
        }
        acc
    }
}

/// Training output: the matrix plus the mean loss per epoch.
pub struct TrainedEmbeddings {
    pub matrix: EmbeddingMatrix,
    pub epoch_losses: Vec<f64>,
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Trains skip-gram embeddings on a corpus against a fitted vocabulary.
pub fn train_embeddings<S: AsRef<str>>(
    corpus: &[S],
    vocab: &Vocabulary,
    config: &EmbeddingConfig,
) -> Result<TrainedEmbeddings> {
    if corpus.is_empty() || vocab.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let dim = config.dim;
    let v = vocab.len();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let sentences: Vec<Vec<usize>> = corpus
        .iter()
        .map(|doc| {
            tokenize(doc.as_ref())
                .iter()
                .filter_map(|t| vocab.index_of(t))
                .collect()
        })
        .collect();

    // unigram^0.75 cumulative sampling table over ranks 1..=V
    let mut cumulative = Vec::with_capacity(v);
    let mut acc = 0.0f64;
    for rank in 1..=v {
        acc += (vocab.frequency(rank).unwrap() as f64).powf(0.75);
        cumulative.push(acc);
    }
    let table_total = acc;

    // input vectors small uniform, output vectors zero (row 0 stays zero)
    let mut w_in = vec![vec![0.0f64; dim]; v + 1];
    for row in w_in.iter_mut().skip(1) {
        for x in row.iter_mut() {
            *x = (rng.random::<f64>() - 0.5) / dim as f64;
        }
    }
    let mut w_out = vec![vec![0.0f64; dim]; v + 1];

    let positions_per_epoch: usize = sentences.iter().map(Vec::len).sum();
    let total_steps = (config.epochs * positions_per_epoch).max(1);
    let mut step = 0usize;

    let sample_negative = |rng: &mut ChaCha8Rng| -> usize {
        let r = rng.random::<f64>() * table_total;
        // first cumulative entry >= r
        let mut lo = 0usize;
        let mut hi = cumulative.len() - 1;
        while lo < hi {
            let mid = (lo + hi) / 2;
            if cumulative[mid] < r {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo + 1 // ranks are 1-based
    };

    let mut epoch_losses = Vec::with_capacity(config.epochs);
    for _ in 0..config.epochs {
        let mut loss_sum = 0.0f64;
        let mut loss_count = 0usize;
        for sentence in &sentences {
            for (i, &center) in sentence.iter().enumerate() {
                let progress = step as f64 / total_steps as f64;
                let lr = config.initial_lr + (config.min_lr - config.initial_lr) * progress;
                step += 1;

                let lo = i.saturating_sub(config.window);
                let hi = (i + config.window + 1).min(sentence.len());
                for j in lo..hi {
                    if j == i {
                        continue;
                    }
                    let context = sentence[j];
                    let mut grad_center = vec![0.0f64; dim];
                    let mut pair_loss = 0.0f64;

                    // positive target then sampled negatives
                    for t in 0..=config.negatives {
                        let (target, label) = if t == 0 {
                            (context, 1.0)
                        } else {
                            let neg = sample_negative(&mut rng);
                            if neg == context {
                                continue;
                            }
                            (neg, 0.0)
                        };
                        let dot: f64 = w_in[center]
                            .iter()
                            .zip(&w_out[target])
                            .map(|(a, b)| a * b)
                            .sum();
                        let s = sigmoid(dot);
                        pair_loss -= if label > 0.5 {
                            s.max(1e-12).ln()
                        } else {
                            (1.0 - s).max(1e-12).ln()
                        };
                        let g = (s - label) * lr;
                        for d in 0..dim {
                            grad_center[d] += g * w_out[target][d];
                            w_out[target][d] -= g * w_in[center][d];
                        }
                    }
                    for d in 0..dim {
                        w_in[center][d] -= grad_center[d];
                    }
                    loss_sum += pair_loss;
                    loss_count += 1;
                }
            }
        }
        epoch_losses.push(if loss_count > 0 {
            loss_sum / loss_count as f64
        } else {
            0.0
        });
    }

    Ok(TrainedEmbeddings {
        matrix: EmbeddingMatrix { rows: w_in, dim },
        epoch_losses,
    })
}

/// Cosine similarity between two vectors; 0 when either has zero norm.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    dot / (na * nb)
}
