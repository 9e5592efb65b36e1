//! Soft-margin SVM trained by sequential minimal optimization.
//!
//! The dual is solved pairwise with per-example cost `C * w_class`, so the
//! class weights raise the penalty for margin violations on the minority
//! class. `score` returns the raw margin `sum(alpha_i y_i K(x_i, x)) + b`;
//! the sign decides the class and raw scores feed the ROC directly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::models::{validate_features, ClassWeights};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kernel", rename_all = "snake_case")]
pub enum Kernel {
    Linear,
    Rbf { gamma: f64 },
}

impl Kernel {
    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Kernel::Linear => a.iter().zip(b).map(|(x, y)| x * y).sum(),
            Kernel::Rbf { gamma } => {
                let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                (-gamma * d2).exp()
            }
        }
    }
}

/// Kernel choice before gamma resolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum KernelSpec {
    Linear,
    /// RBF with `gamma = 1 / (num_features * variance_of_training_matrix)`.
    RbfScale,
    Rbf(f64),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SvmParams {
    pub kernel: KernelSpec,
    pub c: f64,
    pub tol: f64,
    pub max_passes: usize,
    pub seed: u64,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self {
            kernel: KernelSpec::RbfScale,
            c: 1.0,
            tol: 1e-3,
            max_passes: 200,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SvmModel {
    pub support_vectors: Vec<Vec<f64>>,
    /// `alpha_i * y_i` per support vector
    pub coefficients: Vec<f64>,
    pub bias: f64,
    pub kernel: Kernel,
    pub converged: bool,
    pub params: SvmParams,
}

impl SvmModel {
    pub fn score(&self, x: &[f64]) -> f64 {
        self.support_vectors
            .iter()
            .zip(&self.coefficients)
            .map(|(sv, c)| c * self.kernel.eval(sv, x))
            .sum::<f64>()
            + self.bias
    }
}

fn resolve_kernel(spec: KernelSpec, xs: &[Vec<f64>]) -> Kernel {
    match spec {
        KernelSpec::Linear => Kernel::Linear,
        KernelSpec::Rbf(g) => Kernel::Rbf { gamma: g },
        KernelSpec::RbfScale => {
            let dim = xs[0].len();
            let n = (xs.len() * dim) as f64;
            let mean: f64 = xs.iter().flatten().sum::<f64>() / n;
            let var: f64 = xs
                .iter()
                .flatten()
                .map(|v| (v - mean) * (v - mean))
                .sum::<f64>()
                / n;
            let gamma = if var > 1e-12 {
                1.0 / (dim as f64 * var)
            } else {
                1.0
            };
            Kernel::Rbf { gamma }
        }
    }
}

/// Trains by simplified SMO with seeded partner selection. If the pass cap is
/// hit without the working set settling, the best iterate is returned with
/// `converged = false`.
pub fn train_svm(
    xs: &[Vec<f64>],
    ys: &[u8],
    class_weights: &ClassWeights,
    params: &SvmParams,
) -> Result<SvmModel> {
    validate_features(xs)?;
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    let kernel = resolve_kernel(params.kernel, xs);
    let y: Vec<f64> = ys
        .iter()
        .map(|&v| if v == 1 { 1.0 } else { -1.0 })
        .collect();
    let cost: Vec<f64> = ys
        .iter()
        .map(|&v| params.c * class_weights.for_label(v))
        .collect();

    // precomputed Gram matrix; training sets here are small
    let gram: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| kernel.eval(&xs[i], &xs[j])).collect())
        .collect();

    let mut alpha = vec![0.0f64; n];
    let mut bias = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let f = |alpha: &[f64], bias: f64, i: usize, gram: &[Vec<f64>], y: &[f64]| -> f64 {
        (0..y.len())
            .map(|k| alpha[k] * y[k] * gram[k][i])
            .sum::<f64>()
            + bias
    };

    // attempts one pair update; returns true when the alphas moved
    let try_pair = |alpha: &mut Vec<f64>, bias: &mut f64, i: usize, j: usize, e_i: f64| -> bool {
        let e_j = f(alpha, *bias, j, &gram, &y) - y[j];
        let (a_i_old, a_j_old) = (alpha[i], alpha[j]);
        let (lo, hi) = if (y[i] - y[j]).abs() > 1e-12 {
            (
                (a_j_old - a_i_old).max(0.0),
                (cost[i] + a_j_old - a_i_old).min(cost[j]),
            )
        } else {
            (
                (a_i_old + a_j_old - cost[i]).max(0.0),
                (a_i_old + a_j_old).min(cost[j]),
            )
        };
        if hi - lo < 1e-12 {
            return false;
        }
        let eta = 2.0 * gram[i][j] - gram[i][i] - gram[j][j];
        if eta >= 0.0 {
            return false;
        }
        let a_j = (a_j_old - y[j] * (e_i - e_j) / eta).clamp(lo, hi);
        if (a_j - a_j_old).abs() < 1e-7 {
            return false;
        }
        let a_i = a_i_old + y[i] * y[j] * (a_j_old - a_j);

        let b1 =
            *bias - e_i - y[i] * (a_i - a_i_old) * gram[i][i] - y[j] * (a_j - a_j_old) * gram[i][j];
        let b2 =
            *bias - e_j - y[i] * (a_i - a_i_old) * gram[i][j] - y[j] * (a_j - a_j_old) * gram[j][j];
        *bias = if a_i > 0.0 && a_i < cost[i] {
            b1
        } else if a_j > 0.0 && a_j < cost[j] {
            b2
        } else {
            (b1 + b2) / 2.0
        };
        alpha[i] = a_i;
        alpha[j] = a_j;
        true
    };

    let mut passes_without_change = 0usize;
    let mut converged = false;
    for _ in 0..params.max_passes {
        let mut changed = 0usize;
        for i in 0..n {
            let e_i = f(&alpha, bias, i, &gram, &y) - y[i];
            let violates = (y[i] * e_i < -params.tol && alpha[i] < cost[i])
                || (y[i] * e_i > params.tol && alpha[i] > 0.0);
            if !violates {
                continue;
            }
            // walk partners in seeded-random order until one admits progress
            let mut partners: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            for k in (1..partners.len()).rev() {
                partners.swap(k, rng.random_range(0..k + 1));
            }
            for &j in &partners {
                if try_pair(&mut alpha, &mut bias, i, j, e_i) {
                    changed += 1;
                    break;
                }
            }
        }
        if changed == 0 {
            passes_without_change += 1;
            // the working set must survive two clean sweeps before we stop
            if passes_without_change >= 2 {
                converged = true;
                break;
            }
        } else {
            passes_without_change = 0;
        }
    }

    let mut support_vectors = Vec::new();
    let mut coefficients = Vec::new();
    for i in 0..n {
        if alpha[i] > 1e-12 {
            support_vectors.push(xs[i].clone());
            coefficients.push(alpha[i] * y[i]);
        }
    }
    Ok(SvmModel {
        support_vectors,
        coefficients,
        bias,
        kernel,
        converged,
        params: params.clone(),
    })
}
