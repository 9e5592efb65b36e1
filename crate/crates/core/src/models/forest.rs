//! Random forest of CART trees over bootstrap samples.
//!
//! Class weights enter through the bootstrap: each draw picks example `i`
//! with probability proportional to the weight of its class. Trees grow on
//! raw features until pure or fewer than 2 samples, splitting on the best
//! Gini reduction over a random `sqrt(F)` feature subset. The forest
//! probability is the mean of the per-tree class-1 votes and ties at 0.5
//! classify as positive.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::models::{validate_features, ClassWeights};
use crate::util::derive_seed;
use crate::Result;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    pub min_samples_split: usize,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: 5,
            min_samples_split: 2,
            seed: 0,
        }
    }
}

/// One node in a flattened tree array. `feature < 0` marks a leaf whose
/// `value` is the voted class.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TreeNode {
    pub feature: i32,
    pub threshold: f64,
    pub left: u32,
    pub right: u32,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<TreeNode>,
}

impl Tree {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut at = 0usize;
        loop {
            let node = &self.nodes[at];
            if node.feature < 0 {
                return node.value;
            }
            at = if x[node.feature as usize] <= node.threshold {
                node.left as usize
            } else {
                node.right as usize
            };
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ForestModel {
    pub trees: Vec<Tree>,
    pub params: ForestParams,
}

impl ForestModel {
    /// Mean of the per-tree class-1 votes.
    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.predict(x)).sum::<f64>() / self.trees.len() as f64
    }

    pub fn predict(&self, x: &[f64]) -> u8 {
        u8::from(self.predict_proba(x) >= 0.5)
    }
}

fn gini(n_pos: usize, n_neg: usize) -> f64 {
    let n = (n_pos + n_neg) as f64;
    if n == 0.0 {
        return 0.0;
    }
    let p = n_pos as f64 / n;
    let q = n_neg as f64 / n;
    1.0 - p * p - q * q
}

fn majority(ys: &[u8], idx: &[usize]) -> f64 {
    let pos = idx.iter().filter(|&&i| ys[i] == 1).count();
    // tie votes positive, consistent with the >= 0.5 decision rule
    if 2 * pos >= idx.len() {
        1.0
    } else {
        0.0
    }
}

fn build_node(
    xs: &[Vec<f64>],
    ys: &[u8],
    idx: &[usize],
    max_features: usize,
    min_samples_split: usize,
    rng: &mut ChaCha8Rng,
    nodes: &mut Vec<TreeNode>,
) -> u32 {
    let here = nodes.len() as u32;
    let pos = idx.iter().filter(|&&i| ys[i] == 1).count();
    let pure = pos == 0 || pos == idx.len();
    if pure || idx.len() < min_samples_split {
        nodes.push(TreeNode {
            feature: -1,
            threshold: 0.0,
            left: 0,
            right: 0,
            value: majority(ys, idx),
        });
        return here;
    }

    let dim = xs[0].len();
    // sample the feature subset without replacement
    let mut candidates: Vec<usize> = (0..dim).collect();
    for k in 0..max_features.min(dim) {
        let pick = rng.random_range(k..dim);
        candidates.swap(k, pick);
    }
    candidates.truncate(max_features.min(dim));

    let parent_impurity = gini(pos, idx.len() - pos);
    let mut best: Option<(f64, usize, f64)> = None; // (weighted impurity, feature, threshold)
    for &feat in &candidates {
        let mut vals: Vec<(f64, u8)> = idx.iter().map(|&i| (xs[i][feat], ys[i])).collect();
        vals.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let total_pos = pos;
        let mut left_pos = 0usize;
        for split in 1..vals.len() {
            if vals[split - 1].1 == 1 {
                left_pos += 1;
            }
            if vals[split].0 <= vals[split - 1].0 {
                continue; // identical values cannot separate
            }
            let left_n = split;
            let right_n = vals.len() - split;
            let weighted = (left_n as f64 * gini(left_pos, left_n - left_pos)
                + right_n as f64 * gini(total_pos - left_pos, right_n - (total_pos - left_pos)))
                / vals.len() as f64;
            if best.map_or(weighted < parent_impurity - 1e-12, |(b, _, _)| {
                weighted < b - 1e-12
            }) {
                let threshold = (vals[split - 1].0 + vals[split].0) / 2.0;
                best = Some((weighted, feat, threshold));
            }
        }
    }

    let Some((_, feature, threshold)) = best else {
        nodes.push(TreeNode {
            feature: -1,
            threshold: 0.0,
            left: 0,
            right: 0,
            value: majority(ys, idx),
        });
        return here;
    };

    nodes.push(TreeNode {
        feature: feature as i32,
        threshold,
        left: 0,
        right: 0,
        value: 0.0,
    });
    let (left_idx, right_idx): (Vec<usize>, Vec<usize>) =
        idx.iter().partition(|&&i| xs[i][feature] <= threshold);
    let left = build_node(
        xs,
        ys,
        &left_idx,
        max_features,
        min_samples_split,
        rng,
        nodes,
    );
    let right = build_node(
        xs,
        ys,
        &right_idx,
        max_features,
        min_samples_split,
        rng,
        nodes,
    );
    nodes[here as usize].left = left;
    nodes[here as usize].right = right;
    here
}

/// Weighted bootstrap indices: example `i` is drawn with probability
/// proportional to its class weight.
fn bootstrap_indices(ys: &[u8], class_weights: &ClassWeights, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut cumulative = Vec::with_capacity(ys.len());
    let mut acc = 0.0;
    for &y in ys {
        acc += class_weights.for_label(y);
        cumulative.push(acc);
    }
    (0..ys.len())
        .map(|_| {
            let r = rng.random::<f64>() * acc;
            cumulative.partition_point(|&c| c < r).min(ys.len() - 1)
        })
        .collect()
}

pub fn train_random_forest(
    xs: &[Vec<f64>],
    ys: &[u8],
    class_weights: &ClassWeights,
    params: &ForestParams,
) -> Result<ForestModel> {
    validate_features(xs)?;
    assert_eq!(xs.len(), ys.len());
    let dim = xs[0].len();
    let max_features = ((dim as f64).sqrt().floor() as usize).max(1);

    let trees = (0..params.n_trees)
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(params.seed, "tree", t as u64));
            let sample = bootstrap_indices(ys, class_weights, &mut rng);
            let mut nodes = Vec::new();
            build_node(
                xs,
                ys,
                &sample,
                max_features,
                params.min_samples_split,
                &mut rng,
                &mut nodes,
            );
            Tree { nodes }
        })
        .collect();
    Ok(ForestModel {
        trees,
        params: params.clone(),
    })
}
