//! Stratified cross-validation with sensitivity, specificity, and AUC.
//!
//! Folds stratify by recording (default) or group by subject so one
//! speaker's recordings never straddle train and test. Per fold, class
//! weights and feature standardization are fitted on the training split
//! only. AUC uses the Mann-Whitney formulation: the probability that a
//! random positive outscores a random negative, ties counted one half.

pub mod plot;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::models::forest::{train_random_forest, ForestParams};
use crate::models::logistic::{train_logistic, LogisticParams};
use crate::models::svm::{train_svm, SvmParams};
use crate::models::{balanced_class_weights, ClassWeights, ModelInput, Standardizer, TrainedModel};
use crate::neural::train::TrainInput;
use crate::neural::{build_network_sized, train_network, InputMeta, NetworkVariant, TrainConfig};
use crate::text::embedding::EmbeddingMatrix;
use crate::util::{derive_seed, fnv1a64_hex};
use crate::{Error, Result};

/// Which per-recording representation feeds the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureSet {
    Acoustic,
    Linguistic,
}

impl FeatureSet {
    pub fn name(&self) -> &'static str {
        match self {
            FeatureSet::Acoustic => "acoustic",
            FeatureSet::Linguistic => "linguistic",
        }
    }

    pub const ALL: [FeatureSet; 2] = [FeatureSet::Acoustic, FeatureSet::Linguistic];
}

/// The five classifier families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Lr,
    Svm,
    Rf,
    Ann,
    Cnn,
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Lr => "lr",
            ModelKind::Svm => "svm",
            ModelKind::Rf => "rf",
            ModelKind::Ann => "ann",
            ModelKind::Cnn => "cnn",
        }
    }

    pub const ALL: [ModelKind; 5] = [
        ModelKind::Lr,
        ModelKind::Svm,
        ModelKind::Rf,
        ModelKind::Ann,
        ModelKind::Cnn,
    ];
}

/// Everything `run_cv` needs about the data, precomputed.
#[derive(Debug, Clone)]
pub struct PreparedDataset {
    pub labels: Vec<u8>,
    pub source_ids: Vec<String>,
    pub subject_ids: Vec<String>,
    /// per-recording acoustic vectors
    pub acoustic: Option<Vec<Vec<f64>>>,
    /// padded token id sequences
    pub tokens: Option<Vec<Vec<usize>>>,
    pub embedding: Option<EmbeddingMatrix>,
}

impl PreparedDataset {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Hyperparameters and split policy for one CV run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CvConfig {
    pub k: usize,
    pub seed: u64,
    pub use_class_weights: bool,
    pub group_by_subject: bool,
    pub logistic: LogisticParams,
    pub svm: SvmParams,
    pub forest: ForestParams,
    pub neural: TrainConfig,
    pub conv_filters: usize,
    pub conv_width: usize,
}

impl Default for CvConfig {
    fn default() -> Self {
        Self {
            k: 5,
            seed: 0,
            use_class_weights: true,
            group_by_subject: false,
            logistic: LogisticParams::default(),
            svm: SvmParams::default(),
            forest: ForestParams::default(),
            neural: TrainConfig::default(),
            conv_filters: crate::neural::DEFAULT_CONV_FILTERS,
            conv_width: crate::neural::DEFAULT_CONV_WIDTH,
        }
    }
}

/// Fold index per example.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldAssignment {
    pub fold_of: Vec<usize>,
    pub k: usize,
}

impl FoldAssignment {
    pub fn train_test(&self, fold: usize) -> (Vec<usize>, Vec<usize>) {
        let mut train = Vec::new();
        let mut test = Vec::new();
        for (i, &f) in self.fold_of.iter().enumerate() {
            if f == fold {
                test.push(i);
            } else {
                train.push(i);
            }
        }
        (train, test)
    }
}

/// Shuffles each class with a seeded stream and deals round-robin, so
/// per-class fold counts differ by at most one.
pub fn stratified_kfold(labels: &[u8], k: usize, seed: u64) -> Result<FoldAssignment> {
    for class in [0u8, 1u8] {
        let count = labels.iter().filter(|&&y| y == class).count();
        if count < k {
            return Err(Error::ClassTooSmall { class, count, k });
        }
    }
    let mut fold_of = vec![0usize; labels.len()];
    for class in [0u8, 1u8] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, "stratum", class as u64));
        idx.shuffle(&mut rng);
        for (j, &i) in idx.iter().enumerate() {
            fold_of[i] = j % k;
        }
    }
    Ok(FoldAssignment { fold_of, k })
}

/// Keeps every recording of one subject inside the same fold. Subjects are
/// stratified by whether any of their recordings is positive; within-fold
/// class balance is therefore approximate.
pub fn grouped_kfold(
    labels: &[u8],
    subjects: &[String],
    k: usize,
    seed: u64,
) -> Result<FoldAssignment> {
    assert_eq!(labels.len(), subjects.len());
    let mut order: Vec<&String> = Vec::new();
    for s in subjects {
        if !order.contains(&s) {
            order.push(s);
        }
    }
    let has_positive = |s: &str| {
        subjects
            .iter()
            .zip(labels)
            .any(|(sj, &y)| sj == s && y == 1)
    };
    let mut fold_of_subject = std::collections::HashMap::new();
    for (stratum, positive) in [(0u64, true), (1u64, false)] {
        let mut group: Vec<&String> = order
            .iter()
            .copied()
            .filter(|s| has_positive(s) == positive)
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, "subject-stratum", stratum));
        group.shuffle(&mut rng);
        for (j, s) in group.iter().enumerate() {
            fold_of_subject.insert((*s).clone(), j % k);
        }
    }
    let fold_of = subjects.iter().map(|s| fold_of_subject[s]).collect();
    Ok(FoldAssignment { fold_of, k })
}

/// Confusion counts at a decision threshold (predicted positive iff
/// `score >= threshold`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl Confusion {
    /// TP / (TP + FN); `(0.0, true)` when the fold has no positives.
    pub fn sensitivity(&self) -> (f64, bool) {
        let d = self.tp + self.fn_;
        if d == 0 {
            (0.0, true)
        } else {
            (self.tp as f64 / d as f64, false)
        }
    }

    /// TN / (TN + FP); `(0.0, true)` when the fold has no negatives.
    pub fn specificity(&self) -> (f64, bool) {
        let d = self.tn + self.fp;
        if d == 0 {
            (0.0, true)
        } else {
            (self.tn as f64 / d as f64, false)
        }
    }
}

pub fn confusion_at_threshold(scores: &[f64], labels: &[u8], threshold: f64) -> Result<Confusion> {
    if scores.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: scores.len(),
            right: labels.len(),
        });
    }
    let mut c = Confusion {
        tp: 0,
        fp: 0,
        tn: 0,
        fn_: 0,
    };
    for (&s, &y) in scores.iter().zip(labels) {
        let predicted = s >= threshold;
        match (predicted, y) {
            (true, 1) => c.tp += 1,
            (true, _) => c.fp += 1,
            (false, 1) => c.fn_ += 1,
            (false, _) => c.tn += 1,
        }
    }
    Ok(c)
}

/// Mann-Whitney AUC by direct pair counting, ties worth one half.
pub fn auc(scores: &[f64], labels: &[u8]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: scores.len(),
            right: labels.len(),
        });
    }
    let pos: Vec<f64> = scores
        .iter()
        .zip(labels)
        .filter(|(_, &y)| y == 1)
        .map(|(&s, _)| s)
        .collect();
    let neg: Vec<f64> = scores
        .iter()
        .zip(labels)
        .filter(|(_, &y)| y != 1)
        .map(|(&s, _)| s)
        .collect();
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::SingleClassFold);
    }
    let mut wins = 0.0f64;
    for &p in &pos {
        for &n in &neg {
            if p > n {
                wins += 1.0;
            } else if p == n {
                wins += 0.5;
            }
        }
    }
    Ok(wins / (pos.len() * neg.len()) as f64)
}

/// ROC points `(fpr, tpr)` from `(0,0)` to `(1,1)`, thresholds descending.
pub fn roc_points(scores: &[f64], labels: &[u8]) -> Vec<(f64, f64)> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap());
    let total_pos = labels.iter().filter(|&&y| y == 1).count().max(1) as f64;
    let total_neg = labels.iter().filter(|&&y| y != 1).count().max(1) as f64;

    let mut points = vec![(0.0, 0.0)];
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut i = 0usize;
    while i < order.len() {
        let s = scores[order[i]];
        // consume the whole tie group before emitting a point
        while i < order.len() && scores[order[i]] == s {
            if labels[order[i]] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push((fp as f64 / total_neg, tp as f64 / total_pos));
    }
    if points.last() != Some(&(1.0, 1.0)) {
        points.push((1.0, 1.0));
    }
    points
}

/// Trapezoidal area under an ROC polyline; the second route to AUC.
pub fn trapezoid_auc(points: &[(f64, f64)]) -> f64 {
    points
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0)
        .sum()
}

/// Per-fold evaluation detail.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FoldReport {
    pub fold: usize,
    pub confusion: Confusion,
    pub sensitivity: f64,
    pub specificity: f64,
    pub auc: f64,
    /// true when a metric denominator was empty and reported as 0
    pub zero_denominator: bool,
    pub roc: Vec<(f64, f64)>,
    /// per-epoch training loss, recorded for network models
    #[serde(skip_serializing_if = "Option::is_none")]
    pub loss_trace: Option<Vec<f64>>,
}

/// Cross-validated metrics for one (feature set, model) cell.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub schema_version: u32,
    pub model: ModelKind,
    pub feature_set: FeatureSet,
    pub k: usize,
    pub seed: u64,
    pub class_weights_enabled: bool,
    pub group_by_subject: bool,
    pub config_digest: String,
    pub generated_at_unix_s: u64,
    pub folds: Vec<FoldReport>,
    pub mean_sensitivity: f64,
    pub mean_specificity: f64,
    pub mean_auc: f64,
    /// ROC over all test-fold scores pooled together
    pub pooled_roc: Vec<(f64, f64)>,
}

impl EvaluationReport {
    pub const SCHEMA_VERSION: u32 = 1;
}

fn mean_embeddings(tokens: &[Vec<usize>], embedding: &EmbeddingMatrix) -> Vec<Vec<f64>> {
    tokens
        .iter()
        .map(|ids| embedding.mean_embedding(ids))
        .collect()
}

struct FoldOutcome {
    report: FoldReport,
    scores: Vec<f64>,
    labels: Vec<u8>,
    model: TrainedModel,
}

fn select<T: Clone>(rows: &[T], idx: &[usize]) -> Vec<T> {
    idx.iter().map(|&i| rows[i].clone()).collect()
}

fn run_fold(
    dataset: &PreparedDataset,
    feature_set: FeatureSet,
    model_kind: ModelKind,
    config: &CvConfig,
    assignment: &FoldAssignment,
    fold: usize,
) -> Result<FoldOutcome> {
    let (train_idx, test_idx) = assignment.train_test(fold);
    let train_labels = select(&dataset.labels, &train_idx);
    let test_labels = select(&dataset.labels, &test_idx);

    let n_pos = train_labels.iter().filter(|&&y| y == 1).count();
    let n_neg = train_labels.len() - n_pos;
    let weights = if config.use_class_weights {
        balanced_class_weights(n_pos, n_neg)?
    } else {
        ClassWeights::unit()
    };

    // dense representation: acoustic vectors or mean-pooled embeddings
    let dense: Option<Vec<Vec<f64>>> = match feature_set {
        FeatureSet::Acoustic => dataset.acoustic.clone(),
        FeatureSet::Linguistic => match model_kind {
            ModelKind::Ann | ModelKind::Cnn => None,
            _ => {
                let emb = dataset
                    .embedding
                    .as_ref()
                    .ok_or_else(|| Error::Manifest("missing embeddings".into()))?;
                let tokens = dataset
                    .tokens
                    .as_ref()
                    .ok_or_else(|| Error::Manifest("missing token sequences".into()))?;
                Some(mean_embeddings(tokens, emb))
            }
        },
    };

    let fold_seed = derive_seed(config.seed, "fold", fold as u64);
    let linguistic_neural = feature_set == FeatureSet::Linguistic
        && matches!(model_kind, ModelKind::Ann | ModelKind::Cnn);

    let (model, test_scores, loss_trace): (TrainedModel, Vec<f64>, Option<Vec<f64>>) =
        if linguistic_neural {
            let tokens = dataset
                .tokens
                .as_ref()
                .ok_or_else(|| Error::Manifest("missing token sequences".into()))?;
            let embedding = dataset
                .embedding
                .as_ref()
                .ok_or_else(|| Error::Manifest("missing embeddings".into()))?;
            let max_len = tokens.first().map(Vec::len).unwrap_or(0);
            let variant = match model_kind {
                ModelKind::Ann => NetworkVariant::LinguisticAnn,
                _ => NetworkVariant::LinguisticCnn,
            };
            let mut net = build_network_sized(
                variant,
                &InputMeta::Tokens { max_len, embedding },
                derive_seed(fold_seed, "net-init", 0),
                config.conv_filters,
                config.conv_width,
            )?;
            let inputs: Vec<TrainInput> = train_idx
                .iter()
                .map(|&i| TrainInput::Tokens(tokens[i].clone()))
                .collect();
            let mut train_cfg = config.neural.clone();
            train_cfg.seed = derive_seed(fold_seed, "net-train", 0);
            let trace = train_network(&mut net, &inputs, &train_labels, &weights, &train_cfg)?;
            let scores = test_idx
                .iter()
                .map(|&i| net.score(&ModelInput::Tokens(&tokens[i])))
                .collect::<Result<Vec<f64>>>()?;
            (TrainedModel::Network(net), scores, Some(trace))
        } else {
            let dense = dense.ok_or_else(|| Error::Manifest("missing acoustic features".into()))?;
            let train_x_raw = select(&dense, &train_idx);
            let test_x_raw = select(&dense, &test_idx);

            match model_kind {
                ModelKind::Rf => {
                    let mut params = config.forest.clone();
                    params.seed = derive_seed(fold_seed, "forest", 0);
                    let model =
                        train_random_forest(&train_x_raw, &train_labels, &weights, &params)?;
                    let scores = test_x_raw.iter().map(|x| model.predict_proba(x)).collect();
                    (TrainedModel::RandomForest(model), scores, None)
                }
                ModelKind::Lr => {
                    let scaler = Standardizer::fit(&train_x_raw);
                    let train_x = scaler.transform_all(&train_x_raw);
                    let test_x = scaler.transform_all(&test_x_raw);
                    let model =
                        train_logistic(&train_x, &train_labels, &weights, &config.logistic)?;
                    let scores = test_x.iter().map(|x| model.predict_proba(x)).collect();
                    (TrainedModel::Logistic(model), scores, None)
                }
                ModelKind::Svm => {
                    let scaler = Standardizer::fit(&train_x_raw);
                    let train_x = scaler.transform_all(&train_x_raw);
                    let test_x = scaler.transform_all(&test_x_raw);
                    let mut params = config.svm.clone();
                    params.seed = derive_seed(fold_seed, "svm", 0);
                    let model = train_svm(&train_x, &train_labels, &weights, &params)?;
                    let scores = test_x.iter().map(|x| model.score(x)).collect();
                    (TrainedModel::Svm(model), scores, None)
                }
                ModelKind::Ann | ModelKind::Cnn => {
                    let scaler = Standardizer::fit(&train_x_raw);
                    let train_x = scaler.transform_all(&train_x_raw);
                    let test_x = scaler.transform_all(&test_x_raw);
                    let dim = train_x[0].len();
                    let variant = match model_kind {
                        ModelKind::Ann => NetworkVariant::AcousticAnn,
                        _ => NetworkVariant::AcousticCnn,
                    };
                    let mut net = build_network_sized(
                        variant,
                        &InputMeta::Dense { dim },
                        derive_seed(fold_seed, "net-init", 0),
                        config.conv_filters,
                        config.conv_width,
                    )?;
                    let inputs: Vec<TrainInput> = train_x
                        .iter()
                        .map(|x| TrainInput::Dense(x.clone()))
                        .collect();
                    let mut train_cfg = config.neural.clone();
                    train_cfg.seed = derive_seed(fold_seed, "net-train", 0);
                    let trace =
                        train_network(&mut net, &inputs, &train_labels, &weights, &train_cfg)?;
                    let scores = test_x
                        .iter()
                        .map(|x| net.score(&ModelInput::Dense(x)))
                        .collect::<Result<Vec<f64>>>()?;
                    (TrainedModel::Network(net), scores, Some(trace))
                }
            }
        };

    let threshold = model.threshold();
    let confusion = confusion_at_threshold(&test_scores, &test_labels, threshold)?;
    let (sensitivity, s_flag) = confusion.sensitivity();
    let (specificity, p_flag) = confusion.specificity();
    let fold_auc = auc(&test_scores, &test_labels)?;
    let roc = roc_points(&test_scores, &test_labels);

    Ok(FoldOutcome {
        report: FoldReport {
            fold,
            confusion,
            sensitivity,
            specificity,
            auc: fold_auc,
            zero_denominator: s_flag || p_flag,
            roc,
            loss_trace,
        },
        scores: test_scores,
        labels: test_labels,
        model,
    })
}

/// Report plus the trained per-fold models.
pub struct CvOutcome {
    pub report: EvaluationReport,
    pub fold_models: Vec<TrainedModel>,
}

/// Runs the full stratified CV for one (feature set, model) cell. Folds are
/// independent and evaluated in parallel; per-fold seeds derive from the run
/// seed and fold index, so results do not depend on scheduling.
pub fn run_cv(
    dataset: &PreparedDataset,
    feature_set: FeatureSet,
    model_kind: ModelKind,
    config: &CvConfig,
) -> Result<CvOutcome> {
    let assignment = if config.group_by_subject {
        grouped_kfold(&dataset.labels, &dataset.subject_ids, config.k, config.seed)?
    } else {
        stratified_kfold(&dataset.labels, config.k, config.seed)?
    };

    let outcomes: Vec<FoldOutcome> = (0..config.k)
        .into_par_iter()
        .map(|fold| run_fold(dataset, feature_set, model_kind, config, &assignment, fold))
        .collect::<Result<Vec<_>>>()?;

    let k = config.k as f64;
    let mean_sensitivity = outcomes.iter().map(|o| o.report.sensitivity).sum::<f64>() / k;
    let mean_specificity = outcomes.iter().map(|o| o.report.specificity).sum::<f64>() / k;
    let mean_auc = outcomes.iter().map(|o| o.report.auc).sum::<f64>() / k;

    let mut pooled_scores = Vec::new();
    let mut pooled_labels = Vec::new();
    for o in &outcomes {
        pooled_scores.extend_from_slice(&o.scores);
        pooled_labels.extend_from_slice(&o.labels);
    }
    let pooled_roc = roc_points(&pooled_scores, &pooled_labels);

    let digest_payload = serde_json::to_vec(&(
        &config.k,
        &config.seed,
        &config.use_class_weights,
        &config.group_by_subject,
        feature_set,
        model_kind,
    ))?;

    let mut folds = Vec::with_capacity(outcomes.len());
    let mut fold_models = Vec::with_capacity(outcomes.len());
    for o in outcomes {
        folds.push(o.report);
        fold_models.push(o.model);
    }

    Ok(CvOutcome {
        report: EvaluationReport {
            schema_version: EvaluationReport::SCHEMA_VERSION,
            model: model_kind,
            feature_set,
            k: config.k,
            seed: config.seed,
            class_weights_enabled: config.use_class_weights,
            group_by_subject: config.group_by_subject,
            config_digest: fnv1a64_hex(&digest_payload),
            generated_at_unix_s: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            folds,
            mean_sensitivity,
            mean_specificity,
            mean_auc,
            pooled_roc,
        },
        fold_models,
    })
}
