//! Classifiers with a uniform score-then-threshold interface.
//!
//! Probability-like scorers (logistic regression, random forest, networks)
//! decide at 0.5; the SVM decides at 0 on its raw margin score. Class
//! imbalance is handled per algorithm: loss scaling for logistic regression,
//! per-class cost for the SVM, and weighted bootstrap sampling for the
//! forest.

pub mod forest;
pub mod logistic;
pub mod svm;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Per-class loss multipliers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassWeights {
    pub w_pos: f64,
    pub w_neg: f64,
}

impl ClassWeights {
    /// Uniform weights (the unweighted ablation).
    pub fn unit() -> Self {
        Self {
            w_pos: 1.0,
            w_neg: 1.0,
        }
    }

    pub fn for_label(&self, label: u8) -> f64 {
        if label == 1 {
            self.w_pos
        } else {
            self.w_neg
        }
    }
}

/// `w_c = (n_pos + n_neg) / (2 * n_c)`: inversely proportional to class size,
/// normalized so balanced data gets weight 1 everywhere.
pub fn balanced_class_weights(n_pos: usize, n_neg: usize) -> Result<ClassWeights> {
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::EmptyClass { n_pos, n_neg });
    }
    let total = (n_pos + n_neg) as f64;
    Ok(ClassWeights {
        w_pos: total / (2.0 * n_pos as f64),
        w_neg: total / (2.0 * n_neg as f64),
    })
}

/// Z-score scaler fitted on training-fold statistics only.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl Standardizer {
    pub fn fit(xs: &[Vec<f64>]) -> Self {
        assert!(!xs.is_empty());
        let dim = xs[0].len();
        let n = xs.len() as f64;
        let mut means = vec![0.0; dim];
        for x in xs {
            for (m, v) in means.iter_mut().zip(x) {
                *m += v / n;
            }
        }
        let mut stds = vec![0.0; dim];
        for x in xs {
            for (s, (v, m)) in stds.iter_mut().zip(x.iter().zip(&means)) {
                *s += (v - m) * (v - m) / n;
            }
        }
        for s in stds.iter_mut() {
            *s = s.sqrt();
            if *s < 1e-12 {
                *s = 1.0; // constant column passes through centered
            }
        }
        Self { means, stds }
    }

    pub fn transform(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.means.iter().zip(&self.stds))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }

    pub fn transform_all(&self, xs: &[Vec<f64>]) -> Vec<Vec<f64>> {
        xs.iter().map(|x| self.transform(x)).collect()
    }
}

/// Rejects non-finite entries before training.
pub fn validate_features(xs: &[Vec<f64>]) -> Result<()> {
    for (row, x) in xs.iter().enumerate() {
        for (col, v) in x.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteFeature { row, col });
            }
        }
    }
    Ok(())
}

/// Input to a trained model's scorer.
pub enum ModelInput<'a> {
    Dense(&'a [f64]),
    Tokens(&'a [usize]),
}

/// Any trained classifier, tagged for serialization.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrainedModel {
    Logistic(logistic::LogisticModel),
    Svm(svm::SvmModel),
    RandomForest(forest::ForestModel),
    Network(crate::neural::Network),
}

impl TrainedModel {
    /// Decision threshold applied to [`TrainedModel::score`].
    pub fn threshold(&self) -> f64 {
        match self {
            TrainedModel::Svm(_) => 0.0,
            _ => 0.5,
        }
    }

    pub fn score(&self, input: &ModelInput) -> Result<f64> {
        match (self, input) {
            (TrainedModel::Logistic(m), ModelInput::Dense(x)) => Ok(m.predict_proba(x)),
            (TrainedModel::Svm(m), ModelInput::Dense(x)) => Ok(m.score(x)),
            (TrainedModel::RandomForest(m), ModelInput::Dense(x)) => Ok(m.predict_proba(x)),
            (TrainedModel::Network(m), input) => m.score(input),
            _ => Err(Error::IncompatibleInputMeta(
                "token input fed to a dense-feature model".into(),
            )),
        }
    }

    pub fn predict(&self, input: &ModelInput) -> Result<u8> {
        Ok(if self.score(input)? >= self.threshold() {
            1
        } else {
            0
        })
    }
}

/// Versioned on-disk form of a trained model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelDocument {
    pub schema_version: u32,
    #[serde(flatten)]
    pub model: TrainedModel,
}

impl ModelDocument {
    pub const SCHEMA_VERSION: u32 = 1;

    pub fn new(model: TrainedModel) -> Self {
        Self {
            schema_version: Self::SCHEMA_VERSION,
            model,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balanced_weights_equal_for_balanced_data() {
        let w = balanced_class_weights(50, 50).unwrap();
        assert_eq!(w.w_pos, 1.0);
        assert_eq!(w.w_neg, 1.0);
    }

    #[test]
    fn balanced_weights_for_one_to_six_imbalance() {
        let w = balanced_class_weights(73, 442).unwrap();
        assert!((w.w_pos - 515.0 / 146.0).abs() < 1e-12);
        assert!((w.w_neg - 515.0 / 884.0).abs() < 1e-12);
        assert!((w.w_pos - 3.527397260273973).abs() < 1e-12);
        assert!((w.w_neg - 0.5825791855203619).abs() < 1e-12);

        let w = balanced_class_weights(1, 6).unwrap();
        assert!((w.w_pos - 3.5).abs() < 1e-12);
        assert!((w.w_neg - 7.0 / 12.0).abs() < 1e-12);
    }

    #[test]
    fn empty_class_is_an_error() {
        assert!(matches!(
            balanced_class_weights(0, 10),
            Err(Error::EmptyClass { .. })
        ));
    }

    #[test]
    fn standardizer_centers_and_scales() {
        let xs = vec![vec![1.0, 10.0], vec![3.0, 10.0]];
        let sc = Standardizer::fit(&xs);
        let t = sc.transform(&[2.0, 10.0]);
        assert!((t[0] - 0.0).abs() < 1e-12);
        // constant column: centered, unit divisor
        assert!((t[1] - 0.0).abs() < 1e-12);
        let t = sc.transform(&[3.0, 11.0]);
        assert!((t[0] - 1.0).abs() < 1e-12);
        assert!((t[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn validate_rejects_nan() {
        let xs = vec![vec![0.0, f64::NAN]];
        assert!(matches!(
            validate_features(&xs),
            Err(Error::NonFiniteFeature { row: 0, col: 1 })
        ));
    }

    #[test]
    fn model_documents_round_trip_through_json() {
        let xs: Vec<Vec<f64>> = (0..24)
            .map(|i| vec![(i as f64 * 0.7).sin(), (i as f64 * 0.3).cos()])
            .collect();
        let ys: Vec<u8> = (0..24).map(|i| u8::from(i % 3 == 0)).collect();
        let weights = balanced_class_weights(8, 16).unwrap();

        let models = vec![
            TrainedModel::Logistic(
                logistic::train_logistic(&xs, &ys, &weights, &Default::default()).unwrap(),
            ),
            TrainedModel::Svm(svm::train_svm(&xs, &ys, &weights, &Default::default()).unwrap()),
            TrainedModel::RandomForest(
                forest::train_random_forest(&xs, &ys, &weights, &Default::default()).unwrap(),
            ),
            TrainedModel::Network(
                crate::neural::build_network(
                    crate::neural::NetworkVariant::AcousticAnn,
                    &crate::neural::InputMeta::Dense { dim: 2 },
                    5,
                )
                .unwrap(),
            ),
        ];
        for model in models {
            let json = serde_json::to_string(&ModelDocument::new(model.clone())).unwrap();
            let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
            assert_eq!(parsed["schema_version"], 1);
            assert!(parsed["kind"].is_string());
            let doc: ModelDocument = serde_json::from_str(&json).unwrap();
            let probe = ModelInput::Dense(&xs[0]);
            assert_eq!(
                model.score(&probe).unwrap(),
                doc.model.score(&probe).unwrap(),
                "{} scores drifted through serialization",
                parsed["kind"]
            );
        }
    }
}
