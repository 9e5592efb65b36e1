//! Cross-module behavior: generator separability feeding the CV harness,
//! and transcripts feeding the lexical scorer.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use speechrisk::analysis::{scaled_f_scores, significance_report};
use speechrisk::eval::{run_cv, CvConfig, FeatureSet, ModelKind, PreparedDataset};
use speechrisk::features::{extract_feature_vector, feature_vector_names};
use speechrisk::synth::{synth_audio, synth_transcript, SynthConfig};
use speechrisk::util::derive_seed;

/// In-memory analogue of the synth -> extract pipeline: labels plus acoustic
/// feature rows, without touching disk.
fn features_for(config: &SynthConfig) -> (Vec<u8>, Vec<Vec<f64>>) {
    let n = config.n_recordings;
    let n_pos = config.positive_count();
    let mut labels = vec![1u8; n_pos];
    labels.extend(vec![0u8; n - n_pos]);
    {
        use rand::seq::SliceRandom;
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, "labels", 0));
        labels.shuffle(&mut rng);
    }
    let rows: Vec<Vec<f64>> = labels
        .par_iter()
        .enumerate()
        .map(|(i, &label)| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, "audio", i as u64));
            let clip = synth_audio(label, config, &mut rng);
            extract_feature_vector(&clip, 50.0, 25.0).unwrap().values
        })
        .collect();
    (labels, rows)
}

fn acoustic_dataset(labels: Vec<u8>, rows: Vec<Vec<f64>>) -> PreparedDataset {
    let n = labels.len();
    PreparedDataset {
        labels,
        source_ids: (0..n).map(|i| format!("rec_{i:04}")).collect(),
        subject_ids: (0..n)
            .map(|i| format!("s{:03}", i % (n / 5).max(1)))
            .collect(),
        acoustic: Some(rows),
        tokens: None,
        embedding: None,
    }
}

#[test]
fn lr_auc_is_monotone_in_separability() {
    let seeds = [1u64, 2];
    let grid = [0.0, 0.25, 0.5, 0.75, 1.0];
    let mut means = Vec::new();
    for &eps in &grid {
        let mut sum = 0.0;
        for &seed in &seeds {
            let config = SynthConfig {
                n_recordings: 210,
                separability: eps,
                duration_range_s: (1.0, 2.0),
                seed,
                ..SynthConfig::default()
            };
            let (labels, rows) = features_for(&config);
            let dataset = acoustic_dataset(labels, rows);
            let cv = CvConfig {
                seed,
                ..CvConfig::default()
            };
            let report = run_cv(&dataset, FeatureSet::Acoustic, ModelKind::Lr, &cv)
                .unwrap()
                .report;
            sum += report.mean_auc;
        }
        means.push(sum / seeds.len() as f64);
    }
    for w in means.windows(2) {
        assert!(
            w[1] >= w[0] - 0.03,
            "auc decreased along separability: {means:?}"
        );
    }
    assert!(
        means[0] > 0.35 && means[0] < 0.65,
        "null separability: {means:?}"
    );
    assert!(
        *means.last().unwrap() >= 0.90,
        "full separability: {means:?}"
    );
}

#[test]
fn null_data_yields_no_bonferroni_significant_features() {
    // over seeded runs at zero separability, a family-wise significant
    // feature should appear in at most a handful of runs
    let runs = 100;
    let clean: usize = (0..runs)
        .into_par_iter()
        .map(|seed| {
            let config = SynthConfig {
                n_recordings: 70,
                separability: 0.0,
                duration_range_s: (0.6, 1.2),
                seed: 9000 + seed as u64,
                ..SynthConfig::default()
            };
            let (labels, rows) = features_for(&config);
            let columns: Vec<Vec<f64>> = (0..rows[0].len())
                .map(|c| rows.iter().map(|r| r[c]).collect())
                .collect();
            let report =
                significance_report(&feature_vector_names(), &columns, &labels, 4).unwrap();
            usize::from(report.iter().all(|r| !r.significant))
        })
        .sum();
    assert!(
        clean >= 95,
        "significant features appeared in {} of {runs} null runs",
        runs - clean
    );
}

#[test]
fn separable_audio_flags_energy_family_features() {
    let config = SynthConfig {
        n_recordings: 210,
        separability: 1.0,
        duration_range_s: (1.0, 2.0),
        seed: 31,
        ..SynthConfig::default()
    };
    let (labels, rows) = features_for(&config);
    let columns: Vec<Vec<f64>> = (0..rows[0].len())
        .map(|c| rows.iter().map(|r| r[c]).collect())
        .collect();
    let report = significance_report(&feature_vector_names(), &columns, &labels, 4).unwrap();
    let significant: Vec<&str> = report
        .iter()
        .filter(|r| r.significant)
        .map(|r| r.feature.as_str())
        .collect();
    assert!(
        significant.iter().any(|f| f.starts_with("energy")),
        "energy family missing from {significant:?}"
    );
    assert!(!significant.is_empty());
}

#[test]
fn full_separability_transcripts_rank_class_words_at_the_extremes() {
    let config = SynthConfig {
        separability: 1.0,
        ..SynthConfig::default()
    };
    let mut positive = Vec::new();
    let mut negative = Vec::new();
    for i in 0..40 {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(7, "text", i));
        positive.push(synth_transcript(1, &config, &mut rng));
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(7, "text-neg", i));
        negative.push(synth_transcript(0, &config, &mut rng));
    }
    let scores = scaled_f_scores(&positive, &negative).unwrap();
    let mut by_abs = scores.clone();
    by_abs.sort_by(|a, b| {
        b.association
            .abs()
            .partial_cmp(&a.association.abs())
            .unwrap()
    });
    for s in by_abs.iter().take(10) {
        let planted = config.vocab.positive.iter().any(|w| *w == s.term)
            || config.vocab.negative.iter().any(|w| *w == s.term);
        assert!(planted, "non-class word {} in the top associations", s.term);
    }
}
