use std::collections::HashMap;
use std::path::Path;

use anyhow::Context;
use speechrisk::dataset::{read_feature_csv, DatasetManifest};
use speechrisk::eval::plot::roc_svg;
use speechrisk::eval::{
    run_cv, CvConfig, CvOutcome, EvaluationReport, FeatureSet, ModelKind, PreparedDataset,
};
use speechrisk::models::ModelDocument;
use speechrisk::text::embedding::{train_embeddings, EmbeddingConfig};
use speechrisk::text::{fit_vocabulary, longest_message_len, texts_to_sequences};
use speechrisk::util::derive_seed;

use crate::config::ToolConfig;
use crate::EvaluateArgs;

/// Named ROC curves per feature set, keyed for the grid plots.
type CurvesByFeatureSet = HashMap<&'static str, Vec<(String, Vec<(f64, f64)>)>>;

fn parse_feature_set(s: &str) -> FeatureSet {
    match s {
        "acoustic" => FeatureSet::Acoustic,
        _ => FeatureSet::Linguistic,
    }
}

fn parse_model(s: &str) -> ModelKind {
    match s {
        "lr" => ModelKind::Lr,
        "svm" => ModelKind::Svm,
        "rf" => ModelKind::Rf,
        "ann" => ModelKind::Ann,
        _ => ModelKind::Cnn,
    }
}

/// Table rows in the results-table order: per feature set, classical then
/// deep models.
const TABLE_MODELS: [ModelKind; 5] = [
    ModelKind::Rf,
    ModelKind::Svm,
    ModelKind::Lr,
    ModelKind::Ann,
    ModelKind::Cnn,
];

pub fn run(args: EvaluateArgs) -> anyhow::Result<()> {
    anyhow::ensure!(
        args.all || (args.features.is_some() && args.model.is_some()),
        "pass --all, or both --features and --model"
    );
    let config = ToolConfig::load(args.config.as_deref())?;
    let manifest = DatasetManifest::load(&args.manifest)
        .with_context(|| format!("loading manifest {}", args.manifest.display()))?;
    std::fs::create_dir_all(&args.out_dir)?;

    let cells: Vec<(FeatureSet, ModelKind)> = if args.all {
        FeatureSet::ALL
            .iter()
            .flat_map(|fs| TABLE_MODELS.iter().map(move |m| (*fs, *m)))
            .collect()
    } else {
        vec![(
            parse_feature_set(args.features.as_deref().unwrap()),
            parse_model(args.model.as_deref().unwrap()),
        )]
    };

    let needs_acoustic = cells.iter().any(|(fs, _)| *fs == FeatureSet::Acoustic);
    let needs_linguistic = cells.iter().any(|(fs, _)| *fs == FeatureSet::Linguistic);

    let acoustic = if needs_acoustic {
        let path = args.features_csv.as_ref().ok_or_else(|| {
            anyhow::anyhow!("acoustic cells need --features-csv (run `extract` first)")
        })?;
        let table = read_feature_csv(path)?;
        // align feature rows to manifest order by source id
        let by_id: HashMap<&str, usize> = table
            .source_ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.as_str(), i))
            .collect();
        let mut rows = Vec::with_capacity(manifest.rows.len());
        for row in &manifest.rows {
            let &i = by_id
                .get(row.source_id.as_str())
                .ok_or_else(|| anyhow::anyhow!("feature csv has no row for {}", row.source_id))?;
            anyhow::ensure!(
                table.labels[i] == row.label,
                "label mismatch for {} between manifest and feature csv",
                row.source_id
            );
            rows.push(table.rows[i].clone());
        }
        Some(rows)
    } else {
        None
    };

    let (tokens, embedding) = if needs_linguistic {
        let transcripts = manifest.transcripts()?;
        let vocab = fit_vocabulary(&transcripts)?;
        let max_len = args
            .max_len
            .or(config.max_len)
            .unwrap_or_else(|| longest_message_len(&transcripts));
        let sequences = texts_to_sequences(&vocab, &transcripts, Some(max_len));
        let embedding_config = EmbeddingConfig {
            dim: config.embedding.dim,
            window: config.embedding.window,
            negatives: config.embedding.negatives,
            epochs: config.embedding.epochs,
            initial_lr: config.embedding.initial_lr,
            min_lr: config.embedding.min_lr,
            seed: derive_seed(args.seed, "embeddings", 0),
        };
        let trained = train_embeddings(&transcripts, &vocab, &embedding_config)?;
        (
            Some(sequences.into_iter().map(|s| s.ids).collect::<Vec<_>>()),
            Some(trained.matrix),
        )
    } else {
        (None, None)
    };

    let dataset = PreparedDataset {
        labels: manifest.labels(),
        source_ids: manifest.rows.iter().map(|r| r.source_id.clone()).collect(),
        subject_ids: manifest.rows.iter().map(|r| r.subject_id.clone()).collect(),
        acoustic,
        tokens,
        embedding,
    };

    let mut cv_config = CvConfig {
        k: args.k.unwrap_or(config.k_folds.0),
        seed: args.seed,
        use_class_weights: !args.no_class_weights,
        group_by_subject: args.group_by_subject,
        logistic: config.logistic.clone(),
        svm: config.svm.clone(),
        forest: config.forest.clone(),
        neural: config.neural_train_config(args.seed),
        conv_filters: args.conv_filters.unwrap_or(config.neural.conv_filters),
        conv_width: config.neural.conv_width,
    };
    if let Some(epochs) = args.epochs {
        cv_config.neural.epochs = epochs;
    }

    let mut table_rows: Vec<(FeatureSet, ModelKind, EvaluationReport)> = Vec::new();
    let mut pooled_curves: CurvesByFeatureSet = HashMap::new();
    for &(feature_set, model_kind) in &cells {
        let outcome = run_cv(&dataset, feature_set, model_kind, &cv_config)?;
        write_cell_artifacts(&args, &outcome, &args.out_dir)?;
        pooled_curves.entry(feature_set.name()).or_default().push((
            model_kind.name().to_string(),
            outcome.report.pooled_roc.clone(),
        ));
        eprintln!(
            "{} {}: sensitivity {:.3} specificity {:.3} auc {:.3}",
            feature_set.name(),
            model_kind.name(),
            outcome.report.mean_sensitivity,
            outcome.report.mean_specificity,
            outcome.report.mean_auc
        );
        table_rows.push((feature_set, model_kind, outcome.report));
    }

    if args.all {
        let table_path = args.out_dir.join("results_table.csv");
        let mut writer = csv::Writer::from_path(&table_path)?;
        writer.write_record(["feature_set", "model", "sensitivity", "specificity", "auc"])?;
        for (fs, model, report) in &table_rows {
            writer.write_record([
                fs.name(),
                model.name(),
                &format!("{:.4}", report.mean_sensitivity),
                &format!("{:.4}", report.mean_specificity),
                &format!("{:.4}", report.mean_auc),
            ])?;
        }
        writer.flush()?;

        // both readings of "how did a feature set do": its best model and
        // the across-model mean
        let mut summary = serde_json::Map::new();
        for fs in FeatureSet::ALL {
            let cells: Vec<&(FeatureSet, ModelKind, EvaluationReport)> =
                table_rows.iter().filter(|(f, _, _)| *f == fs).collect();
            let best = cells
                .iter()
                .max_by(|a, b| a.2.mean_auc.partial_cmp(&b.2.mean_auc).unwrap())
                .unwrap();
            let n = cells.len() as f64;
            summary.insert(
                fs.name().to_string(),
                serde_json::json!({
                    "best_model": best.1.name(),
                    "best": {
                        "sensitivity": best.2.mean_sensitivity,
                        "specificity": best.2.mean_specificity,
                        "auc": best.2.mean_auc,
                    },
                    "across_model_mean": {
                        "sensitivity":
                            cells.iter().map(|c| c.2.mean_sensitivity).sum::<f64>() / n,
                        "specificity":
                            cells.iter().map(|c| c.2.mean_specificity).sum::<f64>() / n,
                        "auc": cells.iter().map(|c| c.2.mean_auc).sum::<f64>() / n,
                    },
                }),
            );
        }
        std::fs::write(
            args.out_dir.join("summary.json"),
            serde_json::to_string_pretty(&serde_json::Value::Object(summary))?,
        )?;

        for (fs_name, curves) in &pooled_curves {
            let svg = roc_svg(&format!("ROC, {fs_name} features"), curves);
            std::fs::write(args.out_dir.join(format!("roc_{fs_name}.svg")), svg)?;
        }
        println!("{}", table_path.display());
    } else {
        let (fs, model, _) = &table_rows[0];
        println!(
            "{}",
            args.out_dir
                .join(format!("report_{}_{}.json", fs.name(), model.name()))
                .display()
        );
    }
    Ok(())
}

fn write_cell_artifacts(
    args: &EvaluateArgs,
    outcome: &CvOutcome,
    dir: &Path,
) -> anyhow::Result<()> {
    let report = &outcome.report;
    let stem = format!("{}_{}", report.feature_set.name(), report.model.name());

    std::fs::write(
        dir.join(format!("report_{stem}.json")),
        serde_json::to_string_pretty(report)?,
    )?;

    let mut roc_csv = csv::Writer::from_path(dir.join(format!("roc_{stem}.csv")))?;
    roc_csv.write_record(["fpr", "tpr"])?;
    for (fpr, tpr) in &report.pooled_roc {
        roc_csv.write_record([fpr.to_string(), tpr.to_string()])?;
    }
    roc_csv.flush()?;

    let svg = roc_svg(
        &format!(
            "ROC, {} / {}",
            report.feature_set.name(),
            report.model.name()
        ),
        &[(report.model.name().to_string(), report.pooled_roc.clone())],
    );
    std::fs::write(dir.join(format!("roc_{stem}.svg")), svg)?;

    if args.loss_trace {
        let mut writer = csv::Writer::from_path(dir.join(format!("loss_{stem}.csv")))?;
        writer.write_record(["fold", "epoch", "loss"])?;
        for fold in &report.folds {
            if let Some(trace) = &fold.loss_trace {
                for (epoch, loss) in trace.iter().enumerate() {
                    writer.write_record([
                        fold.fold.to_string(),
                        epoch.to_string(),
                        loss.to_string(),
                    ])?;
                }
            }
        }
        writer.flush()?;
    }

    if args.save_models {
        for (fold, model) in outcome.fold_models.iter().enumerate() {
            let doc = ModelDocument::new(model.clone());
            std::fs::write(
                dir.join(format!("model_{stem}_fold{fold}.json")),
                serde_json::to_string(&doc)?,
            )?;
        }
    }
    Ok(())
}
