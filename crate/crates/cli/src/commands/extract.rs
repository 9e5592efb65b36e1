use anyhow::Context;
use rayon::prelude::*;
use speechrisk::audio::decode_wav;
use speechrisk::dataset::{write_feature_csv, DatasetManifest, FeatureTable};
use speechrisk::features::{extract_feature_vector, feature_vector_names};

use crate::config::ToolConfig;
use crate::ExtractArgs;

/// Fraction of undecodable rows above which the whole extraction fails.
const MAX_FAILURE_RATE: f64 = 0.10;

pub fn run(args: ExtractArgs) -> anyhow::Result<()> {
    let config = ToolConfig::load(args.config.as_deref())?;
    let frame_ms = args.frame_ms.unwrap_or(config.framing.frame_size_ms);
    let step_ms = args.step_ms.unwrap_or(config.framing.frame_step_ms);
    anyhow::ensure!(
        frame_ms > 0.0 && step_ms > 0.0,
        "frame and step durations must be positive (got {frame_ms} / {step_ms} ms)"
    );

    let manifest = DatasetManifest::load(&args.manifest)
        .with_context(|| format!("loading manifest {}", args.manifest.display()))?;

    let results: Vec<_> = manifest
        .rows
        .par_iter()
        .map(|row| {
            let path = manifest.audio_file(row);
            let outcome = std::fs::read(&path)
                .map_err(speechrisk::Error::from)
                .and_then(|bytes| decode_wav(&bytes, &row.source_id))
                .and_then(|clip| extract_feature_vector(&clip, frame_ms, step_ms));
            (row, outcome)
        })
        .collect();

    let mut table = FeatureTable {
        feature_names: feature_vector_names(),
        source_ids: Vec::new(),
        labels: Vec::new(),
        rows: Vec::new(),
    };
    let mut failures = 0usize;
    for (row, outcome) in results {
        match outcome {
            Ok(fv) => {
                table.source_ids.push(row.source_id.clone());
                table.labels.push(row.label);
                table.rows.push(fv.values);
            }
            Err(err) => {
                failures += 1;
                eprintln!("warning: skipping {}: {err}", row.source_id);
            }
        }
    }

    let failure_rate = failures as f64 / manifest.rows.len() as f64;
    anyhow::ensure!(
        failure_rate <= MAX_FAILURE_RATE,
        "{failures} of {} rows failed to extract",
        manifest.rows.len()
    );

    write_feature_csv(&args.out, &table)
        .with_context(|| format!("writing {}", args.out.display()))?;
    eprintln!("extracted {} rows, skipped {failures}", table.len());
    println!("{}", args.out.display());
    Ok(())
}
