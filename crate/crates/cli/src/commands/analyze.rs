use anyhow::Context;
use serde::Serialize;
use speechrisk::analysis::stopwords::stopword_list_hash;
use speechrisk::analysis::{scaled_f_scores, significance_report};
use speechrisk::dataset::{read_feature_csv, DatasetManifest};
use speechrisk::eval::plot::{term_scatter_svg, ScatterPoint};

use crate::{AnalyzeLexicalArgs, AnalyzeStatsArgs};

pub fn run_stats(args: AnalyzeStatsArgs) -> anyhow::Result<()> {
    anyhow::ensure!(args.bins >= 2, "--bins must be at least 2");
    let table = read_feature_csv(&args.features_csv)
        .with_context(|| format!("loading {}", args.features_csv.display()))?;
    let rows = significance_report(
        &table.feature_names,
        &table.columns(),
        &table.labels,
        args.bins,
    )?;

    let mut writer = csv::Writer::from_path(&args.out)?;
    writer.write_record(["feature", "chi2", "df", "p_row", "p_adj", "significant"])?;
    for r in &rows {
        writer.write_record([
            r.feature.as_str(),
            &r.chi2.to_string(),
            &r.df.to_string(),
            &r.p_row.to_string(),
            &r.p_adj.to_string(),
            &r.significant.to_string(),
        ])?;
    }
    writer.flush()?;

    let significant = rows.iter().filter(|r| r.significant).count();
    let low_expected = rows.iter().filter(|r| r.low_expected).count();
    eprintln!(
        "{significant} of {} features significant at adjusted p < 0.05 \
         ({low_expected} with expected cell counts below 5)",
        rows.len()
    );
    println!("{}", args.out.display());
    Ok(())
}

#[derive(Serialize)]
struct LexicalMeta {
    stopword_list_fnv64: String,
    terms: usize,
    positive_documents: usize,
    negative_documents: usize,
}

pub fn run_lexical(args: AnalyzeLexicalArgs) -> anyhow::Result<()> {
    let manifest = DatasetManifest::load(&args.manifest)
        .with_context(|| format!("loading manifest {}", args.manifest.display()))?;
    let transcripts = manifest.transcripts()?;
    let mut positive = Vec::new();
    let mut negative = Vec::new();
    for (row, text) in manifest.rows.iter().zip(transcripts) {
        if row.label == 1 {
            positive.push(text);
        } else {
            negative.push(text);
        }
    }
    let scores = scaled_f_scores(&positive, &negative)?;

    let mut writer = csv::Writer::from_path(&args.out)?;
    writer.write_record([
        "term",
        "count_pos",
        "count_neg",
        "score_pos",
        "score_neg",
        "association",
    ])?;
    for s in &scores {
        writer.write_record([
            s.term.as_str(),
            &s.count_a.to_string(),
            &s.count_b.to_string(),
            &s.score_a.to_string(),
            &s.score_b.to_string(),
            &s.association.to_string(),
        ])?;
    }
    writer.flush()?;

    let meta = LexicalMeta {
        stopword_list_fnv64: stopword_list_hash(),
        terms: scores.len(),
        positive_documents: positive.len(),
        negative_documents: negative.len(),
    };
    std::fs::write(
        args.out.with_extension("meta.json"),
        serde_json::to_string_pretty(&meta)?,
    )?;

    if let Some(svg_path) = &args.svg {
        let points: Vec<ScatterPoint> = scores
            .iter()
            .map(|s| ScatterPoint {
                label: s.term.clone(),
                x: s.freq_pct_a,
                y: s.freq_pct_b,
                association: s.association,
            })
            .collect();
        std::fs::write(svg_path, term_scatter_svg("term associations", &points, 10))?;
    }

    eprintln!("{} terms scored", scores.len());
    println!("{}", args.out.display());
    Ok(())
}
