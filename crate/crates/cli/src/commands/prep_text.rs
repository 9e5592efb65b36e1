use anyhow::Context;
use serde::Serialize;
use speechrisk::dataset::DatasetManifest;
use speechrisk::text::embedding::{train_embeddings, EmbeddingConfig};
use speechrisk::text::{fit_vocabulary, longest_message_len, texts_to_sequences};

use crate::config::ToolConfig;
use crate::PrepTextArgs;

#[derive(Serialize)]
struct EmbeddingMeta {
    dim: usize,
    window: usize,
    negatives: usize,
    epochs: usize,
    seed: u64,
    vocab_size: usize,
    max_len: usize,
}

pub fn run(args: PrepTextArgs) -> anyhow::Result<()> {
    let config = ToolConfig::load(args.config.as_deref())?;
    let manifest = DatasetManifest::load(&args.manifest)
        .with_context(|| format!("loading manifest {}", args.manifest.display()))?;
    let transcripts = manifest.transcripts()?;

    let vocab = fit_vocabulary(&transcripts)?;
    let max_len = args
        .max_len
        .or(config.max_len)
        .unwrap_or_else(|| longest_message_len(&transcripts));
    let sequences = texts_to_sequences(&vocab, &transcripts, Some(max_len));

    let embedding_config = EmbeddingConfig {
        dim: args.dim.unwrap_or(config.embedding.dim),
        window: args.window.unwrap_or(config.embedding.window),
        negatives: args.negatives.unwrap_or(config.embedding.negatives),
        epochs: args.epochs.unwrap_or(config.embedding.epochs),
        initial_lr: config.embedding.initial_lr,
        min_lr: config.embedding.min_lr,
        seed: args.seed,
    };
    let trained = train_embeddings(&transcripts, &vocab, &embedding_config)?;

    std::fs::create_dir_all(&args.out_dir)?;

    let mut vocab_csv = csv::Writer::from_path(args.out_dir.join("vocab.csv"))?;
    vocab_csv.write_record(["term", "index", "frequency"])?;
    for rank in 1..=vocab.len() {
        vocab_csv.write_record([
            vocab.term(rank).unwrap(),
            &rank.to_string(),
            &vocab.frequency(rank).unwrap().to_string(),
        ])?;
    }
    vocab_csv.flush()?;

    let mut seq_csv = csv::Writer::from_path(args.out_dir.join("sequences.csv"))?;
    seq_csv.write_record(["source_id", "original_length", "ids"])?;
    for (row, seq) in manifest.rows.iter().zip(&sequences) {
        let ids: Vec<String> = seq.ids.iter().map(|i| i.to_string()).collect();
        seq_csv.write_record([
            row.source_id.as_str(),
            &seq.original_length.to_string(),
            &ids.join(" "),
        ])?;
    }
    seq_csv.flush()?;

    let dim = trained.matrix.dim();
    let mut emb_csv = csv::Writer::from_path(args.out_dir.join("embeddings.csv"))?;
    let mut header = vec!["index".to_string(), "term".to_string()];
    header.extend((1..=dim).map(|d| format!("d{d:03}")));
    emb_csv.write_record(&header)?;
    for index in 0..trained.matrix.num_rows() {
        let term = if index == 0 {
            ""
        } else {
            vocab.term(index).unwrap()
        };
        let mut record = vec![index.to_string(), term.to_string()];
        record.extend(trained.matrix.row(index).iter().map(|v| v.to_string()));
        emb_csv.write_record(&record)?;
    }
    emb_csv.flush()?;

    let meta = EmbeddingMeta {
        dim,
        window: embedding_config.window,
        negatives: embedding_config.negatives,
        epochs: embedding_config.epochs,
        seed: embedding_config.seed,
        vocab_size: vocab.len(),
        max_len,
    };
    std::fs::write(
        args.out_dir.join("embeddings.meta.json"),
        serde_json::to_string_pretty(&meta)?,
    )?;

    eprintln!(
        "vocabulary {} terms, sequences padded to {max_len}, embeddings {}x{dim}",
        vocab.len(),
        trained.matrix.num_rows()
    );
    println!("{}", args.out_dir.display());
    Ok(())
}
