//! Manifest-driven command line for the speechrisk toolkit.
//!
//! Pipeline: `synth` (or your own manifest) -> `extract` -> `prep-text` ->
//! `evaluate` -> `analyze stats|lexical`. Every command takes `--seed`
//! where randomness is involved and is idempotent for a fixed seed.

mod commands;
mod config;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "speechrisk", version, about = "Speech screening toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a labeled synthetic dataset (audio, transcripts, manifest)
    Synth(SynthArgs),
    /// Extract the per-recording acoustic feature table from a manifest
    Extract(ExtractArgs),
    /// Fit the vocabulary, export sequences, and train word embeddings
    PrepText(PrepTextArgs),
    /// Cross-validate one (feature set, model) cell or the full grid
    Evaluate(EvaluateArgs),
    /// Exploratory statistics over features or transcripts
    #[command(subcommand)]
    Analyze(AnalyzeCommand),
    /// Print the full numeric configuration schema as JSON
    Config(ConfigArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// number of recordings
    #[arg(long)]
    n: usize,
    /// negatives per positive
    #[arg(long, default_value_t = 6.0)]
    imbalance: f64,
    /// class separability in [0, 1]
    #[arg(long, default_value_t = 0.8)]
    sep: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 16000)]
    sample_rate: u32,
    #[arg(long, default_value_t = 1.0)]
    min_duration_s: f64,
    #[arg(long, default_value_t = 3.0)]
    max_duration_s: f64,
    /// output directory for audio/, text/, manifest.csv
    #[arg(long, env = "SPEECHRISK_OUT")]
    out: PathBuf,
}

#[derive(Args)]
struct ExtractArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// output feature CSV path
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    frame_ms: Option<f64>,
    #[arg(long)]
    step_ms: Option<f64>,
}

#[derive(Args)]
struct PrepTextArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// directory for vocab.csv, sequences.csv, embeddings.csv, embeddings.meta.json
    #[arg(long, env = "SPEECHRISK_OUT")]
    out_dir: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    negatives: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    max_len: Option<usize>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// acoustic feature CSV from `extract` (needed for acoustic cells)
    #[arg(long)]
    features_csv: Option<PathBuf>,
    /// feature set for a single cell
    #[arg(long, value_parser = ["acoustic", "linguistic"])]
    features: Option<String>,
    /// model for a single cell
    #[arg(long, value_parser = ["lr", "svm", "rf", "ann", "cnn"])]
    model: Option<String>,
    /// sweep the full 2x5 grid and emit the combined results table
    #[arg(long, default_value_t = false)]
    all: bool,
    #[arg(long, env = "SPEECHRISK_OUT")]
    out_dir: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    k: Option<usize>,
    /// train with uniform class weights (ablation)
    #[arg(long, default_value_t = false)]
    no_class_weights: bool,
    /// keep each subject's recordings inside one fold
    #[arg(long, default_value_t = false)]
    group_by_subject: bool,
    /// network training epochs override
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    conv_filters: Option<usize>,
    #[arg(long)]
    max_len: Option<usize>,
    /// also write per-fold network loss traces as CSV
    #[arg(long, default_value_t = false)]
    loss_trace: bool,
    /// also write each fold's trained model as JSON
    #[arg(long, default_value_t = false)]
    save_models: bool,
}

#[derive(Subcommand)]
enum AnalyzeCommand {
    /// Chi-square tests per acoustic feature with Bonferroni correction
    Stats(AnalyzeStatsArgs),
    /// Term-association scores between the two classes' transcripts
    Lexical(AnalyzeLexicalArgs),
}

#[derive(Args)]
struct AnalyzeStatsArgs {
    #[arg(long)]
    features_csv: PathBuf,
    /// output CSV (feature,chi2,df,p_row,p_adj,significant)
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 4)]
    bins: usize,
}

#[derive(Args)]
struct AnalyzeLexicalArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// output CSV (term,count_pos,count_neg,score_pos,score_neg,association)
    #[arg(long)]
    out: PathBuf,
    /// optional scatter plot
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct ConfigArgs {
    /// merge a config file over the defaults before printing
    #[arg(long)]
    config: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Synth(args) => commands::synth::run(args),
        Command::Extract(args) => commands::extract::run(args),
        Command::PrepText(args) => commands::prep_text::run(args),
        Command::Evaluate(args) => commands::evaluate::run(args),
        Command::Analyze(AnalyzeCommand::Stats(args)) => commands::analyze::run_stats(args),
        Command::Analyze(AnalyzeCommand::Lexical(args)) => commands::analyze::run_lexical(args),
        Command::Config(args) => commands::print_config(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
