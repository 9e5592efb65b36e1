//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    // -- audio decoding / framing --
    #[error("malformed container: {0}")]
    MalformedContainer(String),
    #[error("unsupported encoding: {0}")]
    UnsupportedEncoding(String),
    #[error("clip too short: {samples} samples, need at least {frame_len} for one frame")]
    ClipTooShort { samples: usize, frame_len: usize },

    // -- feature extraction --
    #[error("too few frames: {got}, need at least {need}")]
    TooFewFrames { got: usize, need: usize },
    #[error("non-finite feature value at row {row}, column {col}")]
    NonFiniteFeature { row: usize, col: usize },

    // -- text --
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("corpus empty after stopword removal")]
    EmptyAfterStopwords,

    // -- models --
    #[error("class with zero examples (n_pos={n_pos}, n_neg={n_neg})")]
    EmptyClass { n_pos: usize, n_neg: usize },
    #[error("incompatible input for network variant: {0}")]
    IncompatibleInputMeta(String),
    #[error("training loss became non-finite at epoch {epoch}")]
    DivergedLoss { epoch: usize },

    // -- evaluation --
    #[error("class {class} has {count} examples, fewer than k={k} folds")]
    ClassTooSmall { class: u8, count: usize, k: usize },
    #[error("length mismatch: {left} scores vs {right} labels")]
    LengthMismatch { left: usize, right: usize },
    #[error("fold contains a single class; AUC undefined")]
    SingleClassFold,

    // -- analysis --
    #[error("p-value out of [0,1]: {0}")]
    OutOfRangeP(f64),

    // -- manifests and files --
    #[error("manifest error: {0}")]
    Manifest(String),
    #[error("io failure: {0}")]
    IoFailure(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
