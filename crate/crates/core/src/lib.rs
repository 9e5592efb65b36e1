//! Speech screening toolkit.
//!
//! Classifies short narrative recordings into a binary risk label from two
//! independent feature sets:
//!
//! * **acoustic** — 136 per-recording descriptors aggregated from short-term
//!   frame features (zero crossing rate, energy, entropy of energy, spectral
//!   shape, MFCCs, chroma),
//! * **linguistic** — frequency-ranked token sequences and trainable word
//!   embeddings built from the transcripts.
//!
//! Five classifier families (logistic regression, SVM, random forest, a
//! feed-forward network, and a 1-D convolutional network) share a
//! score-then-threshold interface and are evaluated with stratified k-fold
//! cross-validation reporting sensitivity, specificity, and AUC. A synthetic
//! dataset generator with a tunable class-separability dial makes the whole
//! pipeline testable end to end without any real recordings.

pub mod analysis;
pub mod audio;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod features;
pub mod models;
pub mod neural;
pub mod spectrum;
pub mod synth;
pub mod text;
pub mod util;

pub use error::Error;

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
