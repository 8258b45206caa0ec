//! Robustness data: embedding-similarity word noise for training corpora
//! and random word-level edits for test sentences.

mod edit;
mod noise;

use thiserror::Error;

pub use edit::{edit_distance, perturb_corpus, perturb_edit, EditKind, PerturbationSpec, Perturbed};
pub use noise::{noise_augment, NoiseOutput, NoiseSpec, NoiseStats, Rounding};

#[derive(Debug, Error)]
pub enum AugmentError {
    #[error("embedding table is empty")]
    EmptyEmbedding,
    #[error("insertion vocabulary is empty")]
    EmptyVocabulary,
    #[error("operation weights must be non-negative and sum to 1, got {0:?}")]
    InvalidWeights([f64; 3]),
    #[error("noise fraction {0} must be in (0, 1]")]
    InvalidFraction(f64),
    #[error("candidate pool size must be at least 1")]
    InvalidTopN,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
