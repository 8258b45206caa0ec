//! Corpus BLEU and vocabulary statistics.

mod bleu;
mod vocab;

pub use bleu::{bleu, bleu_multi, BleuError, BleuOptions, BleuReport};
pub use vocab::{vocab_stats, VocabReport, VocabStats};
