//! Corpus preparation for an external translation system: encode the
//! source side, segment both streams with BPE, and emit either the codes
//! alone, words and codes concatenated per line, or two paired sources.
//!
//! A run writes a self-describing artifact directory:
//!
//! ```text
//! inputs/     copies of every input file
//! models/     BPE merges and cluster maps learned on the training split
//! streams/    encoded, segmented and combined streams per split
//! reports/    vocabulary statistics
//! manifest.json
//! ```

mod config;
mod encode;
mod run;

use thiserror::Error;

pub use config::{CombineMode, EncoderConfig, PipelineConfig};
pub use encode::{combine, encode_corpus, Combined, EncodedCorpus};
pub use run::{hash_directory, run_pipeline, PipelineRun};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("separator {0:?} occurs in a stream vocabulary")]
    SeparatorCollision(String),
    #[error("stream lengths differ: {words} word lines, {codes} code lines")]
    MisalignedStreams { words: usize, codes: usize },
    #[error("config: {0}")]
    Config(String),
    #[error("stage {stage}{}: {message}", line.map(|l| format!(", line {l}")).unwrap_or_default())]
    Stage {
        stage: &'static str,
        line: Option<usize>,
        message: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl PipelineError {
    pub(crate) fn stage(stage: &'static str, err: impl std::fmt::Display) -> Self {
        Self::Stage {
            stage,
            line: None,
            message: err.to_string(),
        }
    }
}
