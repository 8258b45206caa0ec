use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::PipelineError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EncoderConfig {
    /// `soundex`, `nysiis`, `nysiis6` or `metaphone`.
    Phonetic { codec: String },
    /// Pinyin or Wubi lookup, per character or as single letters.
    Table {
        table: PathBuf,
        /// `pinyin` or `wubi`.
        table_kind: String,
        #[serde(default)]
        letters: bool,
    },
    /// Random clustering of the training vocabulary with cluster sizes
    /// copied from a phonetic baseline.
    RandomCluster { baseline: String, seed: u64 },
    /// Random clustering into `round(fraction · |V|)` equal-size clusters.
    UniformCluster { fraction: f64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CombineMode {
    CodesOnly,
    Concat,
    MultiSource,
}

fn default_separator() -> String {
    "<sep>".to_string()
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    /// Split name to input file. Models are learned on `train`.
    pub splits: BTreeMap<String, PathBuf>,
    pub encoder: EncoderConfig,
    #[serde(default)]
    pub word_bpe_operations: usize,
    #[serde(default)]
    pub code_bpe_operations: usize,
    pub combine: CombineMode,
    #[serde(default = "default_separator")]
    pub separator: String,
    /// Emit the separator between words and codes in concat mode.
    #[serde(default = "default_true")]
    pub use_separator: bool,
    /// Not part of the recorded configuration: where artifacts go.
    #[serde(skip)]
    pub output_dir: PathBuf,
}

impl PipelineConfig {
    pub fn new(train: impl Into<PathBuf>, encoder: EncoderConfig, combine: CombineMode) -> Self {
        Self {
            splits: BTreeMap::from([("train".to_string(), train.into())]),
            encoder,
            word_bpe_operations: 0,
            code_bpe_operations: 0,
            combine,
            separator: default_separator(),
            use_separator: true,
            output_dir: PathBuf::new(),
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        if !self.splits.contains_key("train") {
            return Err(PipelineError::Config("a `train` split is required".into()));
        }
        for name in self.splits.keys() {
            if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
                return Err(PipelineError::Config(format!(
                    "split name {name:?} must be alphanumeric"
                )));
            }
        }
        if self.separator.is_empty() || self.separator.chars().any(char::is_whitespace) {
            return Err(PipelineError::Config(
                "separator must be a single non-empty token".into(),
            ));
        }
        Ok(())
    }

    /// Reads a config, or the config recorded in a run manifest.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, PipelineError> {
        let text = fs::read_to_string(path)?;
        let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| PipelineError::Config(e.to_string()))?;
        let value = match value.get("config") {
            Some(inner) if value.get("files").is_some() => inner.clone(),
            _ => value,
        };
        serde_json::from_value(value).map_err(|e| PipelineError::Config(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_with_defaults() {
        let text = r#"{
            "splits": {"train": "t.txt"},
            "encoder": {"kind": "phonetic", "codec": "soundex"},
            "combine": "concat"
        }"#;
        let c: PipelineConfig = serde_json::from_str(text).unwrap();
        assert_eq!(c.separator, "<sep>");
        assert!(c.use_separator);
        assert_eq!(c.word_bpe_operations, 0);
        let back: PipelineConfig = serde_json::from_str(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn validation() {
        let mut c = PipelineConfig::new(
            "x",
            EncoderConfig::Phonetic {
                codec: "soundex".into(),
            },
            CombineMode::Concat,
        );
        assert!(c.validate().is_ok());
        c.separator = "a b".into();
        assert!(c.validate().is_err());
        c.separator = "<sep>".into();
        c.splits.clear();
        assert!(c.validate().is_err());
    }
}
