use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CodecError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableKind {
    Pinyin,
    Wubi,
}

impl TableKind {
    fn accepts(self, code: &str) -> bool {
        match self {
            // Syllable letters (ü may be written as v or ü, plus ê) and a tone digit 1-5.
            TableKind::Pinyin => {
                let mut chars = code.chars();
                matches!(chars.next_back(), Some('1'..='5'))
                    && chars.clone().next().is_some()
                    && chars.all(|c| c.is_ascii_lowercase() || c == 'ü' || c == 'ê')
            }
            TableKind::Wubi => (1..=4).contains(&code.len()) && code.bytes().all(|b| b.is_ascii_lowercase()),
        }
    }
}

/// How table codes are emitted for a token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Granularity {
    /// One code per character.
    #[default]
    PerCharacter,
    /// Every code split further into single-character tokens.
    Letters,
}

/// Character to code lookup for Pinyin or Wubi.
///
/// Characters may carry several codes; the first one read from the file is
/// the one used for encoding.
#[derive(Debug, Clone)]
pub struct CodeTable {
    kind: TableKind,
    entries: HashMap<char, Vec<String>>,
}

impl CodeTable {
    pub fn load(path: impl AsRef<Path>, kind: TableKind) -> Result<Self, CodecError> {
        let text = fs::read_to_string(path)?;
        Self::parse(&text, kind)
    }

    /// Parses `character<TAB>code` lines; `#` lines and blank lines are skipped.
    pub fn parse(text: &str, kind: TableKind) -> Result<Self, CodecError> {
        let mut entries: HashMap<char, Vec<String>> = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let malformed = || CodecError::MalformedTableLine {
                line: idx + 1,
                content: line.to_string(),
            };
            let (key, code) = line.split_once('\t').ok_or_else(malformed)?;
            let mut key_chars = key.chars();
            let ch = key_chars.next().ok_or_else(malformed)?;
            let code = code.trim();
            if key_chars.next().is_some() || !kind.accepts(code) {
                return Err(malformed());
            }
            entries.entry(ch).or_default().push(code.to_string());
        }
        if entries.is_empty() {
            return Err(CodecError::EmptyTable);
        }
        Ok(Self { kind, entries })
    }

    pub fn kind(&self) -> TableKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn codes(&self, ch: char) -> Option<&[String]> {
        self.entries.get(&ch).map(Vec::as_slice)
    }

    pub fn default_code(&self, ch: char) -> Option<&str> {
        self.codes(ch).and_then(|c| c.first()).map(String::as_str)
    }
}

/// Encodes every character of `token`; characters missing from the table
/// are emitted unchanged.
pub fn table_encode(token: &str, table: &CodeTable, granularity: Granularity) -> Vec<String> {
    let mut out = Vec::new();
    for ch in token.chars() {
        let mut buf = [0u8; 4];
        let code = table.default_code(ch).unwrap_or_else(|| ch.encode_utf8(&mut buf));
        match granularity {
            Granularity::PerCharacter => out.push(code.to_string()),
            Granularity::Letters => out.extend(code.chars().map(String::from)),
        }
    }
    out
}
