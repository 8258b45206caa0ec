//! Phonetic (Soundex, NYSIIS, Metaphone) and table-driven (Pinyin, Wubi)
//! token encoders.
//!
//! Every encoder is many-to-one: distinct tokens can share a code, but a
//! token always maps to the same code. Phonetic encoders fold diacritics
//! first and reject tokens without letters with
//! [`CodecError::NonAlphabeticToken`]; callers that need alignment
//! substitute the surface form (see [`encode_or_pass`]).

mod fold;
mod metaphone;
mod nysiis;
mod soundex;
mod table;

use std::io;
use std::sync::Arc;

use thiserror::Error;

pub use fold::fold_ascii_letters;
pub use metaphone::{metaphone, metaphone_with_limit};
pub use nysiis::{nysiis, nysiis_with_limit};
pub use soundex::soundex;
pub use table::{table_encode, CodeTable, Granularity, TableKind};

#[derive(Debug, Error)]
pub enum CodecError {
    #[error("token {0:?} has no alphabetic content")]
    NonAlphabeticToken(String),
    #[error("malformed code table line {line}: {content:?}")]
    MalformedTableLine { line: usize, content: String },
    #[error("code table has no entries")]
    EmptyTable,
    #[error("unknown codec {0:?}")]
    UnknownCodec(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// A token encoder. Word-level codecs return exactly one code per token;
/// table codecs return one code (or letter) per character.
pub trait Codec: Send + Sync {
    fn name(&self) -> &str;

    fn encode(&self, token: &str) -> Result<Vec<String>, CodecError>;

    /// A single grouping key for `token`: its codes joined by spaces.
    fn key(&self, token: &str) -> Result<String, CodecError> {
        Ok(self.encode(token)?.join(" "))
    }

    /// Whether every token yields exactly one code.
    fn is_word_level(&self) -> bool {
        true
    }
}

/// The three spelling-based encoders.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phonetic {
    Soundex,
    Nysiis { max_len: Option<usize> },
    Metaphone { max_len: Option<usize> },
}

impl Phonetic {
    pub fn encode_one(&self, token: &str) -> Result<String, CodecError> {
        match *self {
            Phonetic::Soundex => soundex(token),
            Phonetic::Nysiis { max_len } => nysiis_with_limit(token, max_len),
            Phonetic::Metaphone { max_len } => metaphone_with_limit(token, max_len),
        }
    }
}

impl Codec for Phonetic {
    fn name(&self) -> &str {
        match self {
            Phonetic::Soundex => "soundex",
            Phonetic::Nysiis { .. } => "nysiis",
            Phonetic::Metaphone { .. } => "metaphone",
        }
    }

    fn encode(&self, token: &str) -> Result<Vec<String>, CodecError> {
        self.encode_one(token).map(|c| vec![c])
    }
}

/// Pinyin or Wubi lookup over a shared table.
#[derive(Debug, Clone)]
pub struct TableCodec {
    table: Arc<CodeTable>,
    granularity: Granularity,
}

impl TableCodec {
    pub fn new(table: Arc<CodeTable>, granularity: Granularity) -> Self {
        Self { table, granularity }
    }

    pub fn table(&self) -> &CodeTable {
        &self.table
    }
}

impl Codec for TableCodec {
    fn name(&self) -> &str {
        match (self.table.kind(), self.granularity) {
            (TableKind::Pinyin, Granularity::PerCharacter) => "pinyin",
            (TableKind::Pinyin, Granularity::Letters) => "pinyin-letters",
            (TableKind::Wubi, Granularity::PerCharacter) => "wubi",
            (TableKind::Wubi, Granularity::Letters) => "wubi-letters",
        }
    }

    fn encode(&self, token: &str) -> Result<Vec<String>, CodecError> {
        Ok(table_encode(token, &self.table, self.granularity))
    }

    fn is_word_level(&self) -> bool {
        false
    }
}

/// Parses a phonetic codec name (`soundex`, `nysiis`, `nysiis6`, `metaphone`).
pub fn phonetic_by_name(name: &str) -> Result<Phonetic, CodecError> {
    match name {
        "soundex" => Ok(Phonetic::Soundex),
        "nysiis" => Ok(Phonetic::Nysiis { max_len: None }),
        "nysiis6" => Ok(Phonetic::Nysiis { max_len: Some(6) }),
        "metaphone" => Ok(Phonetic::Metaphone { max_len: None }),
        other => Err(CodecError::UnknownCodec(other.to_string())),
    }
}

/// Encodes `token`, falling back to the surface form when the codec rejects
/// it as non-alphabetic. Returns whether the fallback was taken.
pub fn encode_or_pass(codec: &dyn Codec, token: &str) -> Result<(Vec<String>, bool), CodecError> {
    match codec.encode(token) {
        Ok(codes) => Ok((codes, false)),
        Err(CodecError::NonAlphabeticToken(_)) => Ok((vec![token.to_string()], true)),
        Err(e) => Err(e),
    }
}
