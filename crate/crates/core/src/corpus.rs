//! Line-oriented corpora: one sentence per line, tokens separated by
//! whitespace. Tokens produced here are never empty and never contain
//! whitespace.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;

pub type Sentence = Vec<String>;

pub fn tokenize(line: &str) -> Sentence {
    line.split_whitespace().map(str::to_string).collect()
}

pub fn parse_corpus(text: &str) -> Vec<Sentence> {
    text.lines().map(tokenize).collect()
}

pub fn read_corpus(path: impl AsRef<Path>) -> io::Result<Vec<Sentence>> {
    Ok(parse_corpus(&fs::read_to_string(path)?))
}

pub fn format_corpus(corpus: &[Sentence]) -> String {
    let mut out = String::new();
    for sentence in corpus {
        out.push_str(&sentence.join(" "));
        out.push('\n');
    }
    out
}

pub fn write_corpus(path: impl AsRef<Path>, corpus: &[Sentence]) -> io::Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    for sentence in corpus {
        writeln!(w, "{}", sentence.join(" "))?;
    }
    w.flush()
}

/// Distinct tokens in first-seen order.
pub fn vocabulary(corpus: &[Sentence]) -> Vec<String> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for tok in corpus.iter().flatten() {
        if seen.insert(tok.as_str()) {
            out.push(tok.clone());
        }
    }
    out
}
