//! Byte Pair Encoding over whitespace-tokenized streams.
//!
//! Words start as character sequences whose last symbol carries the
//! end-of-word marker (`</w>`), so word-final and word-internal subwords
//! stay distinct. Applied output marks every non-final piece with a
//! continuation suffix (`@@` by default), which makes [`bpe_decode`] an
//! exact inverse of [`bpe_apply`].

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use thiserror::Error;

pub const END_OF_WORD: &str = "</w>";
pub const DEFAULT_CONTINUATION: &str = "@@";
const MERGE_FILE_HEADER: &str = "#version: 0.2";

#[derive(Debug, Error)]
pub enum BpeError {
    #[error("corpus has no tokens")]
    EmptyCorpus,
    #[error("piece stream ends inside a word ({0:?})")]
    DanglingContinuation(String),
    #[error("continuation marker {0:?} must be at least two characters without whitespace")]
    InvalidMarker(String),
    #[error("malformed merge line {line}: {content:?}")]
    MalformedMerge { line: usize, content: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A subword symbol: its text and whether it ends a word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    pub text: String,
    pub word_final: bool,
}

impl Symbol {
    pub fn new(text: impl Into<String>, word_final: bool) -> Self {
        Self {
            text: text.into(),
            word_final,
        }
    }

    fn parse(s: &str) -> Self {
        match s.strip_suffix(END_OF_WORD) {
            Some(text) if !text.is_empty() => Self::new(text, true),
            _ => Self::new(s, false),
        }
    }

    fn concat(&self, right: &Symbol) -> Symbol {
        Symbol::new(format!("{}{}", self.text, right.text), right.word_final)
    }
}

impl std::fmt::Display for Symbol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.text)?;
        if self.word_final {
            f.write_str(END_OF_WORD)?;
        }
        Ok(())
    }
}

pub type MergePair = (Symbol, Symbol);

/// Ordered merge operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BpeModel {
    merges: Vec<MergePair>,
    num_operations: usize,
    continuation: String,
    ranks: HashMap<MergePair, usize>,
}

impl BpeModel {
    pub fn new(merges: Vec<MergePair>, num_operations: usize) -> Self {
        let ranks = merges.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        Self {
            merges,
            num_operations,
            continuation: DEFAULT_CONTINUATION.to_string(),
            ranks,
        }
    }

    pub fn with_continuation(mut self, marker: &str) -> Result<Self, BpeError> {
        if marker.chars().count() < 2 || marker.chars().any(char::is_whitespace) {
            return Err(BpeError::InvalidMarker(marker.to_string()));
        }
        self.continuation = marker.to_string();
        Ok(self)
    }

    pub fn merges(&self) -> &[MergePair] {
        &self.merges
    }

    pub fn num_operations(&self) -> usize {
        self.num_operations
    }

    pub fn end_of_word_marker(&self) -> &str {
        END_OF_WORD
    }

    pub fn continuation(&self) -> &str {
        &self.continuation
    }

    /// Merge file text: a version header, then one `left right` pair per line.
    pub fn to_merge_file(&self) -> String {
        let mut out = String::from(MERGE_FILE_HEADER);
        out.push('\n');
        for (a, b) in &self.merges {
            let _ = writeln!(out, "{a} {b}");
        }
        out
    }

    pub fn from_merge_file(text: &str) -> Result<Self, BpeError> {
        let mut merges = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            if line.starts_with("#version") || line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split(' ');
            match (parts.next(), parts.next(), parts.next()) {
                (Some(a), Some(b), None) if !a.is_empty() && !b.is_empty() => {
                    merges.push((Symbol::parse(a), Symbol::parse(b)));
                }
                _ => {
                    return Err(BpeError::MalformedMerge {
                        line: idx + 1,
                        content: line.to_string(),
                    })
                }
            }
        }
        let n = merges.len();
        Ok(Self::new(merges, n))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), BpeError> {
        fs::write(path, self.to_merge_file())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, BpeError> {
        Self::from_merge_file(&fs::read_to_string(path)?)
    }

    /// Symbols of one word after replaying the merges.
    pub fn segment(&self, word: &str) -> Vec<Symbol> {
        let mut symbols = initial_symbols(word);
        loop {
            let best = symbols
                .windows(2)
                .filter_map(|w| self.ranks.get(&(w[0].clone(), w[1].clone())).copied())
                .min();
            let Some(rank) = best else { break };
            let (a, b) = &self.merges[rank];
            symbols = merge_all(&symbols, a, b);
        }
        symbols
    }

    /// Pieces for one word, continuation-marked except for the last.
    pub fn apply_word(&self, word: &str) -> Vec<String> {
        let mut texts: Vec<String> = self.segment(word).into_iter().map(|s| s.text).collect();
        // A final piece that itself ends with the marker would read as a
        // continuation; peel its last character off.
        if let Some(last) = texts.pop_if(|t| t.ends_with(&self.continuation)) {
            let split = last.char_indices().last().map(|(i, _)| i).unwrap_or(0);
            texts.push(last[..split].to_string());
            texts.push(last[split..].to_string());
        }
        let n = texts.len();
        texts
            .into_iter()
            .enumerate()
            .map(|(i, t)| if i + 1 < n { t + &self.continuation } else { t })
            .collect()
    }
}

fn initial_symbols(word: &str) -> Vec<Symbol> {
    let chars: Vec<char> = word.chars().collect();
    let n = chars.len();
    chars
        .into_iter()
        .enumerate()
        .map(|(i, c)| Symbol::new(c.to_string(), i + 1 == n))
        .collect()
}

fn merge_all(symbols: &[Symbol], a: &Symbol, b: &Symbol) -> Vec<Symbol> {
    let mut out = Vec::with_capacity(symbols.len());
    let mut i = 0;
    while i < symbols.len() {
        if i + 1 < symbols.len() && &symbols[i] == a && &symbols[i + 1] == b {
            out.push(a.concat(b));
            i += 2;
        } else {
            out.push(symbols[i].clone());
            i += 1;
        }
    }
    out
}

/// Learns up to `num_operations` merges from `corpus`.
///
/// Each step merges the most frequent adjacent pair; equal frequencies go
/// to the lexicographically smallest pair (compared as written in the merge
/// file). Learning stops early once no pair occurs more than once.
pub fn bpe_learn<S: AsRef<str>>(corpus: &[Vec<S>], num_operations: usize) -> Result<BpeModel, BpeError> {
    let mut freq: HashMap<&str, u64> = HashMap::new();
    for tok in corpus.iter().flatten() {
        *freq.entry(tok.as_ref()).or_insert(0) += 1;
    }
    if freq.is_empty() {
        return Err(BpeError::EmptyCorpus);
    }
    let mut vocab: Vec<(&str, u64)> = freq.into_iter().collect();
    vocab.sort_unstable();

    // Symbols are interned; pairs are counted incrementally.
    let mut interner = Interner::default();
    let mut words: Vec<Vec<u32>> = vocab
        .iter()
        .map(|(w, _)| initial_symbols(w).into_iter().map(|s| interner.intern(s)).collect())
        .collect();
    let counts: Vec<i64> = vocab.iter().map(|&(_, c)| c as i64).collect();

    let mut pair_counts: HashMap<(u32, u32), i64> = HashMap::new();
    let mut pair_words: HashMap<(u32, u32), HashSet<usize>> = HashMap::new();
    for (wi, word) in words.iter().enumerate() {
        for w in word.windows(2) {
            *pair_counts.entry((w[0], w[1])).or_insert(0) += counts[wi];
            pair_words.entry((w[0], w[1])).or_default().insert(wi);
        }
    }

    let mut merges = Vec::new();
    while merges.len() < num_operations {
        let mut best: Option<((u32, u32), i64)> = None;
        for (&pair, &c) in &pair_counts {
            let better = match best {
                None => c > 0,
                Some((bp, bc)) => c > bc || (c == bc && interner.pair_lt(pair, bp)),
            };
            if better {
                best = Some((pair, c));
            }
        }
        let Some(((left, right), count)) = best else { break };
        if count < 2 {
            break;
        }
        let merged = interner.symbol(left).concat(interner.symbol(right));
        let merged_id = interner.intern(merged);
        merges.push((interner.symbol(left).clone(), interner.symbol(right).clone()));

        let mut affected: Vec<usize> = pair_words
            .remove(&(left, right))
            .unwrap_or_default()
            .into_iter()
            .collect();
        affected.sort_unstable();
        for wi in affected {
            let word = &words[wi];
            if !word.windows(2).any(|w| w[0] == left && w[1] == right) {
                continue;
            }
            for w in word.windows(2) {
                let e = pair_counts.entry((w[0], w[1])).or_insert(0);
                *e -= counts[wi];
            }
            let mut next = Vec::with_capacity(word.len());
            let mut i = 0;
            while i < word.len() {
                if i + 1 < word.len() && word[i] == left && word[i + 1] == right {
                    next.push(merged_id);
                    i += 2;
                } else {
                    next.push(word[i]);
                    i += 1;
                }
            }
            for w in next.windows(2) {
                *pair_counts.entry((w[0], w[1])).or_insert(0) += counts[wi];
                pair_words.entry((w[0], w[1])).or_default().insert(wi);
            }
            words[wi] = next;
        }
        pair_counts.retain(|_, c| *c > 0);
    }
    Ok(BpeModel::new(merges, num_operations))
}

#[derive(Default)]
struct Interner {
    symbols: Vec<Symbol>,
    rendered: Vec<String>,
    ids: HashMap<Symbol, u32>,
}

impl Interner {
    fn intern(&mut self, s: Symbol) -> u32 {
        if let Some(&id) = self.ids.get(&s) {
            return id;
        }
        let id = self.symbols.len() as u32;
        self.rendered.push(s.to_string());
        self.ids.insert(s.clone(), id);
        self.symbols.push(s);
        id
    }

    fn symbol(&self, id: u32) -> &Symbol {
        &self.symbols[id as usize]
    }

    fn pair_lt(&self, a: (u32, u32), b: (u32, u32)) -> bool {
        let ra = (&self.rendered[a.0 as usize], &self.rendered[a.1 as usize]);
        let rb = (&self.rendered[b.0 as usize], &self.rendered[b.1 as usize]);
        ra < rb
    }
}

/// Segments every token of `sentence`.
pub fn bpe_apply<S: AsRef<str>>(sentence: &[S], model: &BpeModel) -> Vec<String> {
    sentence.iter().flat_map(|t| model.apply_word(t.as_ref())).collect()
}

/// Segments a whole corpus, caching per distinct word.
pub fn bpe_apply_corpus<S: AsRef<str>>(corpus: &[Vec<S>], model: &BpeModel) -> Vec<Vec<String>> {
    let mut cache: HashMap<&str, Vec<String>> = HashMap::new();
    corpus
        .iter()
        .map(|sentence| {
            let mut out = Vec::new();
            for tok in sentence {
                let pieces = cache
                    .entry(tok.as_ref())
                    .or_insert_with(|| model.apply_word(tok.as_ref()));
                out.extend(pieces.iter().cloned());
            }
            out
        })
        .collect()
}

/// Joins continuation-marked pieces back into words.
pub fn bpe_decode<S: AsRef<str>>(pieces: &[S], model: &BpeModel) -> Result<Vec<String>, BpeError> {
    let marker = model.continuation();
    let mut out = Vec::new();
    let mut current = String::new();
    for piece in pieces {
        let piece = piece.as_ref();
        match piece.strip_suffix(marker) {
            Some(stem) => current.push_str(stem),
            None => {
                current.push_str(piece);
                out.push(std::mem::take(&mut current));
            }
        }
    }
    if let Some(last) = pieces.last() {
        if last.as_ref().ends_with(marker) {
            return Err(BpeError::DanglingContinuation(last.as_ref().to_string()));
        }
    }
    Ok(out)
}
