//! Unique and total token counts per stream.

use std::collections::HashSet;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VocabStats {
    pub unique: usize,
    pub total: usize,
}

pub fn vocab_stats<S: AsRef<str>>(corpus: &[Vec<S>]) -> VocabStats {
    let mut seen = HashSet::new();
    let mut total = 0;
    for tok in corpus.iter().flatten() {
        seen.insert(tok.as_ref());
        total += 1;
    }
    VocabStats {
        unique: seen.len(),
        total,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VocabReport {
    pub schema: &'static str,
    pub streams: Vec<(String, VocabStats)>,
}

impl VocabReport {
    pub fn new() -> Self {
        Self {
            schema: "phonetic-mt/vocab/v1",
            streams: Vec::new(),
        }
    }

    pub fn add<S: AsRef<str>>(&mut self, name: impl Into<String>, corpus: &[Vec<S>]) -> VocabStats {
        let stats = vocab_stats(corpus);
        self.streams.push((name.into(), stats));
        stats
    }

    pub fn get(&self, name: &str) -> Option<VocabStats> {
        self.streams.iter().find(|(n, _)| n == name).map(|(_, s)| *s)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("stream,unique,total\n");
        for (name, s) in &self.streams {
            out.push_str(&format!("{name},{},{}\n", s.unique, s.total));
        }
        out
    }
}

impl Default for VocabReport {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_corpus;

    #[test]
    fn counts() {
        assert_eq!(vocab_stats(&parse_corpus("a b a")), VocabStats { unique: 2, total: 3 });
        assert_eq!(vocab_stats(&parse_corpus("")), VocabStats { unique: 0, total: 0 });
    }

    #[test]
    fn report_keeps_stream_order() {
        let mut r = VocabReport::new();
        r.add("words", &parse_corpus("a b"));
        r.add("codes", &parse_corpus("x x"));
        assert_eq!(r.to_csv(), "stream,unique,total\nwords,2,2\ncodes,1,2\n");
        assert_eq!(r.get("codes"), Some(VocabStats { unique: 1, total: 2 }));
    }
}
