//! Substitution noise guided by embedding similarity.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::index;
use rand::Rng;
use serde::Serialize;

use super::AugmentError;
use crate::geometry::EmbeddingTable;
use crate::rng;

/// How the per-sentence count `fraction · len` becomes an integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Rounding {
    /// Round up. Overshoots the target rate on short sentences.
    Ceil,
    /// Round down, then add one with probability equal to the fractional
    /// part. The expected count is exactly `fraction · len`.
    Stochastic,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseSpec {
    pub fraction: f64,
    pub top_n: usize,
    pub seed: u64,
    pub rounding: Rounding,
}

impl NoiseSpec {
    pub fn new(fraction: f64, seed: u64) -> Result<Self, AugmentError> {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(AugmentError::InvalidFraction(fraction));
        }
        Ok(Self {
            fraction,
            top_n: 10,
            seed,
            rounding: Rounding::Stochastic,
        })
    }

    pub fn with_top_n(mut self, top_n: usize) -> Result<Self, AugmentError> {
        if top_n == 0 {
            return Err(AugmentError::InvalidTopN);
        }
        self.top_n = top_n;
        Ok(self)
    }

    pub fn with_rounding(mut self, rounding: Rounding) -> Self {
        self.rounding = rounding;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseStats {
    pub sentences: usize,
    pub tokens: usize,
    pub tokens_with_vectors: usize,
    pub coverage: f64,
    pub sampled_positions: usize,
    pub replaced_tokens: usize,
    pub realized_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseOutput {
    pub corpus: Vec<Vec<String>>,
    /// Sampled positions per sentence, ascending.
    pub positions: Vec<Vec<usize>>,
    pub stats: NoiseStats,
}

impl NoiseOutput {
    pub fn manifest_json(&self, spec: &NoiseSpec) -> String {
        let doc = serde_json::json!({
            "schema": "phonetic-mt/noise-manifest/v1",
            "rng": rng::RNG_NAME,
            "spec": spec,
            "stats": self.stats,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn write_manifest(&self, path: impl AsRef<Path>, spec: &NoiseSpec) -> Result<(), AugmentError> {
        fs::write(path, self.manifest_json(spec))?;
        Ok(())
    }
}

struct Neighbors {
    words: Vec<String>,
    weights: Option<WeightedIndex<f64>>,
}

fn unit_vectors(table: &EmbeddingTable) -> Vec<Vec<f64>> {
    table
        .iter()
        .map(|(_, v)| {
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                v.to_vec()
            } else {
                v.iter().map(|x| x / norm).collect()
            }
        })
        .collect()
}

fn neighbors_of(word: usize, units: &[String], normed: &[Vec<f64>], top_n: usize) -> Neighbors {
    let q = &normed[word];
    let mut scored: Vec<(f64, usize)> = normed
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != word)
        .map(|(j, v)| (q.iter().zip(v).map(|(a, b)| a * b).sum(), j))
        .collect();
    // Highest similarity first; ties by table order.
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    scored.truncate(top_n);
    let weights: Vec<f64> = scored.iter().map(|(s, _)| s.max(0.0)).collect();
    Neighbors {
        words: scored.iter().map(|&(_, j)| units[j].clone()).collect(),
        weights: WeightedIndex::new(weights).ok(),
    }
}

fn sample_count(len: usize, spec: &NoiseSpec, rng: &mut rng::SeededRng) -> usize {
    let exact = spec.fraction * len as f64;
    let n = match spec.rounding {
        // Guard against 0.3 * 10 = 3.0000000000000004.
        Rounding::Ceil => (exact * (1.0 - 1e-12)).ceil() as usize,
        Rounding::Stochastic => {
            let base = (exact * (1.0 + 1e-12)).floor();
            let frac = (exact - base).max(0.0);
            base as usize + usize::from(rng.gen::<f64>() < frac)
        }
    };
    n.min(len)
}

/// Replaces a sample of positions in every sentence with a similar word.
///
/// Each sampled word with a vector is replaced by one of its `top_n`
/// cosine-nearest neighbours, drawn with probability proportional to the
/// positive part of the similarity. Words without vectors, or whose
/// neighbours all have non-positive similarity, stay unchanged. Sentence
/// `i` draws from stream `i` of the seed.
pub fn noise_augment<S: AsRef<str>>(
    corpus: &[Vec<S>],
    table: &EmbeddingTable,
    spec: &NoiseSpec,
) -> Result<NoiseOutput, AugmentError> {
    if table.is_empty() {
        return Err(AugmentError::EmptyEmbedding);
    }
    let index_of: HashMap<&str, usize> = table.units().iter().enumerate().map(|(i, u)| (u.as_str(), i)).collect();
    let normed = unit_vectors(table);
    let mut cache: HashMap<usize, Neighbors> = HashMap::new();

    let mut stats = NoiseStats {
        sentences: corpus.len(),
        tokens: 0,
        tokens_with_vectors: 0,
        coverage: 0.0,
        sampled_positions: 0,
        replaced_tokens: 0,
        realized_rate: 0.0,
    };
    let mut out = Vec::with_capacity(corpus.len());
    let mut all_positions = Vec::with_capacity(corpus.len());
    for (i, sentence) in corpus.iter().enumerate() {
        let mut rng = rng::substream(spec.seed, i as u64);
        let mut tokens: Vec<String> = sentence.iter().map(|t| t.as_ref().to_string()).collect();
        stats.tokens += tokens.len();
        stats.tokens_with_vectors += tokens.iter().filter(|t| index_of.contains_key(t.as_str())).count();
        let count = sample_count(tokens.len(), spec, &mut rng);
        let mut positions = index::sample(&mut rng, tokens.len(), count).into_vec();
        positions.sort_unstable();
        stats.sampled_positions += positions.len();
        for &p in &positions {
            let Some(&w) = index_of.get(tokens[p].as_str()) else {
                continue;
            };
            let nb = cache
                .entry(w)
                .or_insert_with(|| neighbors_of(w, table.units(), &normed, spec.top_n));
            if let Some(dist) = &nb.weights {
                tokens[p] = nb.words[dist.sample(&mut rng)].clone();
                stats.replaced_tokens += 1;
            }
        }
        out.push(tokens);
        all_positions.push(positions);
    }
    if stats.tokens > 0 {
        stats.coverage = stats.tokens_with_vectors as f64 / stats.tokens as f64;
        stats.realized_rate = stats.replaced_tokens as f64 / stats.tokens as f64;
    }
    if stats.coverage < 0.9 {
        log::warn!("embeddings cover only {:.1}% of corpus tokens", 100.0 * stats.coverage);
    }
    Ok(NoiseOutput {
        corpus: out,
        positions: all_positions,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_corpus;

    fn table(rows: &[(&str, [f64; 2])]) -> EmbeddingTable {
        EmbeddingTable::from_rows(2, rows.iter().map(|(u, v)| (u.to_string(), v.to_vec())).collect()).unwrap()
    }

    #[test]
    fn two_words_always_swap() {
        let t = table(&[("hot", [1.0, 0.1]), ("warm", [1.0, 0.2])]);
        let corpus = parse_corpus("hot warm hot\nwarm");
        let spec = NoiseSpec::new(1.0, 4).unwrap();
        let out = noise_augment(&corpus, &t, &spec).unwrap();
        assert_eq!(out.corpus, parse_corpus("warm hot warm\nhot"));
        assert_eq!(out.stats.replaced_tokens, 4);
    }

    #[test]
    fn tiny_fraction_is_identity() {
        let t = table(&[("a", [1.0, 0.0]), ("b", [0.9, 0.1])]);
        let corpus = parse_corpus("a b a b\nb a");
        let out = noise_augment(&corpus, &t, &NoiseSpec::new(1e-12, 0).unwrap()).unwrap();
        assert_eq!(out.corpus, corpus);
        let ceil = NoiseSpec::new(1e-12, 0).unwrap().with_rounding(Rounding::Ceil);
        let out = noise_augment(&corpus, &t, &ceil).unwrap();
        assert_eq!(out.stats.sampled_positions, 2);
    }

    #[test]
    fn ceil_counts_per_sentence() {
        let t = table(&[("a", [1.0, 0.0]), ("b", [0.9, 0.1])]);
        let corpus = parse_corpus("a a a a a a a a a a\na a a");
        let spec = NoiseSpec::new(0.3, 1).unwrap().with_rounding(Rounding::Ceil);
        let out = noise_augment(&corpus, &t, &spec).unwrap();
        assert_eq!(out.positions[0].len(), 3);
        assert_eq!(out.positions[1].len(), 1);
    }

    #[test]
    fn lengths_preserved_and_unknown_words_untouched() {
        let t = table(&[("a", [1.0, 0.0]), ("b", [0.8, 0.2]), ("c", [0.0, 1.0])]);
        let corpus = parse_corpus("a q b q c\nq q q\na");
        let out = noise_augment(&corpus, &t, &NoiseSpec::new(0.5, 2).unwrap()).unwrap();
        for (a, b) in corpus.iter().zip(&out.corpus) {
            assert_eq!(a.len(), b.len());
            for (x, y) in a.iter().zip(b) {
                if x == "q" {
                    assert_eq!(y, "q");
                }
            }
        }
        assert!((out.stats.coverage - 4.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn negative_similarity_is_never_drawn() {
        let t = table(&[("a", [1.0, 0.0]), ("b", [0.5, 0.5]), ("c", [-1.0, 0.0])]);
        let corpus = vec![vec!["a".to_string(); 200]];
        let out = noise_augment(&corpus, &t, &NoiseSpec::new(1.0, 3).unwrap()).unwrap();
        assert!(out.corpus[0].iter().all(|w| w == "b"));
    }

    #[test]
    fn invalid_specs() {
        assert!(NoiseSpec::new(0.0, 0).is_err());
        assert!(NoiseSpec::new(1.5, 0).is_err());
        assert!(NoiseSpec::new(0.2, 0).unwrap().with_top_n(0).is_err());
        let empty = EmbeddingTable::from_rows(2, vec![]).unwrap();
        assert!(matches!(
            noise_augment(&parse_corpus("a"), &empty, &NoiseSpec::new(0.2, 0).unwrap()),
            Err(AugmentError::EmptyEmbedding)
        ));
    }
}
