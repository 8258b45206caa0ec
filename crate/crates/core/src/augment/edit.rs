//! Word-level edit operations.

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use serde::Serialize;

use super::AugmentError;
use crate::rng::{self, SeededRng};

/// Word-level Levenshtein distance with unit costs.
pub fn edit_distance<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, x) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let next = (row[j + 1] + 1).min(row[j] + 1).min(diag + usize::from(x != y));
            diag = row[j + 1];
            row[j + 1] = next;
        }
    }
    row[b.len()]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EditKind {
    Deletion,
    Substitution,
    Insertion,
}

const KINDS: [EditKind; 3] = [EditKind::Deletion, EditKind::Substitution, EditKind::Insertion];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationSpec {
    pub k: usize,
    pub seed: u64,
    /// Probabilities of deletion, substitution and insertion.
    pub op_weights: [f64; 3],
}

impl PerturbationSpec {
    pub fn new(k: usize, seed: u64) -> Self {
        Self {
            k,
            seed,
            op_weights: [1.0 / 3.0; 3],
        }
    }

    pub fn with_weights(mut self, weights: [f64; 3]) -> Result<Self, AugmentError> {
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|w| w.is_nan() || *w < 0.0) || (total - 1.0).abs() > 1e-9 {
            return Err(AugmentError::InvalidWeights(weights));
        }
        self.op_weights = weights;
        Ok(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Perturbed {
    pub tokens: Vec<String>,
    pub operations: Vec<EditKind>,
    /// Deletions emptied the sentence; the remaining operations were
    /// insertions.
    pub exhausted: bool,
}

fn perturb_with<S: AsRef<str>>(
    sentence: &[S],
    vocab: &[String],
    spec: &PerturbationSpec,
    rng: &mut SeededRng,
) -> Result<Perturbed, AugmentError> {
    let mut tokens: Vec<String> = sentence.iter().map(|t| t.as_ref().to_string()).collect();
    let mut operations = Vec::with_capacity(spec.k);
    if spec.k == 0 {
        return Ok(Perturbed {
            tokens,
            operations,
            exhausted: false,
        });
    }
    if vocab.is_empty() {
        return Err(AugmentError::EmptyVocabulary);
    }
    let kinds = WeightedIndex::new(spec.op_weights).map_err(|_| AugmentError::InvalidWeights(spec.op_weights))?;
    let mut exhausted = false;
    for _ in 0..spec.k {
        let mut kind = KINDS[kinds.sample(rng)];
        if tokens.is_empty() && kind != EditKind::Insertion {
            exhausted = true;
        }
        if exhausted {
            kind = EditKind::Insertion;
        }
        match kind {
            EditKind::Deletion => {
                let at = rng.gen_range(0..tokens.len());
                tokens.remove(at);
            }
            EditKind::Substitution => {
                let at = rng.gen_range(0..tokens.len());
                tokens[at] = vocab[rng.gen_range(0..vocab.len())].clone();
            }
            EditKind::Insertion => {
                let at = rng.gen_range(0..=tokens.len());
                tokens.insert(at, vocab[rng.gen_range(0..vocab.len())].clone());
            }
        }
        operations.push(kind);
    }
    if exhausted {
        log::warn!("sentence emptied by deletions; remaining edits were insertions");
    }
    Ok(Perturbed {
        tokens,
        operations,
        exhausted,
    })
}

/// Applies exactly `spec.k` random edits in sequence. Position, edit type
/// and inserted or substituted word are drawn uniformly (edit type by
/// `op_weights`). Edits may land on the same position, so the resulting
/// edit distance is at most `k`.
pub fn perturb_edit<S: AsRef<str>>(
    sentence: &[S],
    vocab: &[String],
    spec: &PerturbationSpec,
) -> Result<Perturbed, AugmentError> {
    perturb_with(sentence, vocab, spec, &mut rng::seeded(spec.seed))
}

/// Perturbs every sentence; sentence `i` draws from stream `i` of the seed.
pub fn perturb_corpus<S: AsRef<str>>(
    corpus: &[Vec<S>],
    vocab: &[String],
    spec: &PerturbationSpec,
) -> Result<Vec<Perturbed>, AugmentError> {
    corpus
        .iter()
        .enumerate()
        .map(|(i, s)| perturb_with(s, vocab, spec, &mut rng::substream(spec.seed, i as u64)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::tokenize;

    fn vocab() -> Vec<String> {
        ["x", "y", "z"].iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn distance_examples() {
        let s = tokenize("a b c d");
        assert_eq!(edit_distance(&s, &s), 0);
        assert_eq!(edit_distance(&s, &tokenize("a c d")), 1);
        assert_eq!(edit_distance(&tokenize("a b c"), &tokenize("a x c y")), 2);
        assert_eq!(edit_distance::<String>(&[], &tokenize("a b")), 2);
    }

    #[test]
    fn zero_edits_is_identity() {
        let s = tokenize("a b c");
        let p = perturb_edit(&s, &vocab(), &PerturbationSpec::new(0, 1)).unwrap();
        assert_eq!(p.tokens, s);
    }

    #[test]
    fn single_deletion() {
        let s = tokenize("a b c d e");
        let spec = PerturbationSpec::new(1, 3).with_weights([1.0, 0.0, 0.0]).unwrap();
        let p = perturb_edit(&s, &vocab(), &spec).unwrap();
        assert_eq!(p.tokens.len(), 4);
        assert_eq!(edit_distance(&s, &p.tokens), 1);
    }

    #[test]
    fn exhausted_sentence_switches_to_insertions() {
        let s = tokenize("a b");
        let spec = PerturbationSpec::new(4, 0).with_weights([1.0, 0.0, 0.0]).unwrap();
        let p = perturb_edit(&s, &vocab(), &spec).unwrap();
        assert!(p.exhausted);
        assert_eq!(p.tokens.len(), 2);
        assert_eq!(
            p.operations,
            [
                EditKind::Deletion,
                EditKind::Deletion,
                EditKind::Insertion,
                EditKind::Insertion
            ]
        );
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        let corpus: Vec<_> = (0..50).map(|i| tokenize(&format!("w{i} a b c d e f"))).collect();
        let spec = PerturbationSpec::new(3, 8);
        let a = perturb_corpus(&corpus, &vocab(), &spec).unwrap();
        assert_eq!(a, perturb_corpus(&corpus, &vocab(), &spec).unwrap());
        let b = perturb_corpus(&corpus, &vocab(), &PerturbationSpec::new(3, 9)).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn bad_weights_and_vocab() {
        assert!(PerturbationSpec::new(1, 0).with_weights([0.5, 0.5, 0.5]).is_err());
        assert!(PerturbationSpec::new(1, 0).with_weights([-0.5, 1.0, 0.5]).is_err());
        assert!(matches!(
            perturb_edit(&tokenize("a"), &[], &PerturbationSpec::new(1, 0)),
            Err(AugmentError::EmptyVocabulary)
        ));
    }
}
