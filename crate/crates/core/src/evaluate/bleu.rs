//! Case-sensitive corpus BLEU-4 over whitespace tokens, following the
//! classic multi-bleu conventions: clipped n-gram counts summed over the
//! corpus, geometric mean of the four precisions, and a brevity penalty
//! against the closest reference length.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

const MAX_ORDER: usize = 4;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BleuError {
    #[error("{hypotheses} hypotheses but {references} references")]
    LineCountMismatch { hypotheses: usize, references: usize },
    #[error("no reference streams")]
    NoReferences,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BleuOptions {
    /// Add one to matches and totals for orders 2 to 4, so short test sets
    /// without higher-order matches still get a non-zero score.
    pub smooth: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BleuReport {
    pub schema: &'static str,
    pub bleu: f64,
    /// Modified precisions p1..p4 as fractions.
    pub precisions: [f64; MAX_ORDER],
    pub matches: [usize; MAX_ORDER],
    pub totals: [usize; MAX_ORDER],
    pub brevity_penalty: f64,
    pub ratio: f64,
    pub hyp_length: usize,
    pub ref_length: usize,
}

impl fmt::Display for BleuReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.precisions.map(|x| 100.0 * x);
        write!(
            f,
            "BLEU = {:.2}, {:.1}/{:.1}/{:.1}/{:.1} (BP={:.3}, ratio={:.3}, hyp_len={}, ref_len={})",
            self.bleu, p[0], p[1], p[2], p[3], self.brevity_penalty, self.ratio, self.hyp_length, self.ref_length
        )
    }
}

fn ngram_counts<S: AsRef<str>>(tokens: &[S], n: usize) -> HashMap<Vec<&str>, usize> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for w in tokens.windows(n) {
            *counts.entry(w.iter().map(AsRef::as_ref).collect()).or_insert(0) += 1;
        }
    }
    counts
}

/// BLEU of `hypotheses` against a single reference stream.
pub fn bleu<S: AsRef<str>, T: AsRef<str>>(
    hypotheses: &[Vec<S>],
    references: &[Vec<T>],
    options: BleuOptions,
) -> Result<BleuReport, BleuError> {
    bleu_multi(hypotheses, &[references], options)
}

/// BLEU with one or more reference streams. Counts are clipped by the
/// maximum count in any reference; the effective reference length of a
/// sentence is the closest one, shorter on ties.
pub fn bleu_multi<S: AsRef<str>, T: AsRef<str>>(
    hypotheses: &[Vec<S>],
    references: &[&[Vec<T>]],
    options: BleuOptions,
) -> Result<BleuReport, BleuError> {
    if references.is_empty() {
        return Err(BleuError::NoReferences);
    }
    for r in references {
        if r.len() != hypotheses.len() {
            return Err(BleuError::LineCountMismatch {
                hypotheses: hypotheses.len(),
                references: r.len(),
            });
        }
    }
    let mut matches = [0usize; MAX_ORDER];
    let mut totals = [0usize; MAX_ORDER];
    let mut hyp_length = 0;
    let mut ref_length = 0;
    for (i, hyp) in hypotheses.iter().enumerate() {
        hyp_length += hyp.len();
        let closest = references
            .iter()
            .map(|r| r[i].len())
            .min_by_key(|&len| (len.abs_diff(hyp.len()), len))
            .expect("non-empty");
        ref_length += closest;
        for n in 1..=MAX_ORDER {
            let mut max_ref: HashMap<Vec<&str>, usize> = HashMap::new();
            for r in references {
                for (g, c) in ngram_counts(&r[i], n) {
                    let e = max_ref.entry(g).or_insert(0);
                    *e = (*e).max(c);
                }
            }
            for (g, c) in ngram_counts(hyp, n) {
                matches[n - 1] += c.min(max_ref.get(&g).copied().unwrap_or(0));
                totals[n - 1] += c;
            }
        }
    }
    let mut precisions = [0.0; MAX_ORDER];
    for n in 0..MAX_ORDER {
        let (m, t) = if options.smooth && n > 0 {
            (matches[n] + 1, totals[n] + 1)
        } else {
            (matches[n], totals[n])
        };
        precisions[n] = if t == 0 { 0.0 } else { m as f64 / t as f64 };
    }
    let brevity_penalty = if hyp_length == 0 {
        0.0
    } else if hyp_length < ref_length {
        (1.0 - ref_length as f64 / hyp_length as f64).exp()
    } else {
        1.0
    };
    let score = if precisions.contains(&0.0) {
        0.0
    } else {
        let log_mean = precisions.iter().map(|p| p.ln()).sum::<f64>() / MAX_ORDER as f64;
        100.0 * brevity_penalty * log_mean.exp()
    };
    Ok(BleuReport {
        schema: "phonetic-mt/bleu/v1",
        bleu: score,
        precisions,
        matches,
        totals,
        brevity_penalty,
        ratio: if ref_length == 0 {
            0.0
        } else {
            hyp_length as f64 / ref_length as f64
        },
        hyp_length,
        ref_length,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_corpus;

    fn score(h: &str, r: &str, smooth: bool) -> BleuReport {
        bleu(&parse_corpus(h), &parse_corpus(r), BleuOptions { smooth }).unwrap()
    }

    #[test]
    fn identical_is_hundred() {
        let c = "the cat sat on the mat\nthere is a cat on the mat";
        let r = score(c, c, false);
        assert!((r.bleu - 100.0).abs() < 1e-9);
        assert_eq!(r.brevity_penalty, 1.0);
    }

    #[test]
    fn no_overlap_is_zero() {
        assert_eq!(score("a b c d e", "v w x y z", false).bleu, 0.0);
    }

    #[test]
    fn clipped_unigrams() {
        let r = score("the the the the", "the cat", false);
        assert_eq!(r.matches[0], 1);
        assert_eq!(r.totals[0], 4);
        assert!((r.precisions[0] - 0.25).abs() < 1e-12);
        assert_eq!(r.bleu, 0.0);
    }

    #[test]
    fn brevity_penalty_and_line_format() {
        let r = score("a b c d", "a b c d e f g h", false);
        assert!((r.brevity_penalty - (-1.0f64).exp()).abs() < 1e-12);
        assert_eq!(
            r.to_string(),
            "BLEU = 36.79, 100.0/100.0/100.0/100.0 (BP=0.368, ratio=0.500, hyp_len=4, ref_len=8)"
        );
    }

    #[test]
    fn line_count_mismatch() {
        assert_eq!(
            bleu(&parse_corpus("a\nb"), &parse_corpus("a"), BleuOptions::default()),
            Err(BleuError::LineCountMismatch {
                hypotheses: 2,
                references: 1
            })
        );
    }

    #[test]
    fn multi_reference_clipping_and_length() {
        let h = parse_corpus("the the cat");
        let r1 = parse_corpus("the cat");
        let r2 = parse_corpus("the the dog sat");
        let r = bleu_multi(&h, &[&r1[..], &r2[..]], BleuOptions::default()).unwrap();
        assert_eq!(r.matches[0], 3);
        // 2 and 4 are equally close to 3; the shorter wins.
        assert_eq!(r.ref_length, 2);
    }
}
