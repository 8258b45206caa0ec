use std::collections::HashSet;

use super::{CombineMode, PipelineError};
use crate::codecs::{encode_or_pass, Codec};
use crate::corpus::Sentence;

/// A word stream and its code stream, line-aligned.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedCorpus {
    pub words: Vec<Sentence>,
    pub codes: Vec<Sentence>,
    /// Every line has as many codes as words.
    pub token_aligned: bool,
    /// Tokens copied unchanged because the codec does not apply to them.
    pub passed_through: usize,
    /// Tokens copied unchanged after a codec error.
    pub failed: usize,
}

/// Encodes every token. Tokens the codec cannot encode are copied as they
/// are.
pub fn encode_corpus(corpus: &[Sentence], codec: &dyn Codec) -> EncodedCorpus {
    let mut passed_through = 0;
    let mut failed = 0;
    let codes = corpus
        .iter()
        .map(|sentence| {
            let mut out = Vec::with_capacity(sentence.len());
            for tok in sentence {
                match encode_or_pass(codec, tok) {
                    Ok((codes, passed)) => {
                        passed_through += usize::from(passed);
                        out.extend(codes);
                    }
                    Err(e) => {
                        log::debug!("{tok:?}: {e}");
                        failed += 1;
                        out.push(tok.clone());
                    }
                }
            }
            out
        })
        .collect::<Vec<_>>();
    if failed > 0 {
        log::warn!("{failed} tokens could not be encoded and were copied unchanged");
    }
    let token_aligned = corpus.iter().zip(&codes).all(|(w, c)| w.len() == c.len());
    EncodedCorpus {
        words: corpus.to_vec(),
        codes,
        token_aligned,
        passed_through,
        failed,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Combined {
    Single(Vec<Sentence>),
    Paired(Vec<Sentence>, Vec<Sentence>),
}

/// Joins the (already segmented) streams according to `mode`.
pub fn combine(
    words: &[Sentence],
    codes: &[Sentence],
    mode: CombineMode,
    separator: Option<&str>,
) -> Result<Combined, PipelineError> {
    if words.len() != codes.len() {
        return Err(PipelineError::MisalignedStreams {
            words: words.len(),
            codes: codes.len(),
        });
    }
    Ok(match mode {
        CombineMode::CodesOnly => Combined::Single(codes.to_vec()),
        CombineMode::MultiSource => Combined::Paired(words.to_vec(), codes.to_vec()),
        CombineMode::Concat => {
            if let Some(sep) = separator {
                let used: HashSet<&str> = words.iter().chain(codes).flatten().map(String::as_str).collect();
                if used.contains(sep) {
                    return Err(PipelineError::SeparatorCollision(sep.to_string()));
                }
            }
            Combined::Single(
                words
                    .iter()
                    .zip(codes)
                    .map(|(w, c)| {
                        let mut line = w.clone();
                        line.extend(separator.map(str::to_string));
                        line.extend(c.iter().cloned());
                        line
                    })
                    .collect(),
            )
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codecs::Phonetic;
    use crate::corpus::parse_corpus;

    #[test]
    fn soundex_examples() {
        let e = encode_corpus(&parse_corpus("body but bad\n1 2 3\nspeak 42"), &Phonetic::Soundex);
        assert_eq!(e.codes, parse_corpus("B300 B300 B300\n1 2 3\nS120 42"));
        assert_eq!(e.passed_through, 4);
        assert!(e.token_aligned);
    }

    #[test]
    fn concat_and_multi_source() {
        let w = parse_corpus("a b\n");
        let c = parse_corpus("X Y\n");
        assert_eq!(
            combine(&w, &c, CombineMode::Concat, Some("<sep>")).unwrap(),
            Combined::Single(parse_corpus("a b <sep> X Y"))
        );
        assert_eq!(
            combine(&w, &c, CombineMode::Concat, None).unwrap(),
            Combined::Single(parse_corpus("a b X Y"))
        );
        match combine(&w, &c, CombineMode::MultiSource, Some("<sep>")).unwrap() {
            Combined::Paired(a, b) => assert_eq!((a.len(), b.len()), (1, 1)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_line_keeps_separator() {
        let empty = vec![Vec::new()];
        assert_eq!(
            combine(&empty, &empty, CombineMode::Concat, Some("<sep>")).unwrap(),
            Combined::Single(parse_corpus("<sep>"))
        );
    }

    #[test]
    fn separator_collision() {
        let w = parse_corpus("a <sep>");
        assert!(matches!(
            combine(&w, &w, CombineMode::Concat, Some("<sep>")),
            Err(PipelineError::SeparatorCollision(_))
        ));
    }
}
