use std::collections::HashMap;

use phonetic_mt::codecs::{metaphone, nysiis, soundex};

struct Vector<'a> {
    word: &'a str,
    soundex: &'a str,
    nysiis: &'a str,
    metaphone: &'a str,
}

fn rows(text: &str) -> impl Iterator<Item = Vec<&str>> {
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| l.split('\t').collect())
}

fn reference_vectors() -> Vec<Vector<'static>> {
    rows(include_str!("fixtures/codec_vectors.tsv"))
        .map(|f| Vector {
            word: f[0],
            soundex: f[1],
            nysiis: f[2],
            metaphone: f[3],
        })
        .collect()
}

fn deviations() -> HashMap<&'static str, &'static str> {
    rows(include_str!("fixtures/metaphone_deviations.tsv"))
        .map(|f| (f[0], f[1]))
        .collect()
}

#[test]
fn soundex_matches_reference() {
    let vectors = reference_vectors();
    assert!(vectors.len() >= 50);
    for v in &vectors {
        assert_eq!(soundex(v.word).unwrap(), v.soundex, "{}", v.word);
    }
}

#[test]
fn nysiis_matches_reference() {
    for v in &reference_vectors() {
        assert_eq!(nysiis(v.word).unwrap(), v.nysiis, "{}", v.word);
    }
}

#[test]
fn metaphone_matches_reference_modulo_listed_rules() {
    let dev = deviations();
    let mut checked = 0;
    for v in &reference_vectors() {
        let expected = dev.get(v.word).copied().unwrap_or(v.metaphone);
        assert_eq!(metaphone(v.word).unwrap(), expected, "{}", v.word);
        if !dev.contains_key(v.word) {
            checked += 1;
        }
    }
    assert!(checked >= 50);
    for (word, expected) in dev {
        assert_eq!(metaphone(word).unwrap(), expected, "{word}");
    }
}

#[test]
fn case_insensitive() {
    for v in &reference_vectors() {
        let lower = v.word.to_lowercase();
        let upper = v.word.to_uppercase();
        assert_eq!(soundex(&lower).unwrap(), soundex(&upper).unwrap());
        assert_eq!(nysiis(&lower).unwrap(), nysiis(&upper).unwrap());
        assert_eq!(metaphone(&lower).unwrap(), metaphone(&upper).unwrap());
    }
}
