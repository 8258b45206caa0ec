//! Original Metaphone (Philips, 1990).
//!
//! Rules are applied left to right over the folded, uppercased token. The
//! `TH` sound is written as `0`.

use super::fold::fold_ascii_letters;
use super::CodecError;

fn is_vowel(c: u8) -> bool {
    matches!(c, b'A' | b'E' | b'I' | b'O' | b'U')
}

fn is_front_vowel(c: Option<u8>) -> bool {
    matches!(c, Some(b'E' | b'I' | b'Y'))
}

/// Metaphone code of `token` with no length cap.
pub fn metaphone(token: &str) -> Result<String, CodecError> {
    metaphone_with_limit(token, None)
}

pub fn metaphone_with_limit(token: &str, max_len: Option<usize>) -> Result<String, CodecError> {
    let folded = fold_ascii_letters(token);
    if folded.is_empty() {
        return Err(CodecError::NonAlphabeticToken(token.to_string()));
    }
    // Duplicate adjacent letters other than C are read once; `doubled`
    // remembers where a pair was collapsed (the GG rule needs it).
    let mut w: Vec<u8> = Vec::with_capacity(folded.len());
    let mut doubled: Vec<bool> = Vec::with_capacity(folded.len());
    for b in folded.bytes() {
        if w.last() == Some(&b) && b != b'C' {
            *doubled.last_mut().expect("non-empty") = true;
        } else {
            w.push(b);
            doubled.push(false);
        }
    }
    if [&b"KN"[..], b"GN", b"PN", b"AE", b"WR"]
        .iter()
        .any(|p| w.starts_with(p))
    {
        w.remove(0);
        doubled.remove(0);
    }

    let n = w.len();
    let at = |k: usize| w.get(k).copied();
    let mut out: Vec<u8> = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        let c = w[i];
        let prev = if i > 0 { Some(w[i - 1]) } else { None };
        let next = at(i + 1);
        let next2 = at(i + 2);

        match c {
            b'A' | b'E' | b'I' | b'O' | b'U' => {
                if i == 0 {
                    out.push(c);
                }
            }
            b'B' => {
                if !(prev == Some(b'M') && i + 1 == n) {
                    out.push(b'B');
                }
            }
            b'C' => {
                if next == Some(b'I') && next2 == Some(b'A') {
                    out.push(b'X');
                } else if next == Some(b'H') {
                    out.push(if prev == Some(b'S') { b'K' } else { b'X' });
                    i += 1;
                } else if is_front_vowel(next) {
                    out.push(b'S');
                } else {
                    out.push(b'K');
                }
            }
            b'D' => {
                if next == Some(b'G') && is_front_vowel(next2) {
                    out.push(b'J');
                    i += 1;
                } else {
                    out.push(b'T');
                }
            }
            b'G' => {
                let silent_gh = next == Some(b'H') && i + 2 < n && !next2.is_some_and(is_vowel);
                let silent_gn = next == Some(b'N') && (i + 2 == n || (i + 4 == n && &w[i + 2..] == b"ED"));
                if silent_gh {
                    i += 1;
                } else if silent_gn {
                    // N is coded on the next step.
                } else if is_front_vowel(next) && !doubled[i] {
                    out.push(b'J');
                } else {
                    out.push(b'K');
                }
            }
            b'H' => {
                let after_vowel = prev.is_some_and(is_vowel);
                let before_vowel = next.is_some_and(is_vowel);
                if !after_vowel || before_vowel {
                    out.push(b'H');
                }
            }
            b'K' => {
                if prev != Some(b'C') {
                    out.push(b'K');
                }
            }
            b'P' => {
                if next == Some(b'H') {
                    out.push(b'F');
                    i += 1;
                } else {
                    out.push(b'P');
                }
            }
            b'Q' => out.push(b'K'),
            b'S' => {
                if next == Some(b'H') {
                    out.push(b'X');
                    i += 1;
                } else if next == Some(b'I') && matches!(next2, Some(b'O' | b'A')) {
                    out.push(b'X');
                } else {
                    out.push(b'S');
                }
            }
            b'T' => {
                if next == Some(b'I') && matches!(next2, Some(b'O' | b'A')) {
                    out.push(b'X');
                } else if next == Some(b'H') {
                    out.push(b'0');
                    i += 1;
                } else if !(next == Some(b'C') && next2 == Some(b'H')) {
                    out.push(b'T');
                }
            }
            b'V' => out.push(b'F'),
            b'W' => {
                if i == 0 && next == Some(b'H') {
                    out.push(b'W');
                    i += 1;
                } else if next.is_some_and(is_vowel) {
                    out.push(b'W');
                }
            }
            b'X' => {
                if i == 0 {
                    out.push(b'S');
                } else {
                    out.extend_from_slice(b"KS");
                }
            }
            b'Y' => {
                if next.is_some_and(is_vowel) {
                    out.push(b'Y');
                }
            }
            b'Z' => out.push(b'S'),
            _ => out.push(c),
        }
        i += 1;
    }

    // Every rule dropped something (e.g. a lone "Y"): keep the first letter
    // so the code stays a usable token.
    if out.is_empty() {
        out.push(w.first().copied().unwrap_or(b'?'));
    }
    if let Some(max) = max_len {
        out.truncate(max.max(1));
    }
    Ok(String::from_utf8(out).expect("ascii"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_and_digraphs() {
        assert_eq!(metaphone("this").unwrap(), "0S");
        assert_eq!(metaphone("building").unwrap(), "BLTNK");
        assert_eq!(metaphone("Thomas").unwrap(), "0MS");
        assert_eq!(metaphone("phone").unwrap(), "FN");
        assert_eq!(metaphone("character").unwrap(), "XRKTR");
    }

    #[test]
    fn silent_letters() {
        assert_eq!(metaphone("knight").unwrap(), "NT");
        assert_eq!(metaphone("lamb").unwrap(), "LM");
        assert_eq!(metaphone("sign").unwrap(), "SN");
        assert_eq!(metaphone("signed").unwrap(), "SNT");
        assert_eq!(metaphone("wright").unwrap(), "RT");
    }

    #[test]
    fn sch_is_hard() {
        assert_eq!(metaphone("school").unwrap(), "SKL");
    }

    #[test]
    fn single_letters() {
        assert_eq!(metaphone("B").unwrap(), "B");
        assert_eq!(metaphone("a").unwrap(), "A");
        assert_eq!(metaphone("y").unwrap(), "Y");
    }

    #[test]
    fn leading_x() {
        assert_eq!(metaphone("xerox").unwrap(), "SRKS");
    }
}
