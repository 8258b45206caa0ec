use super::fold::fold_ascii_letters;
use super::CodecError;

fn digit(letter: u8) -> Option<u8> {
    match letter {
        b'B' | b'F' | b'P' | b'V' => Some(b'1'),
        b'C' | b'G' | b'J' | b'K' | b'Q' | b'S' | b'X' | b'Z' => Some(b'2'),
        b'D' | b'T' => Some(b'3'),
        b'L' => Some(b'4'),
        b'M' | b'N' => Some(b'5'),
        b'R' => Some(b'6'),
        _ => None,
    }
}

/// American Soundex: the first letter followed by three digits.
///
/// Letters with the same digit collapse when adjacent or separated only by
/// `H`/`W`; a vowel (or `Y`) between them keeps both digits.
pub fn soundex(token: &str) -> Result<String, CodecError> {
    let letters = fold_ascii_letters(token);
    let bytes = letters.as_bytes();
    let Some((&first, rest)) = bytes.split_first() else {
        return Err(CodecError::NonAlphabeticToken(token.to_string()));
    };

    let mut code = Vec::with_capacity(4);
    code.push(first);
    let mut last = digit(first);
    for &letter in rest {
        if code.len() == 4 {
            break;
        }
        match digit(letter) {
            Some(d) => {
                if last != Some(d) {
                    code.push(d);
                }
                last = Some(d);
            }
            None if letter == b'H' || letter == b'W' => {}
            None => last = None,
        }
    }
    code.resize(4, b'0');
    Ok(String::from_utf8(code).expect("ascii"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_vectors() {
        for w in ["body", "but", "bad"] {
            assert_eq!(soundex(w).unwrap(), "B300");
        }
        for w in ["speak", "space", "suppose", "speech"] {
            assert_eq!(soundex(w).unwrap(), "S120");
        }
    }

    #[test]
    fn separator_rules() {
        assert_eq!(soundex("Robert").unwrap(), "R163");
        assert_eq!(soundex("Rupert").unwrap(), "R163");
        // H between S and C does not separate the two 2s.
        assert_eq!(soundex("Ashcraft").unwrap(), "A261");
        // The first letter's own digit suppresses an identical follower.
        assert_eq!(soundex("Pfister").unwrap(), "P236");
        // A vowel between two 2s keeps both.
        assert_eq!(soundex("Tymczak").unwrap(), "T522");
    }

    #[test]
    fn padding_and_errors() {
        assert_eq!(soundex("a").unwrap(), "A000");
        assert_eq!(soundex("Lee").unwrap(), "L000");
        assert!(matches!(soundex("1984"), Err(CodecError::NonAlphabeticToken(_))));
    }

    #[test]
    fn folds_diacritics() {
        assert_eq!(soundex("Müller").unwrap(), soundex("Muller").unwrap());
    }
}
