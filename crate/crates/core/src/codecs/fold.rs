use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

/// Folds a token to the uppercase ASCII letters the phonetic codecs work on.
///
/// The token is NFKD-decomposed, combining marks are stripped and a few
/// letters without a decomposition (`ß`, `æ`, `ø`, ...) are spelled out.
/// Everything that is not a letter afterwards is dropped, so `"O'Brien"`
/// folds to `"OBRIEN"` and `"Müller"` to `"MULLER"`.
pub fn fold_ascii_letters(token: &str) -> String {
    let mut out = String::with_capacity(token.len());
    for c in token.nfkd() {
        if is_combining_mark(c) {
            continue;
        }
        if c.is_ascii_alphabetic() {
            out.push(c.to_ascii_uppercase());
            continue;
        }
        let spelled = match c {
            'ß' | 'ẞ' => "SS",
            'æ' | 'Æ' => "AE",
            'œ' | 'Œ' => "OE",
            'ø' | 'Ø' => "O",
            'đ' | 'Đ' | 'ð' | 'Ð' => "D",
            'ł' | 'Ł' => "L",
            'þ' | 'Þ' => "TH",
            'ı' => "I",
            _ => "",
        };
        out.push_str(spelled);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strips_diacritics() {
        assert_eq!(fold_ascii_letters("Müller"), "MULLER");
        assert_eq!(fold_ascii_letters("garçon"), "GARCON");
        assert_eq!(fold_ascii_letters("Straße"), "STRASSE");
        assert_eq!(fold_ascii_letters("élève"), "ELEVE");
    }

    #[test]
    fn drops_non_letters() {
        assert_eq!(fold_ascii_letters("O'Brien"), "OBRIEN");
        assert_eq!(fold_ascii_letters("42"), "");
        assert_eq!(fold_ascii_letters("..."), "");
        assert_eq!(fold_ascii_letters("市"), "");
    }
}
