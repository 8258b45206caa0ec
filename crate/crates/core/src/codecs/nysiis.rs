use super::fold::fold_ascii_letters;
use super::CodecError;

fn is_vowel(c: u8) -> bool {
    matches!(c, b'A' | b'E' | b'I' | b'O' | b'U')
}

/// NYSIIS code of `token`, uncapped.
pub fn nysiis(token: &str) -> Result<String, CodecError> {
    nysiis_with_limit(token, None)
}

/// NYSIIS code truncated to `max_len` characters when a limit is given
/// (the classic limit is 6).
pub fn nysiis_with_limit(token: &str, max_len: Option<usize>) -> Result<String, CodecError> {
    let folded = fold_ascii_letters(token);
    if folded.is_empty() {
        return Err(CodecError::NonAlphabeticToken(token.to_string()));
    }
    let mut s = folded.into_bytes();

    // Prefix rewrites.
    if s.starts_with(b"MAC") {
        s[1] = b'C';
    } else if s.starts_with(b"KN") {
        s.remove(0);
    } else if s.starts_with(b"K") {
        s[0] = b'C';
    } else if s.starts_with(b"PH") || s.starts_with(b"PF") {
        s[0] = b'F';
        s[1] = b'F';
    } else if s.starts_with(b"SCH") {
        s[1] = b'S';
        s[2] = b'S';
    }

    // Suffix rewrites.
    if s.ends_with(b"IE") || s.ends_with(b"EE") {
        s.truncate(s.len() - 2);
        s.push(b'Y');
    } else if [&b"DT"[..], b"RT", b"RD", b"NT", b"ND"]
        .iter()
        .any(|suffix| s.ends_with(suffix))
    {
        s.truncate(s.len() - 2);
        s.push(b'D');
    }

    let len = s.len();
    let mut key = vec![s[0]];
    let mut i = 1;
    while i < len {
        let c = s[i];
        let next = s.get(i + 1).copied();
        let prev = s[i - 1];
        let mut scratch = [0u8; 1];
        let chunk: &[u8] = if c == b'E' && next == Some(b'V') {
            i += 1;
            b"AF"
        } else if is_vowel(c) {
            b"A"
        } else if c == b'Q' {
            b"G"
        } else if c == b'Z' {
            b"S"
        } else if c == b'M' {
            b"N"
        } else if c == b'K' {
            if next == Some(b'N') {
                b"N"
            } else {
                b"C"
            }
        } else if c == b'S' && s.get(i + 1..i + 3) == Some(b"CH") {
            i += 2;
            b"SS"
        } else if c == b'P' && next == Some(b'H') {
            i += 1;
            b"F"
        } else if c == b'H' && (!is_vowel(prev) || next.is_none_or(|n| !is_vowel(n))) {
            if is_vowel(prev) {
                b"A"
            } else {
                scratch[0] = prev;
                &scratch
            }
        } else if c == b'W' && is_vowel(prev) {
            scratch[0] = prev;
            &scratch
        } else {
            scratch[0] = c;
            &scratch
        };
        if chunk.last() != key.last() {
            key.extend_from_slice(chunk);
        }
        i += 1;
    }

    if key.ends_with(b"S") && key.len() > 1 {
        key.pop();
    }
    if key.ends_with(b"AY") {
        key.truncate(key.len() - 2);
        key.push(b'Y');
    }
    if key.ends_with(b"A") && key.len() > 1 {
        key.pop();
    }
    if let Some(max) = max_len {
        key.truncate(max.max(1));
    }
    Ok(String::from_utf8(key).expect("ascii"))
}
