//! Word syntax shared by every backend: generator names with optional
//! integer exponents, e.g. `ab^-1a^2` or `x1.x2^3`.

use crate::error::{Error, Result};

/// Letter `2i` is generator `i`, letter `2i + 1` its formal inverse.
pub type Letter = usize;

pub fn letter(generator: usize, inverse: bool) -> Letter {
    2 * generator + usize::from(inverse)
}

pub fn letter_generator(l: Letter) -> usize {
    l / 2
}

pub fn letter_is_inverse(l: Letter) -> bool {
    l % 2 == 1
}

pub fn inverse_letter(l: Letter) -> Letter {
    l ^ 1
}

pub fn validate_generator_names(names: &[String]) -> Result<()> {
    for (i, name) in names.iter().enumerate() {
        let mut chars = name.chars();
        let ok_first = chars.next().is_some_and(|c| c.is_ascii_lowercase());
        let ok_rest = chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_');
        if !ok_first || !ok_rest {
            return Err(Error::invalid(format!(
                "generator name `{name}` must match [a-z][a-z0-9_]*"
            )));
        }
        if name == "e" {
            return Err(Error::invalid(
                "generator name `e` is reserved for the identity",
            ));
        }
        if names[..i].contains(name) {
            return Err(Error::invalid(format!("duplicate generator name `{name}`")));
        }
    }
    Ok(())
}

/// Parses a word into `(generator, exponent)` syllables.
pub fn parse_word(names: &[String], input: &str) -> Result<Vec<(usize, i64)>> {
    let bytes = input.as_bytes();
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        let c = bytes[pos];
        if c.is_ascii_whitespace() || c == b'.' || c == b'*' {
            pos += 1;
            continue;
        }
        let rest = &input[pos..];
        let matched = names
            .iter()
            .enumerate()
            .filter(|(_, n)| rest.starts_with(n.as_str()))
            .max_by_key(|(_, n)| n.len());
        let (gen, len) = match matched {
            Some((i, n)) => (Some(i), n.len()),
            None if rest.starts_with('e') || rest.starts_with('1') => (None, 1),
            None => {
                return Err(Error::invalid(format!(
                    "cannot parse `{input}`: unexpected `{}` at offset {pos}",
                    &rest[..rest.chars().next().map_or(0, char::len_utf8)]
                )))
            }
        };
        pos += len;
        let mut exp = 1i64;
        if pos < bytes.len() && bytes[pos] == b'^' {
            pos += 1;
            let start = pos;
            if pos < bytes.len() && (bytes[pos] == b'-' || bytes[pos] == b'+') {
                pos += 1;
            }
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            exp = input[start..pos].parse().map_err(|_| {
                Error::invalid(format!("bad exponent in `{input}` at offset {start}"))
            })?;
        }
        if let Some(g) = gen {
            if exp != 0 {
                out.push((g, exp));
            }
        }
    }
    Ok(out)
}

/// Formats a letter sequence with run-length exponents.
pub fn format_letters(names: &[String], letters: &[Letter]) -> String {
    let mut syllables: Vec<(usize, i64)> = Vec::new();
    for &l in letters {
        let g = letter_generator(l);
        let step = if letter_is_inverse(l) { -1 } else { 1 };
        match syllables.last_mut() {
            Some((last, e)) if *last == g && e.signum() == step => *e += step,
            _ => syllables.push((g, step)),
        }
    }
    format_syllables(names, &syllables)
}

pub fn format_syllables(names: &[String], syllables: &[(usize, i64)]) -> String {
    if syllables.is_empty() {
        return "e".to_string();
    }
    let sep = if names.iter().all(|n| n.len() == 1) {
        ""
    } else {
        "."
    };
    syllables
        .iter()
        .map(|&(g, e)| {
            if e == 1 {
                names[g].clone()
            } else {
                format!("{}^{}", names[g], e)
            }
        })
        .collect::<Vec<_>>()
        .join(sep)
}
