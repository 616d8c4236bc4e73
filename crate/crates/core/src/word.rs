//! Input strings over an alphabet of (possibly multi-character) symbols.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::multiset::Symbol;

/// Parses an input string against `alphabet`.
///
/// `""` and `λ` denote the empty string. Whitespace-separated text is read
/// token by token; otherwise the text is split by longest match against the
/// alphabet's symbol names.
pub fn parse_word(text: &str, alphabet: &BTreeSet<Symbol>) -> Result<Vec<Symbol>> {
    let text = text.trim();
    if text.is_empty() || text == "λ" {
        return Ok(Vec::new());
    }
    if text.contains(char::is_whitespace) {
        return text
            .split_whitespace()
            .map(|tok| {
                let sym = Symbol::parse_token(tok)?;
                if alphabet.contains(&sym) {
                    Ok(sym)
                } else {
                    Err(Error::InputSymbol(sym))
                }
            })
            .collect();
    }
    split_longest(text, alphabet.iter()).map_err(|rest| match Symbol::parse_token(rest) {
        Ok(sym) => Error::InputSymbol(sym),
        Err(_) => Error::parse(1, text.len() - rest.len() + 1, format!("no symbol matches `{rest}`")),
    })
}

/// Greedy longest-match segmentation of `text` into `symbols`. On failure
/// returns the unmatched suffix.
pub(crate) fn split_longest<'a, 't>(
    text: &'t str,
    symbols: impl IntoIterator<Item = &'a Symbol>,
) -> std::result::Result<Vec<Symbol>, &'t str> {
    let mut names: Vec<(&str, &Symbol)> = symbols
        .into_iter()
        .filter(|s| !s.is_hat())
        .map(|s| (s.name(), s))
        .collect();
    names.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.0.cmp(b.0)));
    let mut rest = text;
    let mut out = Vec::new();
    while !rest.is_empty() {
        match names.iter().find(|(n, _)| rest.starts_with(n)) {
            Some((n, s)) => {
                out.push((*s).clone());
                rest = &rest[n.len()..];
            }
            None => return Err(rest),
        }
    }
    Ok(out)
}

/// Renders a word: `λ` when empty, concatenated when every symbol is a
/// single character, space-separated otherwise.
pub fn format_word(word: &[Symbol]) -> String {
    if word.is_empty() {
        return "λ".to_string();
    }
    let compact = word
        .iter()
        .all(|s| !s.is_hat() && s.name().chars().count() == 1);
    let parts: Vec<String> = word.iter().map(ToString::to_string).collect();
    parts.join(if compact { "" } else { " " })
}

/// All words over `alphabet` of length at most `max_len`, shortest first and
/// lexicographically within each length.
pub fn words_up_to(alphabet: &BTreeSet<Symbol>, max_len: usize) -> Vec<Vec<Symbol>> {
    let letters: Vec<&Symbol> = alphabet.iter().collect();
    let mut out = vec![Vec::new()];
    let mut layer: Vec<Vec<Symbol>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * letters.len());
        for w in &layer {
            for &l in &letters {
                let mut v = w.clone();
                v.push(l.clone());
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}
