//! Finite multisets over a symbol alphabet.
//!
//! A [`Multiset`] stores only positive multiplicities, so two multisets are
//! equal exactly when they agree on every symbol. All arithmetic is checked:
//! multiplicities are `u64` and overflow is reported, never wrapped.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Characters that have a meaning in the surface syntax and therefore cannot
/// appear inside a symbol name.
const RESERVED: &[char] = &['^', '#', '|', ',', ':', '[', ']', '"', ';'];

/// A symbol of a background set, either plain (`a`) or hat-decorated (`a^`).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    name: Arc<str>,
    hat: bool,
}

impl Symbol {
    /// Plain symbol. Panics on an invalid name; use [`Symbol::try_new`] for
    /// untrusted input.
    pub fn new(name: &str) -> Self {
        Self::try_new(name).unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn try_new(name: &str) -> Result<Self> {
        validate_name(name).map_err(|m| Error::parse(1, 1, m))?;
        Ok(Symbol {
            name: Arc::from(name),
            hat: false,
        })
    }

    pub fn hatted(name: &str) -> Self {
        Self::new(name).hat()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_hat(&self) -> bool {
        self.hat
    }

    /// The hat-decorated counterpart (idempotent).
    pub fn hat(&self) -> Self {
        Symbol {
            name: self.name.clone(),
            hat: true,
        }
    }

    /// The plain counterpart (idempotent).
    pub fn plain(&self) -> Self {
        Symbol {
            name: self.name.clone(),
            hat: false,
        }
    }

    /// Parses a single symbol token: `name` or `name^`.
    pub fn parse_token(token: &str) -> Result<Self> {
        let (name, hat) = match token.strip_suffix('^') {
            Some(stripped) => (stripped, true),
            None => (token, false),
        };
        let sym = Symbol::try_new(name)?;
        Ok(if hat { sym.hat() } else { sym })
    }
}

pub(crate) fn validate_name(name: &str) -> std::result::Result<(), String> {
    if name.is_empty() {
        return Err("empty symbol name".into());
    }
    if name == "-" || name == "λ" {
        return Err(format!("`{name}` is reserved and cannot name a symbol"));
    }
    if let Some(c) = name
        .chars()
        .find(|c| c.is_whitespace() || c.is_control() || RESERVED.contains(c))
    {
        return Err(format!("invalid character {c:?} in symbol name `{name}`"));
    }
    Ok(())
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if self.hat {
            f.write_str("^")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Symbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Symbol::parse_token(s)
    }
}

/// A finite multiset; the empty multiset is `μ_λ` and formats as `-`.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Multiset {
    counts: BTreeMap<Symbol, u64>,
}

impl Multiset {
    pub fn new() -> Self {
        Self::default()
    }

    /// The multiset containing one copy of `sym`.
    pub fn singleton(sym: Symbol) -> Self {
        let mut m = Self::new();
        m.counts.insert(sym, 1);
        m
    }

    /// Multiset of the symbols of `set`, each with multiplicity one.
    pub fn from_set<'a>(set: impl IntoIterator<Item = &'a Symbol>) -> Self {
        Multiset {
            counts: set.into_iter().map(|s| (s.clone(), 1)).collect(),
        }
    }

    /// Builds a multiset from `(symbol, count)` pairs, accumulating repeats.
    pub fn from_counts(pairs: impl IntoIterator<Item = (Symbol, u64)>) -> Result<Self> {
        let mut m = Self::new();
        for (sym, n) in pairs {
            m.add(&sym, n)?;
        }
        Ok(m)
    }

    pub fn count(&self, sym: &Symbol) -> u64 {
        self.counts.get(sym).copied().unwrap_or(0)
    }

    pub fn contains(&self, sym: &Symbol) -> bool {
        self.counts.contains_key(sym)
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Number of distinct symbols with positive multiplicity.
    pub fn support_len(&self) -> usize {
        self.counts.len()
    }

    pub fn support(&self) -> impl Iterator<Item = &Symbol> {
        self.counts.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, u64)> {
        self.counts.iter().map(|(s, &n)| (s, n))
    }

    /// Total multiplicity |μ|, saturating at `u64::MAX`.
    pub fn weight(&self) -> u64 {
        self.counts
            .values()
            .fold(0u64, |acc, &n| acc.saturating_add(n))
    }

    /// Adds `n` copies of `sym` in place.
    pub fn add(&mut self, sym: &Symbol, n: u64) -> Result<()> {
        if n == 0 {
            return Ok(());
        }
        let slot = self.counts.entry(sym.clone()).or_insert(0);
        *slot = slot
            .checked_add(n)
            .ok_or_else(|| Error::Overflow(sym.to_string()))?;
        Ok(())
    }

    /// `self ⊆ other`: every multiplicity in `self` is at most the one in `other`.
    pub fn included_in(&self, other: &Multiset) -> bool {
        if self.counts.len() > other.counts.len() {
            return false;
        }
        self.counts.iter().all(|(s, &n)| other.count(s) >= n)
    }

    /// True when the supports are disjoint.
    pub fn disjoint_from(&self, other: &Multiset) -> bool {
        let (small, large) = if self.counts.len() <= other.counts.len() {
            (self, other)
        } else {
            (other, self)
        };
        small.counts.keys().all(|s| !large.contains(s))
    }

    /// Pointwise sum.
    pub fn sum(&self, other: &Multiset) -> Result<Multiset> {
        let mut out = self.clone();
        out.add_all(other)?;
        Ok(out)
    }

    /// In-place pointwise sum.
    pub fn add_all(&mut self, other: &Multiset) -> Result<()> {
        for (s, n) in other.iter() {
            self.add(s, n)?;
        }
        Ok(())
    }

    /// Pointwise minimum.
    pub fn intersect(&self, other: &Multiset) -> Multiset {
        let counts = self
            .counts
            .iter()
            .filter_map(|(s, &n)| {
                let m = n.min(other.count(s));
                (m > 0).then(|| (s.clone(), m))
            })
            .collect();
        Multiset { counts }
    }

    /// Pointwise difference; defined only when `other ⊆ self`.
    pub fn subtract(&self, other: &Multiset) -> Result<Multiset> {
        let mut out = self.clone();
        out.remove_all(other)?;
        Ok(out)
    }

    /// In-place difference. On underflow `self` is left unchanged.
    pub fn remove_all(&mut self, other: &Multiset) -> Result<()> {
        if !other.included_in(self) {
            return Err(Error::Underflow {
                minuend: self.to_string(),
                subtrahend: other.to_string(),
            });
        }
        for (s, n) in other.iter() {
            let slot = self.counts.get_mut(s).expect("checked by inclusion");
            *slot -= n;
            if *slot == 0 {
                self.counts.remove(s);
            }
        }
        Ok(())
    }

    /// `μ^n`: every multiplicity multiplied by `n`.
    pub fn scale(&self, n: u64) -> Result<Multiset> {
        if n == 0 {
            return Ok(Multiset::new());
        }
        let mut counts = BTreeMap::new();
        for (s, &c) in &self.counts {
            let m = c
                .checked_mul(n)
                .ok_or_else(|| Error::Overflow(s.to_string()))?;
            counts.insert(s.clone(), m);
        }
        Ok(Multiset { counts })
    }

    /// The same multiset with every symbol hat-decorated.
    pub fn hatted(&self) -> Multiset {
        Multiset {
            counts: self.counts.iter().map(|(s, &n)| (s.hat(), n)).collect(),
        }
    }

    /// Canonical surface form, `-` for the empty multiset.
    pub fn format(&self) -> String {
        self.to_string()
    }

    /// Parses the surface grammar: whitespace-separated `sym` / `sym^k`
    /// items (k ≥ 1), `-` for the empty multiset, `#` starts a comment.
    pub fn parse(text: &str) -> Result<Multiset> {
        parse_multiset_at(text, 1, 1)
    }
}

/// Parses a multiset whose text starts at (`line`, `column`) of some larger
/// document, so that errors point into that document.
pub(crate) fn parse_multiset_at(text: &str, line: usize, column: usize) -> Result<Multiset> {
    let body = match text.find('#') {
        Some(i) => &text[..i],
        None => text,
    };
    let tokens = tokens_with_columns(body);
    if tokens.len() == 1 && tokens[0].1 == "-" {
        return Ok(Multiset::new());
    }
    let mut m = Multiset::new();
    for (col, tok) in tokens {
        let at = column + col;
        if tok == "-" {
            return Err(Error::parse(
                line,
                at,
                "`-` denotes the empty multiset and must stand alone",
            ));
        }
        let (sym, n) = parse_item(tok).map_err(|msg| Error::parse(line, at, msg))?;
        m.add(&sym, n)
            .map_err(|_| Error::parse(line, at, format!("multiplicity overflow for {sym}")))?;
    }
    Ok(m)
}

fn parse_item(tok: &str) -> std::result::Result<(Symbol, u64), String> {
    let (head, count) = match tok.rfind('^') {
        Some(i) if i + 1 < tok.len() && tok[i + 1..].bytes().all(|b| b.is_ascii_digit()) => {
            let n: u64 = tok[i + 1..]
                .parse()
                .map_err(|_| format!("multiplicity out of range in `{tok}`"))?;
            if n == 0 {
                return Err(format!("zero multiplicity in `{tok}`"));
            }
            (&tok[..i], n)
        }
        _ => (tok, 1),
    };
    let (name, hat) = match head.strip_suffix('^') {
        Some(stripped) => (stripped, true),
        None => (head, false),
    };
    validate_name(name)?;
    let sym = Symbol::new(name);
    Ok((if hat { sym.hat() } else { sym }, count))
}

/// Splits on whitespace, returning 0-based character columns with each token.
pub(crate) fn tokens_with_columns(text: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    for (ci, (bi, c)) in text.char_indices().enumerate() {
        match (c.is_whitespace(), start) {
            (true, Some((sc, sb))) => {
                out.push((sc, &text[sb..bi]));
                start = None;
            }
            (false, None) => start = Some((ci, bi)),
            _ => {}
        }
    }
    if let Some((sc, sb)) = start {
        out.push((sc, &text[sb..]));
    }
    out
}

impl fmt::Display for Multiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.counts.is_empty() {
            return f.write_str("-");
        }
        for (i, (s, &n)) in self.counts.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            if n == 1 {
                write!(f, "{s}")?;
            } else {
                write!(f, "{s}^{n}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Multiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

impl FromStr for Multiset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Multiset::parse(s)
    }
}

impl<'a> FromIterator<&'a Symbol> for Multiset {
    fn from_iter<I: IntoIterator<Item = &'a Symbol>>(iter: I) -> Self {
        let mut m = Multiset::new();
        for s in iter {
            m.add(s, 1).expect("one copy per item cannot overflow u64 in practice");
        }
        m
    }
}

/// String-to-multiset encoding: the i-th symbol (1-based) contributes
/// 2^(i-1) copies, so stacks are encoded positionally in base two.
pub fn stm(word: &[Symbol]) -> Result<Multiset> {
    let mut m = Multiset::new();
    for (i, sym) in word.iter().enumerate() {
        let copies = u32::try_from(i)
            .ok()
            .and_then(|e| 1u64.checked_shl(e))
            .ok_or_else(|| Error::Overflow(sym.to_string()))?;
        m.add(sym, copies)?;
    }
    Ok(m)
}
