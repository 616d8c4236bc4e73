//! Line-oriented text formats for reaction automata (`.ra`) and restricted
//! stack machines (`.sm`).
//!
//! ```text
//! background: a a' b f p0 p1
//! input: a b
//! initial: p0
//! final: f
//! a1: a p0 | b | a' p0
//! ```
//!
//! ```text
//! states: p0 f
//! input: a
//! stack1: X0 A
//! stack2: Y0
//! initial: p0 X0 Y0
//! final: f
//! r1: p0, a, X0, Y0 -> f, A X0, Y0
//! ```

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::multiset::{parse_multiset_at, tokens_with_columns, Symbol};
use crate::reactions::{Reaction, ReactionAutomaton};
use crate::stackmachine::{Rule, StackMachine};

/// A parsed `.ra` file. `origin: compiled` marks automata produced by the
/// stack-machine compiler, which need larger weight budgets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RaDocument {
    pub automaton: ReactionAutomaton,
    pub origin: Option<String>,
}

impl RaDocument {
    pub fn is_compiled(&self) -> bool {
        self.origin.as_deref() == Some("compiled")
    }
}

struct Line<'a> {
    number: usize,
    key: &'a str,
    key_col: usize,
    rest: &'a str,
    rest_col: usize,
}

/// Strips comments and blank lines and splits `key: rest`.
fn lines(text: &str) -> Result<Vec<Line<'_>>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let number = i + 1;
        let body = match raw.find('#') {
            Some(j) => &raw[..j],
            None => raw,
        };
        if body.trim().is_empty() {
            continue;
        }
        let Some(colon) = body.find(':') else {
            let col = char_col(body, body.len() - body.trim_start().len());
            return Err(Error::parse(number, col, "expected `name: ...`"));
        };
        let key_raw = &body[..colon];
        let key = key_raw.trim();
        if key.is_empty() {
            return Err(Error::parse(number, char_col(body, colon), "missing name before `:`"));
        }
        out.push(Line {
            number,
            key,
            key_col: char_col(body, key_raw.len() - key_raw.trim_start().len()),
            rest: &body[colon + 1..],
            rest_col: char_col(body, colon + 1),
        });
    }
    Ok(out)
}

/// 1-based character column of byte offset `byte` in `s`.
fn char_col(s: &str, byte: usize) -> usize {
    s[..byte].chars().count() + 1
}

fn symbols_at(text: &str, line: usize, column: usize) -> Result<Vec<Symbol>> {
    let tokens = tokens_with_columns(text);
    if tokens.len() == 1 && tokens[0].1 == "-" {
        return Ok(Vec::new());
    }
    tokens
        .into_iter()
        .map(|(c, tok)| {
            Symbol::parse_token(tok).map_err(|e| Error::parse(line, column + c, e.to_string()))
        })
        .collect()
}

fn names_at(text: &str, line: usize, column: usize) -> Result<Vec<String>> {
    Ok(symbols_at(text, line, column)?
        .into_iter()
        .map(|s| s.to_string())
        .collect())
}

/// Records a header, rejecting repeats.
fn header<'a>(
    seen: &mut BTreeMap<&'a str, (usize, &'a str, usize)>,
    l: &Line<'a>,
) -> Result<()> {
    if seen.insert(l.key, (l.number, l.rest, l.rest_col)).is_some() {
        return Err(Error::parse(l.number, l.key_col, format!("duplicate `{}:` declaration", l.key)));
    }
    Ok(())
}

/// A missing declaration is reported at the end of the file.
fn required<'a>(
    seen: &BTreeMap<&'a str, (usize, &'a str, usize)>,
    key: &str,
    eof: usize,
) -> Result<(usize, &'a str, usize)> {
    seen.get(key)
        .copied()
        .ok_or_else(|| Error::parse(eof, 1, format!("missing `{key}:` declaration")))
}

const RA_HEADERS: [&str; 5] = ["background", "input", "initial", "final", "origin"];

pub fn parse_ra(text: &str) -> Result<ReactionAutomaton> {
    Ok(parse_ra_document(text)?.automaton)
}

pub fn parse_ra_document(text: &str) -> Result<RaDocument> {
    let eof = text.lines().count() + 1;
    let mut headers = BTreeMap::new();
    let mut reactions = Vec::new();
    let mut reaction_lines: BTreeMap<String, usize> = BTreeMap::new();
    for l in lines(text)? {
        if !l.rest.contains('|') && RA_HEADERS.contains(&l.key) {
            header(&mut headers, &l)?;
            continue;
        }
        let parts: Vec<&str> = l.rest.split('|').collect();
        if parts.len() != 3 {
            return Err(Error::parse(
                l.number,
                l.rest_col,
                if RA_HEADERS.contains(&l.key) || l.rest.contains('|') {
                    "expected `label: reactant | inhibitor | product`".to_string()
                } else {
                    format!("unknown declaration `{}:`", l.key)
                },
            ));
        }
        let mut col = l.rest_col;
        let mut cols = [0; 3];
        for (i, p) in parts.iter().enumerate() {
            cols[i] = col;
            col += p.chars().count() + 1;
        }
        let inhibitor = symbols_at(parts[1], l.number, cols[1])?;
        reactions.push(Reaction {
            label: l.key.to_string(),
            reactant: parse_multiset_at(parts[0], l.number, cols[0])?,
            inhibitor: inhibitor.into_iter().collect(),
            product: parse_multiset_at(parts[2], l.number, cols[2])?,
        });
        reaction_lines.entry(l.key.to_string()).or_insert(l.number);
    }

    let (bg_line, bg, bg_col) = required(&headers, "background", eof)?;
    let background = symbols_at(bg, bg_line, bg_col)?;
    let (in_line, inp, in_col) = required(&headers, "input", eof)?;
    let input = symbols_at(inp, in_line, in_col)?;
    let (init_line, init, init_col) = required(&headers, "initial", eof)?;
    let initial = parse_multiset_at(init, init_line, init_col)?;
    let (fin_line, fin, fin_col) = required(&headers, "final", eof)?;
    let final_symbol = match symbols_at(fin, fin_line, fin_col)?.as_slice() {
        [f] => f.clone(),
        _ => return Err(Error::parse(fin_line, fin_col, "expected exactly one final symbol")),
    };
    let origin = headers.get("origin").map(|(_, o, _)| o.trim().to_string());

    let automaton = ReactionAutomaton::from_parts(background, input, reactions, initial, final_symbol);
    let diags = automaton.validate();
    if !diags.is_empty() {
        let line_of = |subject: &str| -> Option<usize> {
            match subject.strip_prefix("reaction ") {
                Some(label) => reaction_lines.get(label).copied(),
                None => headers.get(subject).map(|h| h.0),
            }
        };
        return Err(Error::Invalid(
            diags
                .iter()
                .map(|d| match line_of(&d.subject) {
                    Some(n) => format!("line {n}: {d}"),
                    None => d.to_string(),
                })
                .collect(),
        ));
    }
    Ok(RaDocument { automaton, origin })
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items
        .into_iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn decl(key: &str, value: &str) -> String {
    if value.is_empty() {
        format!("{key}:\n")
    } else {
        format!("{key}: {value}\n")
    }
}

/// Canonical text: headers in fixed order, symbols sorted, reactions sorted
/// by label.
pub fn format_ra(ra: &ReactionAutomaton) -> String {
    let mut out = String::new();
    out += &decl("background", &join(ra.background()));
    out += &decl("input", &join(ra.input_alphabet()));
    out += &decl("initial", &ra.initial().to_string());
    out += &decl("final", &ra.final_symbol().to_string());
    for r in ra.reactions() {
        let inhibitor = if r.inhibitor.is_empty() {
            "-".to_string()
        } else {
            join(&r.inhibitor)
        };
        out += &format!("{}: {} | {} | {}\n", r.label, r.reactant, inhibitor, r.product);
    }
    out
}

pub fn format_ra_document(doc: &RaDocument) -> String {
    match &doc.origin {
        Some(o) => format!("origin: {o}\n{}", format_ra(&doc.automaton)),
        None => format_ra(&doc.automaton),
    }
}

/// Parses a `.sm` file. Stack headers are `stack1:`, `stack2:`, …; the
/// `initial:` line lists the initial state followed by one bottom symbol per
/// stack. A replacement string is `λ` (or `-`) for the empty string, a
/// space-separated list, or a compact string split by longest match against
/// the stack's alphabet.
pub fn parse_sm(text: &str) -> Result<StackMachine> {
    let eof = text.lines().count() + 1;
    let mut headers = BTreeMap::new();
    let mut rule_lines = Vec::new();
    for l in lines(text)? {
        let is_header = ["states", "input", "initial", "final"].contains(&l.key)
            || stack_index(l.key).is_some();
        if is_header && !l.rest.contains("->") {
            header(&mut headers, &l)?;
        } else {
            rule_lines.push(l);
        }
    }
    let (n, t, c) = required(&headers, "states", eof)?;
    let states: BTreeSet<String> = names_at(t, n, c)?.into_iter().collect();
    let (n, t, c) = required(&headers, "input", eof)?;
    let input: BTreeSet<Symbol> = symbols_at(t, n, c)?.into_iter().collect();

    let mut stacks: BTreeMap<usize, BTreeSet<String>> = BTreeMap::new();
    for (key, (n, t, c)) in &headers {
        if let Some(i) = stack_index(key) {
            stacks.insert(i, names_at(t, *n, *c)?.into_iter().collect());
        }
    }
    let k = stacks.len();
    if stacks.keys().copied().ne(1..=k) {
        return Err(Error::parse(eof, 1, "stack declarations must be numbered stack1, stack2, …"));
    }
    let stack_alphabets: Vec<BTreeSet<String>> = stacks.into_values().collect();

    let (n, t, c) = required(&headers, "initial", eof)?;
    let mut init = names_at(t, n, c)?;
    if init.len() != k + 1 {
        return Err(Error::parse(n, c, format!("expected an initial state and {k} bottom symbols")));
    }
    let bottoms = init.split_off(1);
    let initial_state = init.pop().expect("one state");
    let (n, t, c) = required(&headers, "final", eof)?;
    let final_state = match names_at(t, n, c)?.as_slice() {
        [f] => f.clone(),
        _ => return Err(Error::parse(n, c, "expected exactly one final state")),
    };

    let mut rules = Vec::new();
    for l in rule_lines {
        rules.push(parse_rule(&l, &stack_alphabets)?);
    }
    Ok(StackMachine {
        states,
        input,
        stack_alphabets,
        rules,
        initial_state,
        bottoms,
        final_state,
    })
}

fn stack_index(key: &str) -> Option<usize> {
    key.strip_prefix("stack")?.parse().ok().filter(|&i| i >= 1)
}

/// Comma-separated fields with their starting columns.
fn fields(text: &str, column: usize) -> Vec<(&str, usize)> {
    let mut out = Vec::new();
    let mut col = column;
    for part in text.split(',') {
        let lead = part.len() - part.trim_start().len();
        out.push((part.trim(), col + part[..lead].chars().count()));
        col += part.chars().count() + 1;
    }
    out
}

fn parse_rule(l: &Line<'_>, alphabets: &[BTreeSet<String>]) -> Result<Rule> {
    let k = alphabets.len();
    let Some(arrow) = l.rest.find("->") else {
        return Err(Error::parse(l.number, l.rest_col, "expected `state, input, tops -> state, pushes`"));
    };
    let lhs = fields(&l.rest[..arrow], l.rest_col);
    let rhs = fields(&l.rest[arrow + 2..], l.rest_col + char_col(l.rest, arrow + 2) - 1);
    if lhs.len() != k + 2 {
        return Err(Error::parse(l.number, l.rest_col, format!("expected state, input and {k} stack tops before `->`")));
    }
    if rhs.len() != k + 1 {
        return Err(Error::parse(l.number, rhs[0].1, format!("expected state and {k} replacement strings after `->`")));
    }
    let single = |(text, col): (&str, usize)| -> Result<String> {
        match names_at(text, l.number, col)?.as_slice() {
            [one] => Ok(one.clone()),
            _ => Err(Error::parse(l.number, col, "expected a single name")),
        }
    };
    let input = match lhs[1].0 {
        "λ" | "-" => None,
        text => Some(
            Symbol::parse_token(text).map_err(|e| Error::parse(l.number, lhs[1].1, e.to_string()))?,
        ),
    };
    let mut replace = Vec::with_capacity(k);
    for (i, &(text, col)) in rhs[1..].iter().enumerate() {
        replace.push(parse_replacement(text, &alphabets[i]).ok_or_else(|| {
            Error::parse(l.number, col, format!("cannot read `{text}` over stack alphabet {}", i + 1))
        })?);
    }
    Ok(Rule {
        label: l.key.to_string(),
        from: single(lhs[0])?,
        input,
        tops: lhs[2..].iter().map(|&f| single(f)).collect::<Result<_>>()?,
        to: single(rhs[0])?,
        replace,
    })
}

fn parse_replacement(text: &str, alphabet: &BTreeSet<String>) -> Option<Vec<String>> {
    match text {
        "" => None,
        "λ" | "-" => Some(Vec::new()),
        t if t.contains(char::is_whitespace) => {
            Some(t.split_whitespace().map(str::to_string).collect())
        }
        t => {
            let mut names: Vec<&str> = alphabet.iter().map(String::as_str).collect();
            names.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
            let mut rest = t;
            let mut out = Vec::new();
            while !rest.is_empty() {
                match names.iter().find(|n| rest.starts_with(*n)) {
                    Some(n) => {
                        out.push(n.to_string());
                        rest = &rest[n.len()..];
                    }
                    // An undeclared symbol; keep it whole and let validation report it.
                    None if out.is_empty() => return Some(vec![t.to_string()]),
                    None => return None,
                }
            }
            Some(out)
        }
    }
}

pub fn format_sm(m: &StackMachine) -> String {
    let mut out = String::new();
    out += &decl("states", &join(&m.states));
    out += &decl("input", &join(&m.input));
    for (i, g) in m.stack_alphabets.iter().enumerate() {
        out += &decl(&format!("stack{}", i + 1), &join(g));
    }
    out += &decl(
        "initial",
        &join(std::iter::once(&m.initial_state).chain(&m.bottoms)),
    );
    out += &decl("final", &m.final_state);
    for r in &m.rules {
        let input = r.input.as_ref().map_or("λ".to_string(), ToString::to_string);
        let pushes: Vec<String> = r
            .replace
            .iter()
            .map(|s| if s.is_empty() { "λ".to_string() } else { s.join(" ") })
            .collect();
        out += &format!(
            "{}: {}, {}, {} -> {}, {}\n",
            r.label,
            r.from,
            input,
            r.tops.join(", "),
            r.to,
            pushes.join(", ")
        );
    }
    out
}

/// Convenience used by the CLI and tests: parse a `.ra` document from a file.
pub fn read_ra(path: &std::path::Path) -> Result<RaDocument> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Usage(format!("cannot read {}: {e}", path.display())))?;
    parse_ra_document(&text)
}

pub fn read_sm(path: &std::path::Path) -> Result<StackMachine> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Usage(format!("cannot read {}: {e}", path.display())))?;
    parse_sm(&text)
}
