//! Reactions, reaction multisets and the maximally parallel step relation.
//!
//! A reaction `(R, I, P)` is enabled on `T` when `R ⊆ T` and no inhibitor
//! symbol occurs in `T`. A bag (multiset) of reactions is enabled when its
//! aggregate reactant fits in `T` and none of its inhibitors occur, and it is
//! maximal when no single further reaction instance can be added. Because
//! enabledness is downward closed in the bag, the single-extension test is
//! equivalent to checking every proper superset.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::multiset::{validate_name, Multiset, Symbol};

/// Default cap on the number of bags explored by one En^p enumeration.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Reaction {
    pub label: String,
    pub reactant: Multiset,
    pub inhibitor: BTreeSet<Symbol>,
    pub product: Multiset,
}

impl Reaction {
    pub fn new(
        label: impl Into<String>,
        reactant: Multiset,
        inhibitor: impl IntoIterator<Item = Symbol>,
        product: Multiset,
    ) -> Self {
        Reaction {
            label: label.into(),
            reactant,
            inhibitor: inhibitor.into_iter().collect(),
            product,
        }
    }

    /// Shorthand for tests and fixtures: `Reaction::parse("a", "b^2", "a", "c")`.
    /// The inhibitor is a whitespace-separated symbol list (or `-`).
    pub fn parse(label: &str, reactant: &str, inhibitor: &str, product: &str) -> Result<Self> {
        Ok(Reaction {
            label: label.to_string(),
            reactant: reactant.parse()?,
            inhibitor: parse_symbol_set(inhibitor)?,
            product: product.parse()?,
        })
    }

    /// Enabled on `t` as a single instance.
    pub fn enabled_on(&self, t: &Multiset) -> bool {
        self.reactant.included_in(t) && self.inhibitor.iter().all(|s| !t.contains(s))
    }
}

pub(crate) fn parse_symbol_set(text: &str) -> Result<BTreeSet<Symbol>> {
    let text = text.trim();
    if text == "-" || text.is_empty() {
        return Ok(BTreeSet::new());
    }
    text.split_whitespace().map(Symbol::parse_token).collect()
}

/// A multiset of reactions, keyed by label.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReactionBag {
    counts: BTreeMap<String, u64>,
}

impl ReactionBag {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, u64)>) -> Self {
        let mut bag = Self::new();
        for (label, n) in pairs {
            bag.add(label, n);
        }
        bag
    }

    /// Parses `a^2 b` style text (same item grammar as multisets).
    pub fn parse(text: &str) -> Result<Self> {
        let m = Multiset::parse(text)?;
        let mut bag = Self::new();
        for (sym, n) in m.iter() {
            if sym.is_hat() {
                return Err(Error::parse(1, 1, format!("`{sym}` is not a reaction label")));
            }
            bag.add(sym.name(), n);
        }
        Ok(bag)
    }

    pub fn add(&mut self, label: &str, n: u64) {
        if n > 0 {
            *self.counts.entry(label.to_string()).or_insert(0) += n;
        }
    }

    pub fn get(&self, label: &str) -> u64 {
        self.counts.get(label).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.counts.iter().map(|(l, &n)| (l.as_str(), n))
    }

    pub fn weight(&self) -> u64 {
        self.counts.values().sum()
    }

    /// `self ⊆ other` as multisets of reactions.
    pub fn included_in(&self, other: &ReactionBag) -> bool {
        self.counts.iter().all(|(l, &n)| other.get(l) >= n)
    }
}

impl fmt::Display for ReactionBag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.counts.is_empty() {
            return f.write_str("-");
        }
        for (i, (l, &n)) in self.counts.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            if n == 1 {
                write!(f, "{l}")?;
            } else {
                write!(f, "{l}^{n}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ReactionBag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

/// A violated well-formedness condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub subject: String,
    pub message: String,
}

impl Diagnostic {
    pub(crate) fn new(subject: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic {
            subject: subject.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.subject, self.message)
    }
}

/// A reaction automaton `(S, Σ, A, D_0, f)`.
///
/// Reactions are kept sorted by label; that order drives enumeration.
#[derive(Clone, Debug)]
pub struct ReactionAutomaton {
    background: BTreeSet<Symbol>,
    input: BTreeSet<Symbol>,
    reactions: Vec<Reaction>,
    initial: Multiset,
    final_symbol: Symbol,
    index: CandidateIndex,
}

impl PartialEq for ReactionAutomaton {
    fn eq(&self, other: &Self) -> bool {
        self.background == other.background
            && self.input == other.input
            && self.reactions == other.reactions
            && self.initial == other.initial
            && self.final_symbol == other.final_symbol
    }
}

impl Eq for ReactionAutomaton {}

impl ReactionAutomaton {
    /// Builds and validates an automaton.
    pub fn new(
        background: impl IntoIterator<Item = Symbol>,
        input: impl IntoIterator<Item = Symbol>,
        reactions: Vec<Reaction>,
        initial: Multiset,
        final_symbol: Symbol,
    ) -> Result<Self> {
        let ra = Self::from_parts(background, input, reactions, initial, final_symbol);
        let diags = ra.validate();
        if diags.is_empty() {
            Ok(ra)
        } else {
            Err(Error::Invalid(diags.iter().map(ToString::to_string).collect()))
        }
    }

    /// Builds an automaton without checking the side conditions; see
    /// [`ReactionAutomaton::validate`].
    pub fn from_parts(
        background: impl IntoIterator<Item = Symbol>,
        input: impl IntoIterator<Item = Symbol>,
        mut reactions: Vec<Reaction>,
        initial: Multiset,
        final_symbol: Symbol,
    ) -> Self {
        reactions.sort_by(|a, b| a.label.cmp(&b.label));
        let index = CandidateIndex::build(&reactions);
        ReactionAutomaton {
            background: background.into_iter().collect(),
            input: input.into_iter().collect(),
            reactions,
            initial,
            final_symbol,
            index,
        }
    }

    pub fn background(&self) -> &BTreeSet<Symbol> {
        &self.background
    }

    pub fn input_alphabet(&self) -> &BTreeSet<Symbol> {
        &self.input
    }

    pub fn reactions(&self) -> &[Reaction] {
        &self.reactions
    }

    pub fn initial(&self) -> &Multiset {
        &self.initial
    }

    pub fn final_symbol(&self) -> &Symbol {
        &self.final_symbol
    }

    pub fn reaction(&self, label: &str) -> Option<&Reaction> {
        self.reactions
            .binary_search_by(|r| r.label.as_str().cmp(label))
            .ok()
            .map(|i| &self.reactions[i])
    }

    fn lookup(&self, label: &str) -> Result<&Reaction> {
        self.reaction(label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Every violated side condition; empty iff the automaton is well formed.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let outside = |m: &Multiset| -> Vec<String> {
            m.support()
                .filter(|s| !self.background.contains(s))
                .map(ToString::to_string)
                .collect()
        };
        for s in &self.input {
            if !self.background.contains(s) {
                out.push(Diagnostic::new(
                    "input",
                    format!("input symbol {s} is not in the background set"),
                ));
            }
        }
        if !self.background.contains(&self.final_symbol) {
            out.push(Diagnostic::new(
                "final",
                format!("final symbol {} is not in the background set", self.final_symbol),
            ));
        }
        let stray = outside(&self.initial);
        if !stray.is_empty() {
            out.push(Diagnostic::new(
                "initial",
                format!("symbol outside background: {}", stray.join(" ")),
            ));
        }
        let mut seen = HashSet::new();
        for r in &self.reactions {
            let subject = format!("reaction {}", r.label);
            if let Err(m) = validate_name(&r.label) {
                out.push(Diagnostic::new(&subject, format!("invalid label: {m}")));
            }
            if !seen.insert(r.label.as_str()) {
                out.push(Diagnostic::new(&subject, "duplicate label"));
            }
            if r.reactant.is_empty() {
                out.push(Diagnostic::new(&subject, "empty reactant"));
            }
            if r.inhibitor.iter().any(|s| r.reactant.contains(s)) {
                out.push(Diagnostic::new(&subject, "reactant intersects inhibitor"));
            }
            let mut stray = outside(&r.reactant);
            stray.extend(outside(&r.product));
            stray.extend(
                r.inhibitor
                    .iter()
                    .filter(|s| !self.background.contains(s))
                    .map(ToString::to_string),
            );
            if !stray.is_empty() {
                out.push(Diagnostic::new(
                    &subject,
                    format!("symbol outside background: {}", stray.join(" ")),
                ));
            }
        }
        out
    }

    /// No two distinct reactions share both reactant and inhibitor.
    pub fn is_deterministic(&self) -> bool {
        let mut seen = HashSet::new();
        self.reactions
            .iter()
            .all(|r| seen.insert((&r.reactant, &r.inhibitor)))
    }

    /// Aggregate reactant `R_α`.
    pub fn reactant_of(&self, bag: &ReactionBag) -> Result<Multiset> {
        let mut out = Multiset::new();
        for (label, n) in bag.iter() {
            out.add_all(&self.lookup(label)?.reactant.scale(n)?)?;
        }
        Ok(out)
    }

    /// Aggregate inhibitor `I_α`.
    pub fn inhibitor_of(&self, bag: &ReactionBag) -> Result<BTreeSet<Symbol>> {
        let mut out = BTreeSet::new();
        for (label, _) in bag.iter() {
            out.extend(self.lookup(label)?.inhibitor.iter().cloned());
        }
        Ok(out)
    }

    /// Aggregate product `P_α`.
    pub fn product_of(&self, bag: &ReactionBag) -> Result<Multiset> {
        let mut out = Multiset::new();
        for (label, n) in bag.iter() {
            out.add_all(&self.lookup(label)?.product.scale(n)?)?;
        }
        Ok(out)
    }

    /// `R_α ⊆ t` and `I_α ∩ t = ∅`.
    pub fn enabled(&self, bag: &ReactionBag, t: &Multiset) -> Result<bool> {
        let inhibited = self.inhibitor_of(bag)?.iter().any(|s| t.contains(s));
        Ok(!inhibited && self.reactant_of(bag)?.included_in(t))
    }

    /// Enabled, and no single additional reaction instance keeps it enabled.
    pub fn enabled_maximally(&self, bag: &ReactionBag, t: &Multiset) -> Result<bool> {
        if !self.enabled(bag, t)? {
            return Ok(false);
        }
        let remaining = t.subtract(&self.reactant_of(bag)?)?;
        Ok(!self.reactions.iter().any(|r| {
            r.inhibitor.iter().all(|s| !t.contains(s)) && r.reactant.included_in(&remaining)
        }))
    }

    /// Indices of reactions individually enabled on `t`, in label order.
    fn candidates(&self, t: &Multiset) -> Result<Vec<usize>> {
        if let Some(&i) = self.index.unbounded.first() {
            if self.reactions[i].enabled_on(t) {
                return Err(Error::Invalid(vec![format!(
                    "reaction {}: empty reactant makes the enabled set unbounded",
                    self.reactions[i].label
                )]));
            }
        }
        let mut out = Vec::new();
        for sym in t.support() {
            if let Some(list) = self.index.by_key.get(sym) {
                out.extend(
                    list.iter()
                        .copied()
                        .filter(|&i| self.reactions[i].enabled_on(t)),
                );
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    /// `En^p_A(t)`: every maximally enabled non-empty bag, in canonical order.
    pub fn enumerate_enp(&self, t: &Multiset, limit: usize) -> Result<Vec<ReactionBag>> {
        let mut bags: Vec<ReactionBag> = self
            .maximal_count_vectors(t, limit)?
            .into_iter()
            .map(|v| self.bag_from_counts(&v))
            .collect();
        bags.sort();
        Ok(bags)
    }

    /// One `(α, t − R_α + P_α)` pair per bag of `En^p_A(t)`.
    pub fn transitions(&self, t: &Multiset, limit: usize) -> Result<Vec<(ReactionBag, Multiset)>> {
        let mut out = Vec::new();
        for counts in self.maximal_count_vectors(t, limit)? {
            let mut next = t.clone();
            for &(i, n) in &counts {
                next.remove_all(&self.reactions[i].reactant.scale(n)?)?;
            }
            for &(i, n) in &counts {
                next.add_all(&self.reactions[i].product.scale(n)?)?;
            }
            out.push((self.bag_from_counts(&counts), next));
        }
        out.sort();
        Ok(out)
    }

    /// `Res_A(t)`, deduplicated and sorted; `{t}` when nothing is enabled.
    pub fn results(&self, t: &Multiset, limit: usize) -> Result<Vec<Multiset>> {
        let trans = self.transitions(t, limit)?;
        if trans.is_empty() {
            return Ok(vec![t.clone()]);
        }
        let set: BTreeSet<Multiset> = trans.into_iter().map(|(_, m)| m).collect();
        Ok(set.into_iter().collect())
    }

    fn bag_from_counts(&self, counts: &[(usize, u64)]) -> ReactionBag {
        let mut bag = ReactionBag::new();
        for &(i, n) in counts {
            bag.add(&self.reactions[i].label, n);
        }
        bag
    }

    /// Depth-first search over count vectors of the individually enabled
    /// reactions. Counts are tried from the largest feasible value down; a
    /// count below the cap is only tried when some later reaction competes
    /// for the same symbols, since otherwise the leftover capacity would make
    /// the bag non-maximal.
    fn maximal_count_vectors(&self, t: &Multiset, limit: usize) -> Result<Vec<Vec<(usize, u64)>>> {
        let cands = self.candidates(t)?;
        if cands.is_empty() {
            return Ok(Vec::new());
        }

        // Local dense encoding of the symbols the candidates consume.
        let mut slot: HashMap<&Symbol, usize> = HashMap::new();
        let mut remaining: Vec<u64> = Vec::new();
        let needs: Vec<Vec<(usize, u64)>> = cands
            .iter()
            .map(|&i| {
                self.reactions[i]
                    .reactant
                    .iter()
                    .map(|(s, n)| {
                        let j = *slot.entry(s).or_insert_with(|| {
                            remaining.push(t.count(s));
                            remaining.len() - 1
                        });
                        (j, n)
                    })
                    .collect()
            })
            .collect();
        let contested: Vec<bool> = (0..cands.len())
            .map(|i| {
                needs[i].iter().any(|&(j, _)| {
                    needs[i + 1..]
                        .iter()
                        .any(|later| later.iter().any(|&(k, _)| k == j))
                })
            })
            .collect();

        let mut search = Search {
            needs: &needs,
            contested: &contested,
            remaining,
            counts: vec![0; cands.len()],
            explored: 0,
            limit,
            found: Vec::new(),
        };
        search.descend(0)?;

        Ok(search
            .found
            .into_iter()
            .map(|v| {
                v.into_iter()
                    .enumerate()
                    .filter(|&(_, n)| n > 0)
                    .map(|(k, n)| (cands[k], n))
                    .collect()
            })
            .collect())
    }
}

struct Search<'a> {
    needs: &'a [Vec<(usize, u64)>],
    contested: &'a [bool],
    remaining: Vec<u64>,
    counts: Vec<u64>,
    explored: usize,
    limit: usize,
    found: Vec<Vec<u64>>,
}

impl Search<'_> {
    fn fits(&self, need: &[(usize, u64)], times: u64) -> bool {
        need.iter().all(|&(j, n)| self.remaining[j] >= n * times)
    }

    fn cap(&self, need: &[(usize, u64)]) -> u64 {
        need.iter()
            .map(|&(j, n)| self.remaining[j] / n)
            .min()
            .unwrap_or(0)
    }

    fn descend(&mut self, depth: usize) -> Result<()> {
        self.explored += 1;
        if self.explored > self.limit {
            return Err(Error::BudgetExceeded { limit: self.limit });
        }
        if depth == self.needs.len() {
            if self.needs.iter().all(|need| !self.fits(need, 1)) {
                self.found.push(self.counts.clone());
            }
            return Ok(());
        }
        let need = &self.needs[depth];
        let cap = self.cap(need);
        let lowest = if self.contested[depth] { 0 } else { cap };
        for k in (lowest..=cap).rev() {
            for &(j, n) in need {
                self.remaining[j] -= n * k;
            }
            self.counts[depth] = k;
            let outcome = self.descend(depth + 1);
            for &(j, n) in need {
                self.remaining[j] += n * k;
            }
            outcome?;
        }
        self.counts[depth] = 0;
        Ok(())
    }
}

/// Buckets reactions by one reactant symbol (the globally rarest one), so a
/// configuration only needs to look at reactions keyed by symbols it holds.
#[derive(Clone, Debug, Default)]
struct CandidateIndex {
    by_key: HashMap<Symbol, Vec<usize>>,
    unbounded: Vec<usize>,
}

impl CandidateIndex {
    fn build(reactions: &[Reaction]) -> Self {
        let mut freq: HashMap<&Symbol, usize> = HashMap::new();
        for r in reactions {
            for s in r.reactant.support() {
                *freq.entry(s).or_insert(0) += 1;
            }
        }
        let mut index = CandidateIndex::default();
        for (i, r) in reactions.iter().enumerate() {
            match r.reactant.support().min_by_key(|s| (freq[s], (*s).clone())) {
                Some(key) => index.by_key.entry(key.clone()).or_default().push(i),
                None => index.unbounded.push(i),
            }
        }
        index
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(s: &str) -> Multiset {
        s.parse().unwrap()
    }

    fn bag(s: &str) -> ReactionBag {
        ReactionBag::parse(s).unwrap()
    }

    fn example1() -> ReactionAutomaton {
        let syms = ["a", "b", "c", "d", "e"].map(Symbol::new);
        ReactionAutomaton::new(
            syms.clone(),
            [],
            vec![
                Reaction::parse("a", "b^2", "a", "c").unwrap(),
                Reaction::parse("b", "c^2", "-", "b").unwrap(),
                Reaction::parse("c", "b c", "d", "e").unwrap(),
            ],
            Multiset::new(),
            Symbol::new("e"),
        )
        .unwrap()
    }

    #[test]
    fn enabledness() {
        let ra = example1();
        let t = ms("b^4 c d");
        assert!(ra.enabled(&bag("a"), &t).unwrap());
        assert!(!ra.enabled(&bag("c"), &t).unwrap());
        assert!(ra.enabled(&ReactionBag::new(), &t).unwrap());
        assert!(matches!(
            ra.enabled(&bag("zz"), &t),
            Err(Error::UnknownLabel(_))
        ));
    }

    #[test]
    fn maximal_enabledness() {
        let ra = example1();
        assert!(ra.enabled_maximally(&bag("a^2"), &ms("b^4 c d")).unwrap());
        assert!(!ra.enabled_maximally(&bag("a"), &ms("b^4 c d")).unwrap());
        assert!(ra.enabled_maximally(&bag("a b"), &ms("b^3 c^2 e")).unwrap());
        assert!(ra.enabled_maximally(&bag("c^2"), &ms("b^3 c^2 e")).unwrap());
    }

    #[test]
    fn enp_and_results() {
        let ra = example1();
        assert_eq!(ra.enumerate_enp(&ms("b^4 c d"), 1000).unwrap(), vec![bag("a^2")]);
        assert!(ra.enumerate_enp(&ms("b c d"), 1000).unwrap().is_empty());
        assert_eq!(ra.results(&ms("b^4 c d"), 1000).unwrap(), vec![ms("c^3 d")]);
        assert_eq!(ra.results(&ms("b c d"), 1000).unwrap(), vec![ms("b c d")]);
    }

    #[test]
    fn budget_is_enforced() {
        let ra = example1();
        assert_eq!(
            ra.enumerate_enp(&ms("b^3 c^2 e"), 2),
            Err(Error::BudgetExceeded { limit: 2 })
        );
    }

    #[test]
    fn determinism() {
        let s = ["a", "b", "c", "d"].map(Symbol::new);
        let dup = ReactionAutomaton::new(
            s.clone(),
            [],
            vec![
                Reaction::parse("r1", "a b", "-", "c").unwrap(),
                Reaction::parse("r2", "a b", "-", "d").unwrap(),
            ],
            Multiset::new(),
            Symbol::new("d"),
        )
        .unwrap();
        assert!(!dup.is_deterministic());
        let single = ReactionAutomaton::new(
            s,
            [],
            vec![Reaction::parse("r1", "a b", "-", "c").unwrap()],
            Multiset::new(),
            Symbol::new("d"),
        )
        .unwrap();
        assert!(single.is_deterministic());
        assert!(example1().is_deterministic());
    }

    #[test]
    fn validation_diagnostics() {
        let s = ["a", "b"].map(Symbol::new);
        let ra = ReactionAutomaton::from_parts(
            s,
            [Symbol::new("z")],
            vec![
                Reaction::parse("x", "a", "a", "b").unwrap(),
                Reaction::parse("y", "-", "-", "b").unwrap(),
                Reaction::parse("y", "a", "-", "q").unwrap(),
            ],
            ms("a"),
            Symbol::new("f"),
        );
        let text: Vec<String> = ra.validate().iter().map(ToString::to_string).collect();
        let has = |needle: &str| text.iter().any(|d| d.contains(needle));
        assert!(has("reactant intersects inhibitor"), "{text:?}");
        assert!(has("empty reactant"));
        assert!(has("duplicate label"));
        assert!(has("input symbol z"));
        assert!(has("final symbol f"));
        assert!(has("symbol outside background: q"));
        assert!(matches!(
            ra.enumerate_enp(&ms("b"), 100),
            Err(Error::Invalid(_))
        ));
    }
}
