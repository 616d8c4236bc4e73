#![allow(dead_code)]

//! Independent oracles shared by the integration tests.

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use ra_core::compiler::{explain_config, CompilationOutput, ConfigView, Entity};
use ra_core::process::{explore, ProcessState, SearchBudget, Trace};
use ra_core::reactions::{Reaction, ReactionAutomaton, ReactionBag};
use ra_core::{Multiset, Symbol};

pub type Counts = BTreeMap<String, u64>;

/// Plain name -> count view of a multiset, so oracle arithmetic does not
/// go through the library's own operations.
pub fn counts(m: &Multiset) -> Counts {
    m.iter().map(|(s, n)| (s.to_string(), n)).collect()
}

fn fits(small: &Counts, big: &Counts) -> bool {
    small.iter().all(|(s, n)| big.get(s).copied().unwrap_or(0) >= *n)
}

fn add_scaled(acc: &mut Counts, m: &Counts, k: u64) {
    if k == 0 {
        return;
    }
    for (s, n) in m {
        *acc.entry(s.clone()).or_insert(0) += n * k;
    }
}

struct Plain {
    label: String,
    reactant: Counts,
    inhibitor: BTreeSet<String>,
    product: Counts,
}

fn plain(r: &Reaction) -> Plain {
    Plain {
        label: r.label.clone(),
        reactant: counts(&r.reactant),
        inhibitor: r.inhibitor.iter().map(ToString::to_string).collect(),
        product: counts(&r.product),
    }
}

fn enabled(rs: &[Plain], bag: &[u64], t: &Counts) -> bool {
    let mut need = Counts::new();
    for (r, &k) in rs.iter().zip(bag) {
        add_scaled(&mut need, &r.reactant, k);
        if k > 0 && r.inhibitor.iter().any(|s| t.get(s).copied().unwrap_or(0) > 0) {
            return false;
        }
    }
    fits(&need, t)
}

/// `En^p(t)` by exhaustive enumeration: every count vector with each
/// reaction used at most as often as its reactant fits into `t` on its own,
/// kept when it is non-empty, enabled, and cannot be extended by one more
/// instance of any reaction.
pub fn brute_enp(ra: &ReactionAutomaton, t: &Multiset) -> BTreeSet<Vec<(String, u64)>> {
    let rs: Vec<Plain> = ra.reactions().iter().map(plain).collect();
    let tc = counts(t);
    let caps: Vec<u64> = rs
        .iter()
        .map(|r| {
            r.reactant
                .iter()
                .map(|(s, n)| tc.get(s).copied().unwrap_or(0) / n)
                .min()
                .unwrap_or(0)
        })
        .collect();
    let mut out = BTreeSet::new();
    let mut bag = vec![0u64; rs.len()];
    loop {
        if bag.iter().any(|&k| k > 0) && enabled(&rs, &bag, &tc) {
            let maximal = (0..rs.len()).all(|i| {
                let mut more = bag.clone();
                more[i] += 1;
                !enabled(&rs, &more, &tc)
            });
            if maximal {
                out.insert(
                    rs.iter()
                        .zip(&bag)
                        .filter(|(_, &k)| k > 0)
                        .map(|(r, &k)| (r.label.clone(), k))
                        .collect(),
                );
            }
        }
        let mut i = 0;
        while i < bag.len() {
            if bag[i] < caps[i] {
                bag[i] += 1;
                break;
            }
            bag[i] = 0;
            i += 1;
        }
        if i == bag.len() {
            return out;
        }
    }
}

pub fn bag_key(bag: &ReactionBag) -> Vec<(String, u64)> {
    bag.iter().map(|(l, n)| (l.to_string(), n)).collect()
}

/// `t - R + P` for a bag given as label counts.
pub fn apply(ra: &ReactionAutomaton, t: &Multiset, bag: &[(String, u64)]) -> Counts {
    let mut out = counts(t);
    for (label, k) in bag {
        let r = plain(ra.reaction(label).expect("bag label exists"));
        for (s, n) in &r.reactant {
            let e = out.get_mut(s).expect("reactant present");
            *e -= n * k;
        }
        add_scaled(&mut out, &r.product, *k);
    }
    out.retain(|_, n| *n > 0);
    out
}

/// `Res(t)` from the brute-force `En^p`.
pub fn brute_results(ra: &ReactionAutomaton, t: &Multiset) -> BTreeSet<Counts> {
    let enp = brute_enp(ra, t);
    if enp.is_empty() {
        return BTreeSet::from([counts(t)]);
    }
    enp.iter().map(|b| apply(ra, t, b)).collect()
}

pub fn from_counts(c: &Counts) -> Multiset {
    Multiset::from_counts(c.iter().map(|(s, n)| (Symbol::new(s), *n))).unwrap()
}

/// Checks an accepting trace step by step against the brute-force oracle.
pub fn replay(ra: &ReactionAutomaton, w: &[Symbol], trace: &Trace) -> Result<(), String> {
    if &trace.initial != ra.initial() {
        return Err(format!("starts at {} instead of {}", trace.initial, ra.initial()));
    }
    let mut d = trace.initial.clone();
    for (i, step) in trace.steps.iter().enumerate() {
        let expected_feed = w.get(i);
        if step.fed.as_ref() != expected_feed {
            return Err(format!("step {}: fed {:?}, expected {:?}", i + 1, step.fed, expected_feed));
        }
        let mut t = counts(&d);
        if let Some(a) = &step.fed {
            *t.entry(a.to_string()).or_insert(0) += 1;
        }
        let t = from_counts(&t);
        let enp = brute_enp(ra, &t);
        let next = counts(&step.config);
        match &step.bag {
            None => {
                if !enp.is_empty() || next != counts(&t) {
                    return Err(format!("step {}: idle step on {t} is not permanent", i + 1));
                }
            }
            Some(bag) => {
                let key = bag_key(bag);
                if !enp.contains(&key) {
                    return Err(format!("step {}: {bag} is not in En^p({t})", i + 1));
                }
                if apply(ra, &t, &key) != next {
                    return Err(format!("step {}: wrong result {}", i + 1, step.config));
                }
            }
        }
        d = step.config.clone();
    }
    if trace.steps.len() < w.len() {
        return Err("input not fully consumed".into());
    }
    if !brute_enp(ra, &d).is_empty() {
        return Err(format!("last config {d} has not converged"));
    }
    if !d.contains(ra.final_symbol()) {
        return Err(format!("last config {d} lacks the final symbol"));
    }
    Ok(())
}

/// Minimum workspace over all accepting processes of length at most
/// `max_len`, by plain depth-first enumeration of every process (no
/// deduplication). Returns `(min_ws, processes_seen)`.
pub fn brute_workspace(ra: &ReactionAutomaton, w: &[Symbol], max_len: usize, trace_limit: usize) -> (Option<u64>, usize) {
    #[allow(clippy::too_many_arguments)]
    fn go(
        ra: &ReactionAutomaton,
        w: &[Symbol],
        d: Counts,
        i: usize,
        peak: u64,
        max_len: usize,
        best: &mut Option<u64>,
        seen: &mut usize,
        limit: usize,
    ) {
        if *seen >= limit {
            return;
        }
        let m = from_counts(&d);
        if i >= w.len() && brute_enp(ra, &m).is_empty() {
            *seen += 1;
            if d.contains_key(&ra.final_symbol().to_string()) {
                *best = Some(best.map_or(peak, |b: u64| b.min(peak)));
            }
            return;
        }
        if i >= max_len {
            *seen += 1;
            return;
        }
        let mut t = d;
        if let Some(a) = w.get(i) {
            *t.entry(a.to_string()).or_insert(0) += 1;
        }
        for next in brute_results(ra, &from_counts(&t)) {
            let weight = next.values().sum::<u64>();
            go(ra, w, next, i + 1, peak.max(weight), max_len, best, seen, limit);
        }
    }
    let mut best = None;
    let mut seen = 0;
    let d0 = counts(ra.initial());
    let peak = ra.initial().weight();
    go(ra, w, d0, 0, peak, max_len, &mut best, &mut seen, trace_limit);
    (best, seen)
}

pub fn is_anbn(w: &str) -> bool {
    let n = w.len() / 2;
    w.len().is_multiple_of(2) && w == format!("{}{}", "a".repeat(n), "b".repeat(n))
}

pub fn is_pow2_a(w: &str) -> bool {
    w.len() >= 2 && w.len().is_power_of_two() && w.chars().all(|c| c == 'a')
}

pub fn is_anbncn(w: &str) -> bool {
    let n = w.len() / 3;
    w.len().is_multiple_of(3) && w == format!("{}{}{}", "a".repeat(n), "b".repeat(n), "c".repeat(n))
}

pub fn is_ambmcndn(w: &str) -> bool {
    let m = w.chars().take_while(|&c| c == 'a').count();
    let rest = &w[m..];
    let bs = rest.chars().take_while(|&c| c == 'b').count();
    let rest = &rest[bs..];
    let cs = rest.chars().take_while(|&c| c == 'c').count();
    let rest = &rest[cs..];
    m == bs && rest.len() == cs && rest.chars().all(|c| c == 'd')
}

/// Plain-string rendering of a word over single-letter symbols.
pub fn letters(w: &[Symbol]) -> String {
    w.iter().map(|s| s.name()).collect()
}

pub fn sym(name: &str) -> Symbol {
    Symbol::new(name)
}

pub fn word(text: &str) -> Vec<Symbol> {
    text.chars().map(|c| Symbol::new(&c.to_string())).collect()
}

// Strategies

const NAMES: [&str; 4] = ["a", "b", "c", "d"];

pub fn multiset() -> impl Strategy<Value = Multiset> {
    prop::collection::btree_map(prop::sample::select(&NAMES[..]), 1u64..6, 0..4).prop_map(|m| {
        Multiset::from_counts(m.into_iter().map(|(s, n)| (Symbol::new(s), n))).unwrap()
    })
}

fn over(alpha: &'static [&'static str], max_weight: u64) -> impl Strategy<Value = Counts> {
    prop::collection::vec(prop::sample::select(alpha), 0..=max_weight as usize).prop_map(|v| {
        let mut c = Counts::new();
        for s in v {
            *c.entry(s.to_string()).or_insert(0) += 1;
        }
        c
    })
}

pub const SMALL: [&str; 3] = ["x", "y", "z"];

fn reaction(i: usize) -> impl Strategy<Value = Reaction> {
    (over(&SMALL, 3), prop::sample::subsequence(&SMALL[..], 0..=2), over(&SMALL, 2)).prop_filter_map(
        "empty reactant or reactant/inhibitor overlap",
        move |(r, inh, p)| {
            if r.is_empty() || inh.iter().any(|s| r.contains_key(*s)) {
                return None;
            }
            Some(Reaction::new(
                format!("r{i}"),
                from_counts(&r),
                inh.into_iter().map(Symbol::new),
                from_counts(&p),
            ))
        },
    )
}

/// Automata with at most four reactions over `{x, y, z}`.
pub fn small_automaton() -> impl Strategy<Value = ReactionAutomaton> {
    (0usize..=4)
        .prop_flat_map(|n| (0..n).map(reaction).collect::<Vec<_>>())
        .prop_map(|rs| {
            let bg: Vec<Symbol> = SMALL.iter().map(|s| Symbol::new(s)).collect();
            ReactionAutomaton::new(bg, [Symbol::new("x")], rs, Multiset::singleton(Symbol::new("x")), Symbol::new("z"))
                .expect("generated automaton is valid")
        })
}

/// A configuration of weight at most 6 over `{x, y, z}`.
pub fn small_config() -> impl Strategy<Value = Multiset> {
    over(&SMALL, 6).prop_map(|c| from_counts(&c))
}

// Property bodies, shared by the property suite and the acceptance run.

pub fn lattice_laws(a: &Multiset, b: &Multiset, c: &Multiset) -> Result<(), TestCaseError> {
    prop_assert_eq!(a.sum(b).unwrap(), b.sum(a).unwrap());
    prop_assert_eq!(a.sum(b).unwrap().sum(c).unwrap(), a.sum(&b.sum(c).unwrap()).unwrap());
    prop_assert_eq!(a.intersect(a), a.clone());
    prop_assert_eq!(a.intersect(b), b.intersect(a));
    prop_assert_eq!(&a.sum(b).unwrap().subtract(b).unwrap(), a);
    prop_assert!(a.included_in(a));
    if a.included_in(b) && b.included_in(a) {
        prop_assert_eq!(a, b);
    }
    if a.included_in(b) && b.included_in(c) {
        prop_assert!(a.included_in(c));
    }
    prop_assert!(a.intersect(b).included_in(a));
    prop_assert_eq!(a.sum(b).unwrap().weight(), a.weight() + b.weight());
    prop_assert_eq!(&a.to_string().parse::<Multiset>().unwrap(), a);
    Ok(())
}

pub fn enp_matches_oracle(ra: &ReactionAutomaton, t: &Multiset) -> Result<(), TestCaseError> {
    let got = ra.enumerate_enp(t, 100_000).unwrap();
    let got_keys: BTreeSet<_> = got.iter().map(bag_key).collect();
    prop_assert_eq!(got_keys.len(), got.len(), "duplicate bags");
    prop_assert_eq!(&got_keys, &brute_enp(ra, t));
    for bag in &got {
        prop_assert!(ra.enabled_maximally(bag, t).unwrap());
    }
    Ok(())
}

pub fn permanency(ra: &ReactionAutomaton, t: &Multiset) -> Result<(), TestCaseError> {
    let enp = ra.enumerate_enp(t, 100_000).unwrap();
    let res = ra.results(t, 100_000).unwrap();
    if enp.is_empty() {
        prop_assert_eq!(res, vec![t.clone()]);
    } else {
        prop_assert!(!res.is_empty());
        for bag in &enp {
            let r = ra.reactant_of(bag).unwrap();
            let p = ra.product_of(bag).unwrap();
            let next = t.subtract(&r).unwrap().sum(&p).unwrap();
            prop_assert_eq!(next.weight(), t.weight() - r.weight() + p.weight());
            prop_assert!(res.contains(&next));
        }
        if res == vec![t.clone()] {
            // only possible when every bag reproduces t
            for bag in &enp {
                prop_assert_eq!(ra.reactant_of(bag).unwrap(), ra.product_of(bag).unwrap());
            }
        }
    }
    Ok(())
}

/// Explores every process of the compiled automaton on `w` (at most
/// `max_states` states) and checks the decoding invariants: in every
/// decodable configuration each stack's top symbol has odd count and every
/// other symbol of that stack even count; no configuration that fails to
/// decode reaches acceptance. Returns `(states, traps)`.
pub fn compiled_invariants(out: &CompilationOutput, w: &[Symbol], max_states: usize) -> Result<(usize, usize), String> {
    let ra = &out.automaton;
    let budget = SearchBudget {
        max_weight: 1 << 16,
        max_states,
        ..SearchBudget::default()
    };
    let ex = explore(ra, w, ProcessState::new(0, ra.initial().clone()), &budget).map_err(|e| e.to_string())?;
    let mut traps = BTreeSet::new();
    for (i, s) in ex.states.iter().enumerate() {
        let d = &s.state.config;
        match explain_config(out, d) {
            ConfigView::Machine { stacks, .. } => {
                for (k, stack) in stacks.iter().enumerate() {
                    let top = stack.first().ok_or_else(|| format!("{d}: stack {} is empty", k + 1))?;
                    for (sym, n) in d.iter() {
                        if let Some(Entity::Stack(j, x)) = out.symbol_table.entity(sym) {
                            if *j == k && (n % 2 == 1) != (x == top) {
                                return Err(format!("{d}: {sym} has count {n} with top {top}"));
                            }
                        }
                    }
                }
            }
            ConfigView::Undecodable(_) => {
                traps.insert(i);
            }
            ConfigView::Accepting => {}
        }
    }
    // backward reachability from accepting states
    let mut reaches: BTreeSet<usize> = ex
        .states
        .iter()
        .enumerate()
        .filter(|(_, s)| s.accepting)
        .map(|(i, _)| i)
        .collect();
    loop {
        let before = reaches.len();
        for e in &ex.edges {
            if reaches.contains(&e.to) {
                reaches.insert(e.from);
            }
        }
        if reaches.len() == before {
            break;
        }
    }
    if let Some(t) = traps.iter().find(|t| reaches.contains(t)) {
        return Err(format!("trap {} reaches acceptance", ex.states[*t].state.config));
    }
    Ok((ex.states.len(), traps.len()))
}
