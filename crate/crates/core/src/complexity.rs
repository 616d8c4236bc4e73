//! Workspace measurement and the conversion of k-bounded automata into NFAs.
//!
//! The workspace of an accepting process is the heaviest configuration it
//! visits; the workspace of a word is the least such value over all
//! accepting processes. A weight bound limits the configurations `D_i`
//! themselves; the momentary `a + D_i` formed while feeding is not counted.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Write;

use crate::dot::escape;
use crate::error::{Error, Result};
use crate::multiset::{Multiset, Symbol};
use crate::process::{parallel_map, search, ProcessState, SearchBudget, Trace, Verdict};
use crate::reactions::ReactionAutomaton;
use crate::word::format_word;

/// Heaviest configuration of an accepting trace, `D_0` included.
pub fn workspace_of_trace(ra: &ReactionAutomaton, trace: &Trace, limit: usize) -> Result<u64> {
    let last = trace.last();
    if !last.contains(ra.final_symbol()) || !ra.enumerate_enp(last, limit)?.is_empty() {
        return Err(Error::NotAccepting);
    }
    Ok(trace.configs().map(Multiset::weight).max().unwrap_or(0))
}

/// The least weight bound `B ≤ cap` under which `w` is accepted, with a
/// witness trace whose workspace is `B`. `None` when `w` is rejected, no
/// bound up to `cap` suffices, or another budget ran out.
///
/// Bounds are tried in increasing order starting from `|D_0|`; after a
/// failed attempt the next bound is the lightest configuration that the
/// previous one cut off, so no bound in between is skipped that could matter.
pub fn workspace(
    ra: &ReactionAutomaton,
    w: &[Symbol],
    cap: u64,
    budget: &SearchBudget,
) -> Result<Option<(u64, Trace)>> {
    let mut bound = ra.initial().weight();
    while bound <= cap {
        let b = budget.with_max_weight(bound);
        let start = ProcessState::new(0, ra.initial().clone());
        match search(ra, w, start, &b)? {
            (Verdict::Accepted(t), _) => {
                let ws = t.configs().map(Multiset::weight).max().unwrap_or(0);
                return Ok(Some((ws, t)));
            }
            (Verdict::Undecided(crate::process::BudgetLimit::Weight), Some(next)) => bound = next,
            _ => return Ok(None),
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WorkspaceRecord {
    pub word: Vec<Symbol>,
    pub length: usize,
    pub ws: Option<u64>,
    /// Index into [`WorkspaceReport::traces`].
    pub trace_id: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WorkspaceReport {
    pub records: Vec<WorkspaceRecord>,
    pub traces: Vec<Trace>,
    /// Largest `WS / max(n, 1)` over accepted words.
    pub max_ratio: Option<f64>,
    /// The largest workspace per length never decreases as length grows.
    pub monotone: bool,
}

impl WorkspaceReport {
    /// `string,length,ws,trace_id`; `ws` is `unknown` for words without a
    /// witness.
    pub fn to_csv(&self) -> Result<String> {
        let mut wtr = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Usage(e.to_string());
        wtr.write_record(["string", "length", "ws", "trace_id"]).map_err(io)?;
        for r in &self.records {
            wtr.write_record([
                format_word(&r.word),
                r.length.to_string(),
                r.ws.map_or("unknown".into(), |v| v.to_string()),
                r.trace_id.map_or(String::new(), |v| v.to_string()),
            ])
            .map_err(io)?;
        }
        let bytes = wtr.into_inner().map_err(|e| Error::Usage(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    /// Raw growth figures; an empirical hint, not a classification.
    pub fn summary(&self) -> String {
        let accepted = self.records.iter().filter(|r| r.ws.is_some()).count();
        let mut out = format!("accepted: {accepted}/{}\n", self.records.len());
        if let Some(c) = self.max_ratio {
            let _ = writeln!(out, "max ws/n: {c:.3}");
        }
        let _ = writeln!(out, "monotone in n: {}", if self.monotone { "yes" } else { "no" });
        out
    }
}

pub fn profile_boundedness(
    ra: &ReactionAutomaton,
    strings: &[Vec<Symbol>],
    cap: u64,
    budget: &SearchBudget,
) -> Result<WorkspaceReport> {
    let results = parallel_map(strings, |w| workspace(ra, w, cap, budget))?;
    let mut records = Vec::new();
    let mut traces = Vec::new();
    for (w, res) in strings.iter().zip(results) {
        let (ws, trace_id) = match res {
            Some((ws, t)) => {
                traces.push(t);
                (Some(ws), Some(traces.len() - 1))
            }
            None => (None, None),
        };
        records.push(WorkspaceRecord {
            word: w.clone(),
            length: w.len(),
            ws,
            trace_id,
        });
    }
    let max_ratio = records
        .iter()
        .filter_map(|r| r.ws.map(|ws| ws as f64 / r.length.max(1) as f64))
        .fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |a| a.max(x))));
    let mut by_len: BTreeMap<usize, u64> = BTreeMap::new();
    for r in &records {
        if let Some(ws) = r.ws {
            let e = by_len.entry(r.length).or_insert(0);
            *e = (*e).max(ws);
        }
    }
    let peaks: Vec<u64> = by_len.into_values().collect();
    let monotone = peaks.windows(2).all(|p| p[0] <= p[1]);
    Ok(WorkspaceReport {
        records,
        traces,
        max_ratio,
        monotone,
    })
}

/// An NFA whose states are automaton configurations of weight at most k.
///
/// Each configuration appears in two phases: while reading input only
/// symbol transitions leave it, and a λ-transition moves it into the
/// post-input phase, where only λ-transitions (single reaction steps) exist.
/// This keeps input-free steps after the whole input, as in the automaton.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nfa {
    /// `(config, post_input)`.
    pub states: Vec<(Multiset, bool)>,
    pub alphabet: BTreeSet<Symbol>,
    pub transitions: BTreeMap<(usize, Option<Symbol>), BTreeSet<usize>>,
    pub initial: usize,
    pub finals: BTreeSet<usize>,
}

/// The reachable part of the k-bounded NFA. Final states are post-input
/// configurations that contain the final symbol and on which nothing is
/// enabled.
pub fn to_nfa(ra: &ReactionAutomaton, k: u64, budget: &SearchBudget) -> Result<Nfa> {
    let w0 = ra.initial().weight();
    if k < w0 {
        return Err(Error::Usage(format!(
            "k = {k} is below the weight {w0} of the initial multiset"
        )));
    }
    let limit = budget.enumeration_limit;
    let mut nfa = Nfa {
        states: vec![(ra.initial().clone(), false)],
        alphabet: ra.input_alphabet().clone(),
        transitions: BTreeMap::new(),
        initial: 0,
        finals: BTreeSet::new(),
    };
    let mut ids: HashMap<(Multiset, bool), usize> = HashMap::from([((ra.initial().clone(), false), 0)]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let (d, post) = nfa.states[i].clone();
        let mut moves: Vec<(Option<Symbol>, Multiset, bool)> = Vec::new();
        if post {
            let next = ra.results(&d, limit)?;
            if next == [d.clone()] && ra.enumerate_enp(&d, limit)?.is_empty() {
                if d.contains(ra.final_symbol()) {
                    nfa.finals.insert(i);
                }
            } else {
                moves.extend(next.into_iter().map(|n| (None, n, true)));
            }
        } else {
            moves.push((None, d.clone(), true));
            for a in &nfa.alphabet {
                let mut t = d.clone();
                t.add(a, 1)?;
                moves.extend(ra.results(&t, limit)?.into_iter().map(|n| (Some(a.clone()), n, false)));
            }
        }
        for (label, next, phase) in moves {
            if next.weight() > k {
                continue;
            }
            let key = (next, phase);
            let j = match ids.get(&key) {
                Some(&j) => j,
                None => {
                    if nfa.states.len() >= budget.max_states {
                        return Err(Error::BudgetExceeded {
                            limit: budget.max_states,
                        });
                    }
                    let j = nfa.states.len();
                    ids.insert(key.clone(), j);
                    nfa.states.push(key);
                    queue.push_back(j);
                    j
                }
            };
            nfa.transitions.entry((i, label)).or_default().insert(j);
        }
    }
    Ok(nfa)
}

impl Nfa {
    fn lambda_closure(&self, mut set: BTreeSet<usize>) -> BTreeSet<usize> {
        let mut stack: Vec<usize> = set.iter().copied().collect();
        while let Some(s) = stack.pop() {
            if let Some(next) = self.transitions.get(&(s, None)) {
                for &n in next {
                    if set.insert(n) {
                        stack.push(n);
                    }
                }
            }
        }
        set
    }

    /// Subset simulation with λ-closure.
    pub fn accepts(&self, w: &[Symbol]) -> bool {
        let mut current = self.lambda_closure(BTreeSet::from([self.initial]));
        for a in w {
            let key = Some(a.clone());
            let moved: BTreeSet<usize> = current
                .iter()
                .filter_map(|&s| self.transitions.get(&(s, key.clone())))
                .flatten()
                .copied()
                .collect();
            current = self.lambda_closure(moved);
            if current.is_empty() {
                return false;
            }
        }
        current.iter().any(|s| self.finals.contains(s))
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph nfa {\n  rankdir=LR;\n  node [shape=circle];\n");
        let _ = writeln!(out, "  start [shape=point];");
        for (i, (d, post)) in self.states.iter().enumerate() {
            let label = if *post { format!("{d} ·") } else { d.to_string() };
            let shape = if self.finals.contains(&i) { ", shape=doublecircle" } else { "" };
            let _ = writeln!(out, "  q{i} [label=\"{}\"{shape}];", escape(&label));
        }
        let _ = writeln!(out, "  start -> q{};", self.initial);
        for ((from, sym), targets) in &self.transitions {
            let label = sym.as_ref().map_or("λ".to_string(), ToString::to_string);
            for to in targets {
                let _ = writeln!(out, "  q{from} -> q{to} [label=\"{}\"];", escape(&label));
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Standard NFA membership; see [`Nfa::accepts`].
pub fn nfa_accepts(nfa: &Nfa, w: &[Symbol]) -> bool {
    nfa.accepts(w)
}
