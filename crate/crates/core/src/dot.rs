//! Reaction diagrams in Graphviz DOT.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write;

use crate::error::{Error, Result};
use crate::multiset::{Multiset, Symbol};
use crate::process::{explore, ProcessState, SearchBudget};
use crate::reactions::ReactionAutomaton;

#[derive(Clone, Debug)]
pub struct DiagramSpec {
    pub strings: Vec<Vec<Symbol>>,
    /// Label edges with the applied reaction bag as well as the fed symbol.
    pub show_bags: bool,
    /// Route every converged, non-accepting configuration to one sink node.
    pub collapse_rejected: bool,
}

impl DiagramSpec {
    pub fn new(strings: Vec<Vec<Symbol>>) -> Self {
        DiagramSpec {
            strings,
            show_bags: true,
            collapse_rejected: true,
        }
    }
}

pub(crate) fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

const SINK: &str = "sink";

/// All interactive processes on the given strings, merged into one graph
/// whose nodes are configurations. Accepting configurations are drawn with
/// a double circle.
pub fn emit_diagram(ra: &ReactionAutomaton, spec: &DiagramSpec, budget: &SearchBudget) -> Result<String> {
    let mut nodes: Vec<Multiset> = vec![ra.initial().clone()];
    let mut ids: HashMap<Multiset, usize> = HashMap::from([(ra.initial().clone(), 0)]);
    let mut accepting: BTreeSet<usize> = BTreeSet::new();
    let mut edges: Vec<(usize, Option<usize>, String)> = Vec::new();
    let mut seen_edges = BTreeSet::new();
    let mut uses_sink = false;

    for w in &spec.strings {
        let ex = explore(ra, w, ProcessState::new(0, ra.initial().clone()), budget)?;
        if ex.pruned.is_some() {
            return Err(Error::BudgetExceeded {
                limit: budget.max_states,
            });
        }
        let mut node_of = |config: &Multiset, nodes: &mut Vec<Multiset>| -> usize {
            *ids.entry(config.clone()).or_insert_with(|| {
                nodes.push(config.clone());
                nodes.len() - 1
            })
        };
        let sinks: Vec<bool> = ex
            .states
            .iter()
            .map(|s| spec.collapse_rejected && s.converged && !s.accepting)
            .collect();
        for s in &ex.states {
            if s.accepting {
                accepting.insert(node_of(&s.state.config, &mut nodes));
            }
        }
        for e in &ex.edges {
            let from = node_of(&ex.states[e.from].state.config, &mut nodes);
            let to = if sinks[e.to] {
                uses_sink = true;
                None
            } else {
                Some(node_of(&ex.states[e.to].state.config, &mut nodes))
            };
            let bag = e.bag.as_ref().filter(|_| spec.show_bags).map(ToString::to_string);
            let label = match (&e.fed, bag) {
                (Some(a), Some(b)) => format!("{a} / {b}"),
                (Some(a), None) => a.to_string(),
                (None, Some(b)) => b,
                (None, None) => String::new(),
            };
            if seen_edges.insert((from, to, label.clone())) {
                edges.push((from, to, label));
            }
        }
    }

    let mut out = String::from("digraph reactions {\n  rankdir=LR;\n  node [shape=circle];\n");
    for (i, config) in nodes.iter().enumerate() {
        let shape = if accepting.contains(&i) { ", shape=doublecircle" } else { "" };
        let _ = writeln!(out, "  n{i} [label=\"{}\"{shape}];", escape(&config.to_string()));
    }
    if uses_sink {
        let _ = writeln!(out, "  {SINK} [label=\"rejected\", shape=box];");
    }
    for (from, to, label) in edges {
        let to = to.map_or(SINK.to_string(), |t| format!("n{t}"));
        let _ = writeln!(out, "  n{from} -> {to} [label=\"{}\"];", escape(&label));
    }
    out.push_str("}\n");
    Ok(out)
}
