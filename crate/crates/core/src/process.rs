//! Interactive processes and bounded language acceptance.
//!
//! While input remains, each step feeds the next symbol and applies one
//! maximally parallel bag to `a + D`; afterwards steps apply bags to `D`
//! alone. A process accepts when, with the whole input consumed, it reaches a
//! configuration on which nothing is enabled and that contains the final
//! symbol. Membership is only semi-decidable, so every search carries an
//! explicit [`SearchBudget`] and reports [`Verdict::Undecided`] whenever any
//! bound pruned the search.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::multiset::{Multiset, Symbol};
use crate::reactions::{ReactionAutomaton, ReactionBag, DEFAULT_ENUMERATION_LIMIT};
use crate::word::{format_word, words_up_to};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    /// Largest configuration weight |D_i| a process may reach.
    pub max_weight: u64,
    /// Longest trace, in steps.
    pub max_steps: usize,
    /// Most distinct `(consumed, config)` states explored.
    pub max_states: usize,
    /// Bags explored per En^p enumeration.
    pub enumeration_limit: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_weight: 10_000,
            max_steps: 10_000,
            max_states: 1_000_000,
            enumeration_limit: DEFAULT_ENUMERATION_LIMIT,
        }
    }
}

impl SearchBudget {
    pub fn with_max_weight(self, max_weight: u64) -> Self {
        SearchBudget { max_weight, ..self }
    }
}

/// Which bound stopped a search short.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BudgetLimit {
    Weight,
    Steps,
    States,
    Enumeration,
}

impl fmt::Display for BudgetLimit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BudgetLimit::Weight => "max-weight",
            BudgetLimit::Steps => "max-steps",
            BudgetLimit::States => "max-states",
            BudgetLimit::Enumeration => "enumeration limit",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProcessState {
    pub consumed: usize,
    pub config: Multiset,
}

impl ProcessState {
    pub fn new(consumed: usize, config: Multiset) -> Self {
        ProcessState { consumed, config }
    }
}

/// One step of a process: the fed symbol (none once input is exhausted), the
/// applied bag (none when nothing was enabled) and the resulting config.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub fed: Option<Symbol>,
    pub bag: Option<ReactionBag>,
    pub config: Multiset,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub initial: Multiset,
    pub steps: Vec<Step>,
}

impl Trace {
    /// `D_0, D_1, …, D_m`.
    pub fn configs(&self) -> impl Iterator<Item = &Multiset> {
        std::iter::once(&self.initial).chain(self.steps.iter().map(|s| &s.config))
    }

    pub fn last(&self) -> &Multiset {
        self.steps.last().map_or(&self.initial, |s| &s.config)
    }

    /// Input symbols fed along the trace, in order.
    pub fn fed(&self) -> Vec<Symbol> {
        self.steps.iter().filter_map(|s| s.fed.clone()).collect()
    }

    /// Arrow notation, e.g. `d -a-> a d -a-> b d -> e`.
    pub fn render(&self) -> String {
        let mut out = self.initial.to_string();
        for step in &self.steps {
            let arrow = match (&step.fed, &step.bag) {
                (Some(a), Some(b)) => format!(" -{a}[{b}]-> "),
                (Some(a), None) => format!(" -{a}-> "),
                (None, Some(b)) => format!(" -[{b}]-> "),
                (None, None) => " -> ".to_string(),
            };
            out.push_str(&arrow);
            out.push_str(&step.config.to_string());
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accepted(Trace),
    Rejected,
    Undecided(BudgetLimit),
}

impl Verdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Verdict::Accepted(_))
    }

    pub fn witness(&self) -> Option<&Trace> {
        match self {
            Verdict::Accepted(t) => Some(t),
            _ => None,
        }
    }

    /// Process exit code used by the CLI: 0 accepted, 1 rejected, 2 undecided.
    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Accepted(_) => 0,
            Verdict::Rejected => 1,
            Verdict::Undecided(_) => 2,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Accepted(_) => f.write_str("accepted"),
            Verdict::Rejected => f.write_str("rejected"),
            Verdict::Undecided(why) => write!(f, "undecided ({why})"),
        }
    }
}

/// What one state of a process can do next.
enum Expansion {
    /// Input exhausted and nothing enabled.
    Converged,
    Moves(Vec<(Step, ProcessState)>),
}

fn expand(ra: &ReactionAutomaton, s: &ProcessState, w: &[Symbol], limit: usize) -> Result<Expansion> {
    let (fed, t) = match w.get(s.consumed) {
        Some(a) => {
            let mut t = s.config.clone();
            t.add(a, 1)?;
            (Some(a.clone()), t)
        }
        None => (None, s.config.clone()),
    };
    let consumed = (s.consumed + 1).min(w.len());
    let moves = ra.transitions(&t, limit)?;
    if moves.is_empty() {
        if fed.is_none() {
            return Ok(Expansion::Converged);
        }
        let step = Step {
            fed,
            bag: None,
            config: t.clone(),
        };
        return Ok(Expansion::Moves(vec![(step, ProcessState::new(consumed, t))]));
    }
    Ok(Expansion::Moves(
        moves
            .into_iter()
            .map(|(bag, next)| {
                let step = Step {
                    fed: fed.clone(),
                    bag: Some(bag),
                    config: next.clone(),
                };
                (step, ProcessState::new(consumed, next))
            })
            .collect(),
    ))
}

/// Successor states of `s`. A converged state's only successor is itself.
pub fn successors(
    ra: &ReactionAutomaton,
    s: &ProcessState,
    w: &[Symbol],
    limit: usize,
) -> Result<Vec<ProcessState>> {
    Ok(match expand(ra, s, w, limit)? {
        Expansion::Converged => vec![s.clone()],
        Expansion::Moves(m) => m.into_iter().map(|(_, st)| st).collect(),
    })
}

/// All input fed and `En^p(D) = ∅`.
pub fn converged(ra: &ReactionAutomaton, s: &ProcessState, w: &[Symbol], limit: usize) -> Result<bool> {
    Ok(s.consumed >= w.len() && ra.enumerate_enp(&s.config, limit)?.is_empty())
}

fn check_input(ra: &ReactionAutomaton, w: &[Symbol]) -> Result<()> {
    match w.iter().find(|a| !ra.input_alphabet().contains(a)) {
        Some(a) => Err(Error::InputSymbol(a.clone())),
        None => Ok(()),
    }
}

struct Node {
    state: ProcessState,
    parent: Option<(usize, Step)>,
    depth: usize,
}

fn witness(nodes: &[Node], mut at: usize) -> Trace {
    let mut steps = Vec::new();
    while let Some((parent, step)) = &nodes[at].parent {
        steps.push(step.clone());
        at = *parent;
    }
    steps.reverse();
    Trace {
        initial: nodes[at].state.config.clone(),
        steps,
    }
}

/// Breadth-first membership search from `(0, D_0)`.
///
/// Returns the shortest accepting trace when one exists within the budget.
/// `Rejected` is reported only when the reachable space was exhausted
/// without any bound pruning a state.
pub fn accepts(ra: &ReactionAutomaton, w: &[Symbol], budget: &SearchBudget) -> Result<Verdict> {
    check_input(ra, w)?;
    accepts_from(ra, w, ProcessState::new(0, ra.initial().clone()), budget)
}

/// As [`accepts`], starting from an arbitrary state.
pub fn accepts_from(
    ra: &ReactionAutomaton,
    w: &[Symbol],
    start: ProcessState,
    budget: &SearchBudget,
) -> Result<Verdict> {
    Ok(search(ra, w, start, budget)?.0)
}

/// The search behind [`accepts_from`]. Also returns the lightest
/// configuration weight that the weight bound cut off, which is the next
/// bound worth trying.
pub(crate) fn search(
    ra: &ReactionAutomaton,
    w: &[Symbol],
    start: ProcessState,
    budget: &SearchBudget,
) -> Result<(Verdict, Option<u64>)> {
    if start.config.weight() > budget.max_weight {
        return Ok((Verdict::Undecided(BudgetLimit::Weight), Some(start.config.weight())));
    }
    let mut lightest_cut: Option<u64> = None;
    let final_symbol = ra.final_symbol();
    let mut nodes = vec![Node {
        state: start.clone(),
        parent: None,
        depth: 0,
    }];
    let mut visited: HashMap<ProcessState, usize> = HashMap::from([(start, 0)]);
    let mut queue = VecDeque::from([0usize]);
    let mut pruned: Option<BudgetLimit> = None;

    while let Some(i) = queue.pop_front() {
        let expansion = match expand(ra, &nodes[i].state, w, budget.enumeration_limit) {
            Ok(e) => e,
            Err(Error::BudgetExceeded { .. }) => {
                pruned.get_or_insert(BudgetLimit::Enumeration);
                continue;
            }
            Err(e) => return Err(e),
        };
        let moves = match expansion {
            Expansion::Converged => {
                if nodes[i].state.config.contains(final_symbol) {
                    return Ok((Verdict::Accepted(witness(&nodes, i)), lightest_cut));
                }
                continue;
            }
            Expansion::Moves(m) => m,
        };
        if nodes[i].depth >= budget.max_steps {
            pruned.get_or_insert(BudgetLimit::Steps);
            continue;
        }
        for (step, next) in moves {
            let weight = next.config.weight();
            if weight > budget.max_weight {
                pruned.get_or_insert(BudgetLimit::Weight);
                lightest_cut = Some(lightest_cut.map_or(weight, |c| c.min(weight)));
                continue;
            }
            if visited.contains_key(&next) {
                continue;
            }
            if nodes.len() >= budget.max_states {
                pruned.get_or_insert(BudgetLimit::States);
                continue;
            }
            visited.insert(next.clone(), nodes.len());
            queue.push_back(nodes.len());
            let depth = nodes[i].depth + 1;
            nodes.push(Node {
                state: next,
                parent: Some((i, step)),
                depth,
            });
        }
    }
    let verdict = match pruned {
        Some(limit) => Verdict::Undecided(limit),
        None => Verdict::Rejected,
    };
    Ok((verdict, lightest_cut))
}

/// Verdicts for every word over the input alphabet of length ≤ `max_len`,
/// shortest first. Words are checked on parallel worker threads; the result
/// does not depend on the thread count.
pub fn enumerate_language(
    ra: &ReactionAutomaton,
    max_len: usize,
    budget: &SearchBudget,
) -> Result<Vec<(Vec<Symbol>, Verdict)>> {
    let words = words_up_to(ra.input_alphabet(), max_len);
    let verdicts = parallel_map(&words, |w| accepts(ra, w, budget))?;
    Ok(words.into_iter().zip(verdicts).collect())
}

pub(crate) fn parallel_map<T: Sync, R: Send>(
    items: &[T],
    f: impl Fn(&T) -> Result<R> + Sync,
) -> Result<Vec<R>> {
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(16);
    if threads <= 1 || items.len() < 2 * threads {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(threads);
    let f = &f;
    std::thread::scope(|scope| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|part| scope.spawn(move || part.iter().map(f).collect::<Result<Vec<R>>>()))
            .collect();
        let mut out = Vec::with_capacity(items.len());
        for h in handles {
            out.extend(h.join().expect("worker panicked")?);
        }
        Ok(out)
    })
}

/// A node of an explored process graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExploredState {
    pub state: ProcessState,
    pub converged: bool,
    pub accepting: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExploredEdge {
    pub from: usize,
    pub to: usize,
    pub fed: Option<Symbol>,
    pub bag: Option<ReactionBag>,
}

/// The budget-bounded reachable state graph of all processes on one input.
#[derive(Clone, Debug, Default)]
pub struct Exploration {
    pub states: Vec<ExploredState>,
    pub edges: Vec<ExploredEdge>,
    pub pruned: Option<BudgetLimit>,
}

/// Explores every state reachable from `start` (breadth first, no early exit).
pub fn explore(
    ra: &ReactionAutomaton,
    w: &[Symbol],
    start: ProcessState,
    budget: &SearchBudget,
) -> Result<Exploration> {
    let mut ex = Exploration::default();
    let mut ids: HashMap<ProcessState, usize> = HashMap::new();
    let mut depth = vec![0usize];
    ids.insert(start.clone(), 0);
    ex.states.push(ExploredState {
        state: start,
        converged: false,
        accepting: false,
    });
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let expansion = match expand(ra, &ex.states[i].state, w, budget.enumeration_limit) {
            Ok(e) => e,
            Err(Error::BudgetExceeded { .. }) => {
                ex.pruned.get_or_insert(BudgetLimit::Enumeration);
                continue;
            }
            Err(e) => return Err(e),
        };
        let moves = match expansion {
            Expansion::Converged => {
                let accepting = ex.states[i].state.config.contains(ra.final_symbol());
                ex.states[i].converged = true;
                ex.states[i].accepting = accepting;
                continue;
            }
            Expansion::Moves(m) => m,
        };
        if depth[i] >= budget.max_steps {
            ex.pruned.get_or_insert(BudgetLimit::Steps);
            continue;
        }
        for (step, next) in moves {
            if next.config.weight() > budget.max_weight {
                ex.pruned.get_or_insert(BudgetLimit::Weight);
                continue;
            }
            let to = match ids.get(&next) {
                Some(&j) => j,
                None => {
                    if ex.states.len() >= budget.max_states {
                        ex.pruned.get_or_insert(BudgetLimit::States);
                        continue;
                    }
                    let j = ex.states.len();
                    ids.insert(next.clone(), j);
                    ex.states.push(ExploredState {
                        state: next,
                        converged: false,
                        accepting: false,
                    });
                    depth.push(depth[i] + 1);
                    queue.push_back(j);
                    j
                }
            };
            ex.edges.push(ExploredEdge {
                from: i,
                to,
                fed: step.fed,
                bag: step.bag,
            });
        }
    }
    Ok(ex)
}

impl fmt::Display for ProcessState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.consumed, self.config)
    }
}

/// Formats a verdict table line: `word<TAB>verdict`.
pub fn verdict_line(word: &[Symbol], verdict: &Verdict) -> String {
    format!("{}\t{}", format_word(word), verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::word::parse_word;

    fn ms(s: &str) -> Multiset {
        s.parse().unwrap()
    }

    fn word(ra: &ReactionAutomaton, s: &str) -> Vec<Symbol> {
        parse_word(s, ra.input_alphabet()).unwrap()
    }

    const LIMIT: usize = DEFAULT_ENUMERATION_LIMIT;

    #[test]
    fn feeding_successors() {
        let ra = fixtures::example2();
        let w = word(&ra, "aaaaaaaa");
        let next = successors(&ra, &ProcessState::new(0, ms("d")), &w, LIMIT).unwrap();
        assert_eq!(next, vec![ProcessState::new(1, ms("a d"))]);
        let next = successors(&ra, &ProcessState::new(8, ms("b^4 d")), &w, LIMIT).unwrap();
        assert!(next.contains(&ProcessState::new(8, ms("c^2 d"))));
    }

    #[test]
    fn empty_word_step_on_fig1() {
        let ra = fixtures::fig1();
        let next = successors(&ra, &ProcessState::new(0, ms("p0")), &[], LIMIT).unwrap();
        assert_eq!(next, vec![ProcessState::new(0, ms("f"))]);
    }

    #[test]
    fn convergence() {
        let ra = fixtures::example2();
        let w = word(&ra, "aa");
        assert!(converged(&ra, &ProcessState::new(2, ms("f")), &w, LIMIT).unwrap());
        assert!(!converged(&ra, &ProcessState::new(2, ms("b^4 d")), &w, LIMIT).unwrap());
        assert!(!converged(&ra, &ProcessState::new(0, ms("d")), &word(&ra, "a"), LIMIT).unwrap());
    }

    #[test]
    fn small_verdicts() {
        let ra = fixtures::fig1();
        let b = SearchBudget::default();
        assert!(accepts(&ra, &word(&ra, "ab"), &b).unwrap().is_accepted());
        assert_eq!(accepts(&ra, &word(&ra, "ba"), &b).unwrap(), Verdict::Rejected);
        let ex2 = fixtures::example2();
        assert_eq!(accepts(&ex2, &word(&ex2, "aaa"), &b).unwrap(), Verdict::Rejected);
        assert!(matches!(
            accepts(&ra, &[Symbol::new("c")], &b),
            Err(Error::InputSymbol(_))
        ));
    }

    #[test]
    fn budgets_force_undecided() {
        let ra = fixtures::example2();
        let w = word(&ra, "aaaa");
        let tight = SearchBudget {
            max_steps: 2,
            ..SearchBudget::default()
        };
        assert_eq!(accepts(&ra, &w, &tight).unwrap(), Verdict::Undecided(BudgetLimit::Steps));
        let light = SearchBudget::default().with_max_weight(2);
        assert_eq!(accepts(&ra, &w, &light).unwrap(), Verdict::Undecided(BudgetLimit::Weight));
        let few = SearchBudget {
            max_states: 3,
            ..SearchBudget::default()
        };
        assert_eq!(accepts(&ra, &w, &few).unwrap(), Verdict::Undecided(BudgetLimit::States));
    }

    #[test]
    fn language_table() {
        let ra = fixtures::fig1();
        let table = enumerate_language(&ra, 4, &SearchBudget::default()).unwrap();
        let accepted: Vec<String> = table
            .iter()
            .filter(|(_, v)| v.is_accepted())
            .map(|(w, _)| format_word(w))
            .collect();
        assert_eq!(accepted, ["λ", "ab", "aabb"]);
        let only_empty = enumerate_language(&ra, 0, &SearchBudget::default()).unwrap();
        assert_eq!(only_empty.len(), 1);
        assert!(only_empty[0].1.is_accepted());
    }
}
