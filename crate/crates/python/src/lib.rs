//! Python bindings for the reaction automata toolkit.

use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use ra_core::compiler::{self, COMPILED_MAX_WEIGHT};
use ra_core::complexity;
use ra_core::io;
use ra_core::process::{self, SearchBudget, Verdict};
use ra_core::stackmachine::MachineVerdict;
use ra_core::word::{format_word, parse_word};
use ra_core::{fixtures, Symbol};

fn err(e: ra_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "Multiset", module = "reaction_automata", frozen, eq, hash, skip_from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct PyMultiset(ra_core::Multiset);

#[pymethods]
impl PyMultiset {
    /// Parses `"b^4 c d"`; `"-"` or no argument gives the empty multiset.
    #[new]
    #[pyo3(signature = (text = "-"))]
    fn new(text: &str) -> PyResult<Self> {
        text.parse().map(PyMultiset).map_err(err)
    }

    fn count(&self, symbol: &str) -> PyResult<u64> {
        Ok(self.0.count(&Symbol::parse_token(symbol).map_err(err)?))
    }

    #[getter]
    fn weight(&self) -> u64 {
        self.0.weight()
    }

    fn to_dict(&self) -> BTreeMap<String, u64> {
        self.0.iter().map(|(s, n)| (s.to_string(), n)).collect()
    }

    fn included_in(&self, other: &PyMultiset) -> bool {
        self.0.included_in(&other.0)
    }

    fn __add__(&self, other: &PyMultiset) -> PyResult<Self> {
        self.0.sum(&other.0).map(PyMultiset).map_err(err)
    }

    fn __sub__(&self, other: &PyMultiset) -> PyResult<Self> {
        self.0.subtract(&other.0).map(PyMultiset).map_err(err)
    }

    fn __and__(&self, other: &PyMultiset) -> Self {
        PyMultiset(self.0.intersect(&other.0))
    }

    fn __len__(&self) -> usize {
        self.0.support_len()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Multiset({:?})", self.0.to_string())
    }
}

/// `stm(["X", "Y", "X"])`: the i-th symbol gets 2^(i-1) copies.
#[pyfunction]
fn stm(symbols: Vec<String>) -> PyResult<PyMultiset> {
    let syms = symbols
        .iter()
        .map(|s| Symbol::parse_token(s))
        .collect::<ra_core::Result<Vec<_>>>()
        .map_err(err)?;
    ra_core::stm(&syms).map(PyMultiset).map_err(err)
}

#[pyclass(name = "ReactionAutomaton", module = "reaction_automata", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyAutomaton {
    doc: io::RaDocument,
}

impl PyAutomaton {
    fn budget(&self, max_weight: Option<u64>, max_steps: usize, max_states: usize) -> SearchBudget {
        let default = if self.doc.is_compiled() {
            COMPILED_MAX_WEIGHT
        } else {
            SearchBudget::default().max_weight
        };
        SearchBudget {
            max_weight: max_weight.unwrap_or(default),
            max_steps,
            max_states,
            ..SearchBudget::default()
        }
    }

    fn word(&self, text: &str) -> PyResult<Vec<Symbol>> {
        parse_word(text, self.doc.automaton.input_alphabet()).map_err(err)
    }
}

fn verdict_name(v: &Verdict) -> String {
    match v {
        Verdict::Accepted(_) => "accepted".into(),
        Verdict::Rejected => "rejected".into(),
        Verdict::Undecided(why) => format!("undecided ({why})"),
    }
}

#[pymethods]
impl PyAutomaton {
    /// Parses the `.ra` text format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        io::parse_ra_document(text)
            .map(|doc| PyAutomaton { doc })
            .map_err(err)
    }

    #[staticmethod]
    fn from_file(path: std::path::PathBuf) -> PyResult<Self> {
        io::read_ra(&path).map(|doc| PyAutomaton { doc }).map_err(err)
    }

    /// One of the bundled examples: fig1, example1 … example4, odd_a, ab_star.
    #[staticmethod]
    fn fixture(name: &str) -> PyResult<Self> {
        let automaton = match name {
            "fig1" => fixtures::fig1(),
            "example1" => fixtures::example1(),
            "example2" => fixtures::example2(),
            "example3" => fixtures::example3(),
            "example4" => fixtures::example4(),
            "odd_a" => fixtures::odd_a(),
            "ab_star" => fixtures::ab_star(),
            _ => return Err(PyValueError::new_err(format!("no fixture named {name:?}"))),
        };
        Ok(PyAutomaton {
            doc: io::RaDocument {
                automaton,
                origin: None,
            },
        })
    }

    fn format(&self) -> String {
        io::format_ra_document(&self.doc)
    }

    #[getter]
    fn background(&self) -> Vec<String> {
        self.doc.automaton.background().iter().map(ToString::to_string).collect()
    }

    #[getter]
    fn input_alphabet(&self) -> Vec<String> {
        self.doc.automaton.input_alphabet().iter().map(ToString::to_string).collect()
    }

    #[getter]
    fn initial(&self) -> PyMultiset {
        PyMultiset(self.doc.automaton.initial().clone())
    }

    #[getter]
    fn final_symbol(&self) -> String {
        self.doc.automaton.final_symbol().to_string()
    }

    /// `(label, reactant, inhibitor, product)` for every reaction.
    fn reactions(&self) -> Vec<(String, String, Vec<String>, String)> {
        self.doc
            .automaton
            .reactions()
            .iter()
            .map(|r| {
                (
                    r.label.clone(),
                    r.reactant.to_string(),
                    r.inhibitor.iter().map(ToString::to_string).collect(),
                    r.product.to_string(),
                )
            })
            .collect()
    }

    fn is_deterministic(&self) -> bool {
        self.doc.automaton.is_deterministic()
    }

    /// Maximally enabled reaction bags on a configuration, as strings.
    fn enabled_bags(&self, config: &PyMultiset) -> PyResult<Vec<String>> {
        let bags = self
            .doc
            .automaton
            .enumerate_enp(&config.0, SearchBudget::default().enumeration_limit)
            .map_err(err)?;
        Ok(bags.iter().map(ToString::to_string).collect())
    }

    /// Possible next configurations.
    fn results(&self, config: &PyMultiset) -> PyResult<Vec<PyMultiset>> {
        let res = self
            .doc
            .automaton
            .results(&config.0, SearchBudget::default().enumeration_limit)
            .map_err(err)?;
        Ok(res.into_iter().map(PyMultiset).collect())
    }

    /// Returns `(verdict, trace)`, where the trace lists the configurations
    /// of a shortest accepting process, or is `None`.
    #[pyo3(signature = (word, max_weight = None, max_steps = 10_000, max_states = 1_000_000))]
    fn accepts(
        &self,
        py: Python<'_>,
        word: &str,
        max_weight: Option<u64>,
        max_steps: usize,
        max_states: usize,
    ) -> PyResult<(String, Option<Vec<String>>)> {
        let w = self.word(word)?;
        let budget = self.budget(max_weight, max_steps, max_states);
        let ra = &self.doc.automaton;
        let v = py.detach(|| process::accepts(ra, &w, &budget)).map_err(err)?;
        let trace = v
            .witness()
            .map(|t| t.configs().map(ToString::to_string).collect());
        Ok((verdict_name(&v), trace))
    }

    /// `(word, verdict)` for every string up to `max_len`, shortest first.
    #[pyo3(signature = (max_len, max_weight = None))]
    fn enumerate(&self, py: Python<'_>, max_len: usize, max_weight: Option<u64>) -> PyResult<Vec<(String, String)>> {
        let budget = self.budget(max_weight, 10_000, 1_000_000);
        let ra = &self.doc.automaton;
        let table = py
            .detach(|| process::enumerate_language(ra, max_len, &budget))
            .map_err(err)?;
        Ok(table
            .iter()
            .map(|(w, v)| (format_word(w), verdict_name(v)))
            .collect())
    }

    /// Least weight bound under which `word` is accepted, or `None`.
    #[pyo3(signature = (word, cap = 1 << 16))]
    fn workspace(&self, py: Python<'_>, word: &str, cap: u64) -> PyResult<Option<u64>> {
        let w = self.word(word)?;
        let ra = &self.doc.automaton;
        let budget = SearchBudget::default();
        let res = py
            .detach(|| complexity::workspace(ra, &w, cap, &budget))
            .map_err(err)?;
        Ok(res.map(|(ws, _)| ws))
    }

    /// NFA for the k-bounded fragment, as `Nfa`.
    fn to_nfa(&self, k: u64) -> PyResult<PyNfa> {
        complexity::to_nfa(&self.doc.automaton, k, &SearchBudget::default())
            .map(|nfa| PyNfa {
                nfa,
                alphabet: self.doc.automaton.input_alphabet().clone(),
            })
            .map_err(err)
    }

    fn __repr__(&self) -> String {
        let ra = &self.doc.automaton;
        format!(
            "ReactionAutomaton({} symbols, {} reactions)",
            ra.background().len(),
            ra.reactions().len()
        )
    }
}

#[pyclass(name = "Nfa", module = "reaction_automata", frozen)]
struct PyNfa {
    nfa: complexity::Nfa,
    alphabet: std::collections::BTreeSet<Symbol>,
}

#[pymethods]
impl PyNfa {
    fn accepts(&self, word: &str) -> PyResult<bool> {
        let w = parse_word(word, &self.alphabet).map_err(err)?;
        Ok(self.nfa.accepts(&w))
    }

    #[getter]
    fn num_states(&self) -> usize {
        self.nfa.states.len()
    }

    fn to_dot(&self) -> String {
        self.nfa.to_dot()
    }
}

#[pyclass(name = "StackMachine", module = "reaction_automata", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyStackMachine(ra_core::StackMachine);

#[pymethods]
impl PyStackMachine {
    /// Parses the `.sm` text format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        io::parse_sm(text).map(PyStackMachine).map_err(err)
    }

    /// The bundled machine for `aⁿbⁿ$`.
    #[staticmethod]
    fn fixture() -> Self {
        PyStackMachine(fixtures::anbn_machine())
    }

    /// Violated restrictions; empty when the machine is restricted.
    fn validate(&self) -> Vec<String> {
        self.0.validate_restricted().iter().map(ToString::to_string).collect()
    }

    #[pyo3(signature = (word, max_steps = 10_000))]
    fn run(&self, word: &str, max_steps: usize) -> PyResult<String> {
        let w = parse_word(word, &self.0.input).map_err(err)?;
        let v = self.0.run(&w, max_steps).map_err(err)?;
        Ok(match v {
            MachineVerdict::Accepted => "accepted",
            MachineVerdict::Rejected => "rejected",
            MachineVerdict::Undecided => "undecided",
        }
        .into())
    }

    fn format(&self) -> String {
        io::format_sm(&self.0)
    }
}

/// Compiles a restricted two-stack machine. Returns the automaton and a map
/// from reaction label to category name.
#[pyfunction]
#[pyo3(signature = (machine, deterministic = false))]
fn compile(machine: &PyStackMachine, deterministic: bool) -> PyResult<(PyAutomaton, BTreeMap<String, String>)> {
    let out = if deterministic {
        compiler::compile_deterministic(&machine.0)
    } else {
        compiler::compile(&machine.0)
    }
    .map_err(err)?;
    let categories = out
        .category_index
        .iter()
        .map(|(l, c)| (l.clone(), c.to_string()))
        .collect();
    let doc = io::RaDocument {
        automaton: out.automaton,
        origin: Some("compiled".into()),
    };
    Ok((PyAutomaton { doc }, categories))
}

#[pymodule]
fn reaction_automata(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMultiset>()?;
    m.add_class::<PyAutomaton>()?;
    m.add_class::<PyNfa>()?;
    m.add_class::<PyStackMachine>()?;
    m.add_function(wrap_pyfunction!(stm, m)?)?;
    m.add_function(wrap_pyfunction!(compile, m)?)?;
    Ok(())
}
