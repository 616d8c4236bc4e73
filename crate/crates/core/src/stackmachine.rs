//! Restricted k-stack machines.
//!
//! A restricted machine is deterministic, reads its whole input with
//! non-λ-moves before making any λ-move, gives every stack its own alphabet
//! whose bottom symbol stays at the bottom, never empties a stack, and halts
//! as soon as it enters its single final state. Syntactic conditions are
//! checked by [`StackMachine::validate_restricted`]; the behavioural ones are
//! enforced while running by [`StackMachine::step`].

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::multiset::{validate_name, Symbol};
use crate::reactions::Diagnostic;

/// `label: δ(from, input, tops) = (to, replacements)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    pub label: String,
    pub from: String,
    /// `None` for a λ-move.
    pub input: Option<Symbol>,
    /// One top-of-stack symbol per stack.
    pub tops: Vec<String>,
    pub to: String,
    /// Replacement string per stack; element 0 becomes the new top.
    pub replace: Vec<Vec<String>>,
}

impl Rule {
    pub fn is_lambda(&self) -> bool {
        self.input.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StackMachine {
    pub states: BTreeSet<String>,
    pub input: BTreeSet<Symbol>,
    pub stack_alphabets: Vec<BTreeSet<String>>,
    pub rules: Vec<Rule>,
    pub initial_state: String,
    pub bottoms: Vec<String>,
    pub final_state: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MachineConfig {
    pub state: String,
    pub remaining: Vec<Symbol>,
    /// Stack contents, top first.
    pub stacks: Vec<Vec<String>>,
    /// Set once a λ-move has been made; a later input move is a violation.
    pub lambda_phase: bool,
}

impl fmt::Display for MachineConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]", self.state, crate::word::format_word(&self.remaining))?;
        for s in &self.stacks {
            write!(f, " {}", s.join(" "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HaltReason {
    Final,
    Stuck,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    Moved { rule: String, next: MachineConfig },
    Halted(HaltReason),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MachineVerdict {
    Accepted,
    Rejected,
    Undecided,
}

impl MachineVerdict {
    pub fn exit_code(self) -> i32 {
        match self {
            MachineVerdict::Accepted => 0,
            MachineVerdict::Rejected => 1,
            MachineVerdict::Undecided => 2,
        }
    }
}

impl fmt::Display for MachineVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MachineVerdict::Accepted => "accepted",
            MachineVerdict::Rejected => "rejected",
            MachineVerdict::Undecided => "undecided",
        })
    }
}

/// A complete run: configurations `c_0 … c_n` and the rule labels between them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MachineRun {
    pub verdict: MachineVerdict,
    pub configs: Vec<MachineConfig>,
    pub rules: Vec<String>,
}

const DETERMINISM: &str = "determinism";
const PHASES: &str = "i/ii: λ-moves only after all input moves";
const STACKS: &str = "iii: stacks never emptied";

impl StackMachine {
    pub fn k(&self) -> usize {
        self.stack_alphabets.len()
    }

    pub fn rule(&self, label: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.label == label)
    }

    /// Which stack alphabet `sym` belongs to.
    pub fn stack_of(&self, sym: &str) -> Option<usize> {
        self.stack_alphabets.iter().position(|g| g.contains(sym))
    }

    pub fn initial_config(&self, w: &[Symbol]) -> MachineConfig {
        MachineConfig {
            state: self.initial_state.clone(),
            remaining: w.to_vec(),
            stacks: self.bottoms.iter().map(|b| vec![b.clone()]).collect(),
            lambda_phase: false,
        }
    }

    /// Static checks of the restricted form.
    pub fn validate_restricted(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let k = self.k();
        if k == 0 {
            out.push(Diagnostic::new("stacks", "a machine needs at least one stack"));
        }
        for i in 0..k {
            for j in i + 1..k {
                let shared: Vec<&str> = self.stack_alphabets[i]
                    .intersection(&self.stack_alphabets[j])
                    .map(String::as_str)
                    .collect();
                if !shared.is_empty() {
                    out.push(Diagnostic::new(
                        "stacks",
                        format!(
                            "stack alphabets {} and {} are not disjoint: {}",
                            i + 1,
                            j + 1,
                            shared.join(" ")
                        ),
                    ));
                }
            }
        }
        if self.bottoms.len() != k {
            out.push(Diagnostic::new(
                "initial",
                format!("expected {k} bottom symbols, found {}", self.bottoms.len()),
            ));
        }
        for (i, z) in self.bottoms.iter().enumerate().take(k) {
            if !self.stack_alphabets[i].contains(z) {
                out.push(Diagnostic::new(
                    "initial",
                    format!("bottom symbol {z} is not in stack alphabet {}", i + 1),
                ));
            }
        }
        for (what, q) in [("initial", &self.initial_state), ("final", &self.final_state)] {
            if !self.states.contains(q) {
                out.push(Diagnostic::new(what, format!("state {q} is not declared")));
            }
        }

        let mut labels = HashSet::new();
        let mut by_key: HashMap<(&str, Option<&Symbol>, &[String]), &str> = HashMap::new();
        let mut lambda_keys: HashMap<(&str, &[String]), &str> = HashMap::new();
        let mut input_keys: HashMap<(&str, &[String]), &str> = HashMap::new();
        for r in &self.rules {
            let subject = format!("rule {}", r.label);
            if let Err(m) = validate_name(&r.label) {
                out.push(Diagnostic::new(&subject, format!("invalid label: {m}")));
            }
            if !labels.insert(r.label.as_str()) {
                out.push(Diagnostic::new(&subject, "duplicate label"));
            }
            for q in [&r.from, &r.to] {
                if !self.states.contains(q) {
                    out.push(Diagnostic::new(&subject, format!("state {q} is not declared")));
                }
            }
            if r.from == self.final_state {
                out.push(Diagnostic::new(
                    &subject,
                    "leaves the final state, where the machine halts",
                ));
            }
            if let Some(a) = &r.input {
                if !self.input.contains(a) {
                    out.push(Diagnostic::new(&subject, format!("input symbol {a} is not declared")));
                }
            }
            if r.tops.len() != k || r.replace.len() != k {
                out.push(Diagnostic::new(
                    &subject,
                    format!("expected {k} stack tops and {k} replacement strings"),
                ));
                continue;
            }
            for i in 0..k {
                self.check_stack_move(r, i, &subject, &mut out);
            }
            let key = (r.from.as_str(), r.input.as_ref(), r.tops.as_slice());
            if let Some(other) = by_key.insert(key, &r.label) {
                out.push(Diagnostic::new(
                    &subject,
                    format!("nondeterministic: same state, input and tops as rule {other}"),
                ));
            }
            let side = if r.is_lambda() { &mut lambda_keys } else { &mut input_keys };
            side.entry((r.from.as_str(), r.tops.as_slice()))
                .or_insert(&r.label);
        }
        for (key, lam) in &lambda_keys {
            if let Some(inp) = input_keys.get(key) {
                out.push(Diagnostic::new(
                    format!("rule {lam}"),
                    format!("λ-move and input move (rule {inp}) share state and stack tops"),
                ));
            }
        }
        out
    }

    fn check_stack_move(&self, r: &Rule, i: usize, subject: &str, out: &mut Vec<Diagnostic>) {
        let gamma = &self.stack_alphabets[i];
        let bottom = self.bottoms.get(i);
        let top = &r.tops[i];
        if !gamma.contains(top) {
            out.push(Diagnostic::new(
                subject,
                format!("top {top} is not in stack alphabet {}", i + 1),
            ));
        }
        let repl = &r.replace[i];
        for s in repl {
            if !gamma.contains(s) {
                out.push(Diagnostic::new(
                    subject,
                    format!("pushed symbol {s} is not in stack alphabet {}", i + 1),
                ));
            }
        }
        let Some(bottom) = bottom else { return };
        let bottom_at = repl.iter().position(|s| s == bottom);
        if top == bottom {
            if repl.last() != Some(bottom) || bottom_at != Some(repl.len() - 1) {
                out.push(Diagnostic::new(
                    subject,
                    format!("must keep bottom symbol {bottom} exactly once, at the bottom of stack {}", i + 1),
                ));
            }
        } else if bottom_at.is_some() {
            out.push(Diagnostic::new(
                subject,
                format!("pushes bottom symbol {bottom} above the bottom of stack {}", i + 1),
            ));
        }
    }

    /// Rules that could fire in `c`: input moves on the next symbol plus
    /// λ-moves on the current tops.
    pub fn applicable_rules(&self, c: &MachineConfig) -> Vec<&Rule> {
        let next = c.remaining.first();
        let tops: Vec<&String> = c.stacks.iter().filter_map(|s| s.first()).collect();
        self.rules
            .iter()
            .filter(|r| r.from == c.state)
            .filter(|r| r.tops.len() == tops.len() && r.tops.iter().zip(&tops).all(|(a, b)| a == *b))
            .filter(|r| match &r.input {
                None => true,
                Some(a) => Some(a) == next,
            })
            .collect()
    }

    /// One move, with the runtime monitor for the behavioural restrictions.
    pub fn step(&self, c: &MachineConfig) -> Result<StepOutcome> {
        if c.state == self.final_state {
            return Ok(StepOutcome::Halted(HaltReason::Final));
        }
        let rules = self.applicable_rules(c);
        let rule = match rules.as_slice() {
            [] => return Ok(StepOutcome::Halted(HaltReason::Stuck)),
            [r] => *r,
            many => {
                let names: Vec<&str> = many.iter().map(|r| r.label.as_str()).collect();
                return Err(Error::Restriction {
                    condition: DETERMINISM,
                    detail: format!("rules {} all apply in {c}", names.join(", ")),
                });
            }
        };
        if rule.input.is_some() && c.lambda_phase {
            return Err(Error::Restriction {
                condition: PHASES,
                detail: format!("input move {} after a λ-move", rule.label),
            });
        }
        let mut next = c.clone();
        next.state = rule.to.clone();
        if rule.input.is_some() {
            next.remaining.remove(0);
        } else {
            next.lambda_phase = true;
        }
        for (i, stack) in next.stacks.iter_mut().enumerate() {
            stack.splice(0..1, rule.replace[i].iter().cloned());
            if stack.is_empty() {
                return Err(Error::Restriction {
                    condition: STACKS,
                    detail: format!("rule {} empties stack {}", rule.label, i + 1),
                });
            }
        }
        Ok(StepOutcome::Moved {
            rule: rule.label.clone(),
            next,
        })
    }

    /// Runs on `w` for at most `max_steps` moves. Accepts iff the final state
    /// is entered with the whole input consumed.
    pub fn run_trace(&self, w: &[Symbol], max_steps: usize) -> Result<MachineRun> {
        let mut run = MachineRun {
            verdict: MachineVerdict::Undecided,
            configs: vec![self.initial_config(w)],
            rules: Vec::new(),
        };
        loop {
            let c = run.configs.last().expect("non-empty");
            if c.state == self.final_state {
                run.verdict = if c.remaining.is_empty() {
                    MachineVerdict::Accepted
                } else {
                    MachineVerdict::Rejected
                };
                return Ok(run);
            }
            if run.rules.len() >= max_steps {
                return Ok(run);
            }
            match self.step(c)? {
                StepOutcome::Halted(_) => {
                    run.verdict = MachineVerdict::Rejected;
                    return Ok(run);
                }
                StepOutcome::Moved { rule, next } => {
                    run.rules.push(rule);
                    run.configs.push(next);
                }
            }
        }
    }

    pub fn run(&self, w: &[Symbol], max_steps: usize) -> Result<MachineVerdict> {
        Ok(self.run_trace(w, max_steps)?.verdict)
    }
}
