//! Compilation of restricted two-stack machines into reaction automata.
//!
//! A machine configuration `(p, α, β)` reached after `k` moves is encoded as
//! the multiset `p · stm(α) · stm(β) · r`, where `r` labels the rule guessed
//! for the next move. Odd steps use the hatted copies of states and stack
//! symbols, so a configuration that mixes the two copies can never proceed.
//! Each move is simulated in one maximally parallel step: the rule reaction
//! rewrites the state and the stack tops, and doubling reactions shift every
//! deeper stack symbol by the length of the pushed string.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::multiset::{stm, Multiset, Symbol};
use crate::reactions::{Reaction, ReactionAutomaton};
use crate::stackmachine::{Rule, StackMachine};

/// Default weight budget for running compiled automata; stack contents are
/// stored in binary, so configuration weight doubles with stack height.
pub const COMPILED_MAX_WEIGHT: u64 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    A0,
    Aa,
    AaHat,
    ALambda,
    ALambdaHat,
    AX,
    AXHat,
    AY,
    AYHat,
    Af,
    AfHat,
}

impl Category {
    pub const ALL: [Category; 11] = [
        Category::A0,
        Category::Aa,
        Category::AaHat,
        Category::ALambda,
        Category::ALambdaHat,
        Category::AX,
        Category::AXHat,
        Category::AY,
        Category::AYHat,
        Category::Af,
        Category::AfHat,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Category::A0 => "A_0",
            Category::Aa => "A_a",
            Category::AaHat => "A_a^",
            Category::ALambda => "A_lambda",
            Category::ALambdaHat => "A_lambda^",
            Category::AX => "A_X",
            Category::AXHat => "A_X^",
            Category::AY => "A_Y",
            Category::AYHat => "A_Y^",
            Category::Af => "A_f",
            Category::AfHat => "A_f^",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Category::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown category `{s}`")))
    }
}

/// Machine entities that receive a symbol in the compiled automaton.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Entity {
    State(String),
    Input(String),
    /// A symbol of stack `i` (0-based).
    Stack(usize, String),
    Label(String),
}

/// Names chosen for machine entities. Hatted copies reuse the plain name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolTable {
    forward: BTreeMap<Entity, Symbol>,
    reverse: BTreeMap<Symbol, Entity>,
    final_prime: Symbol,
}

impl SymbolTable {
    fn new(m: &StackMachine) -> Self {
        let mut taken: HashSet<String> = HashSet::new();
        let mut forward = BTreeMap::new();
        let claim = |base: &str, taken: &mut HashSet<String>| -> Symbol {
            let mut name = base.to_string();
            let mut n = 0;
            while taken.contains(&name) {
                n += 1;
                name = format!("{base}_{n}");
            }
            taken.insert(name.clone());
            Symbol::new(&name)
        };
        for a in &m.input {
            forward.insert(Entity::Input(a.to_string()), claim(a.name(), &mut taken));
        }
        for q in &m.states {
            forward.insert(Entity::State(q.clone()), claim(q, &mut taken));
        }
        for (i, g) in m.stack_alphabets.iter().enumerate() {
            for x in g {
                forward.insert(Entity::Stack(i, x.clone()), claim(x, &mut taken));
            }
        }
        for r in &m.rules {
            forward.insert(Entity::Label(r.label.clone()), claim(&r.label, &mut taken));
        }
        let final_prime = claim(&format!("{}'", m.final_state), &mut taken);
        let reverse = forward.iter().map(|(e, s)| (s.clone(), e.clone())).collect();
        SymbolTable {
            forward,
            reverse,
            final_prime,
        }
    }

    pub fn symbol(&self, entity: &Entity) -> Option<&Symbol> {
        self.forward.get(entity)
    }

    /// The entity behind `sym`, ignoring its hat.
    pub fn entity(&self, sym: &Symbol) -> Option<&Entity> {
        self.reverse.get(&sym.plain())
    }

    pub fn final_prime(&self) -> &Symbol {
        &self.final_prime
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Entity, &Symbol)> {
        self.forward.iter()
    }

    fn get(&self, entity: Entity) -> Symbol {
        self.forward[&entity].clone()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompilationOutput {
    pub automaton: ReactionAutomaton,
    pub symbol_table: SymbolTable,
    pub category_index: BTreeMap<String, Category>,
    /// Built with hatted rule labels on odd steps.
    pub deterministic: bool,
}

impl CompilationOutput {
    pub fn category_counts(&self) -> BTreeMap<Category, usize> {
        let mut out = BTreeMap::new();
        for c in self.category_index.values() {
            *out.entry(*c).or_insert(0) += 1;
        }
        out
    }

    /// One `label<TAB>category` line per reaction.
    pub fn format_categories(&self) -> String {
        self.category_index
            .iter()
            .map(|(l, c)| format!("{l}\t{c}\n"))
            .collect()
    }

    /// The multiset encoding machine configuration `(state, stacks)` with
    /// pending rule `label`, in the copy selected by `parity`.
    pub fn encode(
        &self,
        state: &str,
        stacks: &[Vec<String>],
        label: Option<&str>,
        parity: Parity,
    ) -> Result<Multiset> {
        let t = &self.symbol_table;
        let hat = |s: Symbol| if parity == Parity::Odd { s.hat() } else { s };
        let lookup = |e: Entity| {
            t.symbol(&e)
                .cloned()
                .ok_or_else(|| Error::Compile(format!("no symbol for {e:?}")))
        };
        let mut d = Multiset::singleton(hat(lookup(Entity::State(state.into()))?));
        for (i, stack) in stacks.iter().enumerate() {
            let syms: Vec<Symbol> = stack
                .iter()
                .map(|x| lookup(Entity::Stack(i, x.clone())).map(hat))
                .collect::<Result<_>>()?;
            d.add_all(&stm(&syms)?)?;
        }
        if let Some(r) = label {
            let r = lookup(Entity::Label(r.into()))?;
            let r = if self.deterministic { hat(r) } else { r };
            d.add(&r, 1)?;
        }
        Ok(d)
    }
}

pub fn compile(m: &StackMachine) -> Result<CompilationOutput> {
    build(m, false)
}

/// Variant whose output satisfies [`ReactionAutomaton::is_deterministic`]:
/// the pending label alternates between plain and hatted copies, and each
/// rule reaction is inhibited by the label copy it produces.
pub fn compile_deterministic(m: &StackMachine) -> Result<CompilationOutput> {
    build(m, true)
}

struct Builder<'a> {
    m: &'a StackMachine,
    t: SymbolTable,
    det: bool,
    reactions: Vec<Reaction>,
    categories: BTreeMap<String, Category>,
    labels: HashSet<String>,
}

impl Builder<'_> {
    fn state(&self, p: &str, hat: bool) -> Symbol {
        hatted(self.t.get(Entity::State(p.into())), hat)
    }

    fn stack_sym(&self, i: usize, x: &str, hat: bool) -> Symbol {
        hatted(self.t.get(Entity::Stack(i, x.into())), hat)
    }

    fn label(&self, r: &str, hat: bool) -> Symbol {
        hatted(self.t.get(Entity::Label(r.into())), hat)
    }

    fn all_states(&self, hat: bool) -> BTreeSet<Symbol> {
        self.m.states.iter().map(|q| self.state(q, hat)).collect()
    }

    fn all_stack(&self, hat: bool) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        for (i, g) in self.m.stack_alphabets.iter().enumerate() {
            out.extend(g.iter().map(|x| self.stack_sym(i, x, hat)));
        }
        out
    }

    fn all_labels(&self, hat: bool) -> BTreeSet<Symbol> {
        self.m.rules.iter().map(|r| self.label(&r.label, hat)).collect()
    }

    fn sigma(&self) -> BTreeSet<Symbol> {
        self.m
            .input
            .iter()
            .map(|a| self.t.get(Entity::Input(a.to_string())))
            .collect()
    }

    fn push(&mut self, base: String, cat: Category, reactant: Multiset, inhibitor: BTreeSet<Symbol>, product: Multiset) {
        let mut label = base.clone();
        let mut n = 0;
        while self.labels.contains(&label) {
            n += 1;
            label = format!("{base}_{n}");
        }
        self.labels.insert(label.clone());
        self.categories.insert(label.clone(), cat);
        self.reactions.push(Reaction {
            label,
            reactant,
            inhibitor,
            product,
        });
    }

    /// `q · stm(x) · stm(y) · r'` in the copy given by `hat`.
    fn rule_product(&self, rule: &Rule, hat: bool, next: &Symbol) -> Result<Multiset> {
        let mut d = Multiset::singleton(self.state(&rule.to, hat));
        for (i, pushed) in rule.replace.iter().enumerate() {
            let syms: Vec<Symbol> = pushed.iter().map(|x| self.stack_sym(i, x, hat)).collect();
            d.add_all(&stm(&syms)?)?;
        }
        d.add(next, 1)?;
        Ok(d)
    }

    /// `p · a · X_i · Y_j · r` in the copy given by `hat`.
    fn rule_reactant(&self, rule: &Rule, hat: bool, with_label: bool) -> Result<Multiset> {
        let mut d = Multiset::singleton(self.state(&rule.from, hat));
        if let Some(a) = &rule.input {
            d.add(&self.t.get(Entity::Input(a.to_string())), 1)?;
        }
        for (i, top) in rule.tops.iter().enumerate() {
            d.add(&self.stack_sym(i, top, hat), 1)?;
        }
        if with_label {
            let r = self.label(&rule.label, hat && self.det);
            d.add(&r, 1)?;
        }
        Ok(d)
    }

    fn rule_reactions(&mut self) -> Result<()> {
        let m = self.m;
        let lab = self.all_labels(false);
        let sigma = self.sigma();
        let gamma = self.all_stack(false);
        let gamma_hat = self.all_stack(true);
        let initial_tops = [m.bottoms[0].clone(), m.bottoms[1].clone()];
        for rule in &m.rules {
            let r = self.t.get(Entity::Label(rule.label.clone())).to_string();
            let is_initial = rule.input.is_some() && rule.from == m.initial_state && rule.tops == initial_tops;
            for follower in &m.rules {
                let r2 = self.t.get(Entity::Label(follower.label.clone())).to_string();
                // Label produced on the even-to-odd side, and on the odd-to-even side.
                let up = self.label(&follower.label, self.det);
                let down = self.label(&follower.label, false);
                let det = self.det;
                let with = |base: &BTreeSet<Symbol>, s: &Symbol| {
                    let mut i = base.clone();
                    if det {
                        i.insert(s.clone());
                    }
                    i
                };
                if is_initial {
                    self.push(
                        format!("a0.{r}.{r2}"),
                        Category::A0,
                        self.rule_reactant(rule, false, false)?,
                        with(&lab, &up),
                        self.rule_product(rule, true, &up)?,
                    );
                }
                let (plain_cat, hat_cat, prefix, mut plain_inh, mut hat_inh) = match rule.input {
                    Some(_) => (Category::Aa, Category::AaHat, "a", gamma_hat.clone(), gamma.clone()),
                    None => {
                        let mut p = sigma.clone();
                        p.extend(gamma_hat.iter().cloned());
                        let mut h = sigma.clone();
                        h.extend(gamma.iter().cloned());
                        (Category::ALambda, Category::ALambdaHat, "l", p, h)
                    }
                };
                plain_inh = with(&plain_inh, &up);
                hat_inh = with(&hat_inh, &down);
                self.push(
                    format!("a{prefix}.{r}.{r2}"),
                    plain_cat,
                    self.rule_reactant(rule, false, true)?,
                    plain_inh,
                    self.rule_product(rule, true, &up)?,
                );
                self.push(
                    format!("ha{prefix}.{r}.{r2}"),
                    hat_cat,
                    self.rule_reactant(rule, true, true)?,
                    hat_inh,
                    self.rule_product(rule, false, &down)?,
                );
            }
        }
        Ok(())
    }

    fn doubling_reactions(&mut self) -> Result<()> {
        let m = self.m;
        let fp = self.t.final_prime().clone();
        for (i, g) in m.stack_alphabets.iter().enumerate() {
            let (cat, hat_cat, prefix) = if i == 0 {
                (Category::AX, Category::AXHat, "x")
            } else {
                (Category::AY, Category::AYHat, "y")
            };
            for x in g {
                for rule in &m.rules {
                    let r = self.t.get(Entity::Label(rule.label.clone()));
                    let shift = u32::try_from(rule.replace[i].len())
                        .ok()
                        .and_then(|n| 1u64.checked_shl(n))
                        .filter(|&v| v != 0 && rule.replace[i].len() < 64)
                        .ok_or_else(|| Error::Compile(format!("rule {} pushes too many symbols", rule.label)))?;
                    for hat in [false, true] {
                        let mut inh = self.all_states(!hat);
                        inh.extend(self.all_stack(!hat));
                        let label_hat = self.det && hat;
                        inh.extend(self.all_labels(label_hat).into_iter().filter(|l| *l != hatted(r.clone(), label_hat)));
                        inh.insert(fp.clone());
                        let mut reactant = Multiset::new();
                        reactant.add(&self.stack_sym(i, x, hat), 2)?;
                        let mut product = Multiset::new();
                        product.add(&self.stack_sym(i, x, !hat), shift)?;
                        let name = self.stack_sym(i, x, false);
                        self.push(
                            format!("{}{prefix}.{name}.{r}", if hat { "h" } else { "" }),
                            if hat { hat_cat } else { cat },
                            reactant,
                            inh,
                            product,
                        );
                    }
                }
            }
        }
        Ok(())
    }

    fn final_reactions(&mut self) {
        let fp = self.t.final_prime().clone();
        for hat in [false, true] {
            let f = self.state(&self.m.final_state, hat);
            self.push(
                if hat { "hf".into() } else { "f".into() },
                if hat { Category::AfHat } else { Category::Af },
                Multiset::singleton(f),
                self.all_stack(!hat),
                Multiset::singleton(fp.clone()),
            );
        }
    }
}

fn hatted(s: Symbol, hat: bool) -> Symbol {
    if hat {
        s.hat()
    } else {
        s
    }
}

fn build(m: &StackMachine, det: bool) -> Result<CompilationOutput> {
    if m.k() != 2 {
        return Err(Error::Compile(format!(
            "only two-stack machines can be compiled, this one has {} stacks",
            m.k()
        )));
    }
    let diags = m.validate_restricted();
    if !diags.is_empty() {
        return Err(Error::Invalid(diags.iter().map(ToString::to_string).collect()));
    }
    let mut b = Builder {
        m,
        t: SymbolTable::new(m),
        det,
        reactions: Vec::new(),
        categories: BTreeMap::new(),
        labels: HashSet::new(),
    };
    b.rule_reactions()?;
    b.doubling_reactions()?;
    b.final_reactions();

    let mut background = b.all_states(false);
    background.extend(b.all_states(true));
    background.extend(b.sigma());
    background.extend(b.all_stack(false));
    background.extend(b.all_stack(true));
    background.extend(b.all_labels(false));
    if det {
        background.extend(b.all_labels(true));
    }
    background.insert(b.t.final_prime().clone());

    let mut initial = Multiset::singleton(b.state(&m.initial_state, false));
    for (i, z) in m.bottoms.iter().enumerate() {
        initial.add(&b.stack_sym(i, z, false), 1)?;
    }
    let sigma = b.sigma();
    let final_prime = b.t.final_prime().clone();
    let automaton = ReactionAutomaton::new(background, sigma, b.reactions, initial, final_prime)?;
    Ok(CompilationOutput {
        automaton,
        symbol_table: b.t,
        category_index: b.categories,
        deterministic: det,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// A compiled-automaton configuration read back as a machine configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConfigView {
    Machine {
        state: String,
        /// Stack contents, top first, in machine names.
        stacks: Vec<Vec<String>>,
        /// The rule guessed for the next move; absent only initially.
        label: Option<String>,
        parity: Parity,
    },
    /// Contains the accepting marker.
    Accepting,
    /// Not the encoding of any machine configuration; no accepting
    /// continuation exists.
    Undecodable(String),
}

impl fmt::Display for ConfigView {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigView::Machine {
                state,
                stacks,
                label,
                parity,
            } => {
                write!(f, "{state}")?;
                for s in stacks {
                    write!(f, " [{}]", s.join(" "))?;
                }
                if let Some(r) = label {
                    write!(f, " next {r}")?;
                }
                write!(f, " ({parity})")
            }
            ConfigView::Accepting => f.write_str("accepting"),
            ConfigView::Undecodable(why) => write!(f, "trap: {why}"),
        }
    }
}

/// Decodes `d` by inverting the binary stack encoding.
pub fn explain_config(out: &CompilationOutput, d: &Multiset) -> ConfigView {
    let t = &out.symbol_table;
    if d.contains(t.final_prime()) {
        return ConfigView::Accepting;
    }
    let trap = |why: String| ConfigView::Undecodable(why);
    let mut states = Vec::new();
    let mut labels = Vec::new();
    let k = t
        .iter()
        .filter_map(|(e, _)| match e {
            Entity::Stack(i, _) => Some(i + 1),
            _ => None,
        })
        .max()
        .unwrap_or(0);
    let mut stacks: Vec<Vec<(String, u64, bool)>> = vec![Vec::new(); k];
    for (sym, n) in d.iter() {
        match t.entity(sym) {
            None => return trap(format!("{sym} is not a symbol of the construction")),
            Some(Entity::Input(a)) => return trap(format!("unconsumed input symbol {a}")),
            Some(Entity::State(q)) => states.push((q.clone(), n, sym.is_hat())),
            Some(Entity::Label(r)) => labels.push((r.clone(), n, sym.is_hat())),
            Some(Entity::Stack(i, x)) => stacks[*i].push((x.clone(), n, sym.is_hat())),
        }
    }
    let (state, hat) = match states.as_slice() {
        [(q, 1, hat)] => (q.clone(), *hat),
        [] => return trap("no state symbol".into()),
        _ => return trap("more than one state symbol".into()),
    };
    let parity = if hat { Parity::Odd } else { Parity::Even };
    if stacks.iter().flatten().any(|(_, _, h)| *h != hat) {
        return trap("mixed hatted and plain stack symbols".into());
    }
    let label = match labels.as_slice() {
        [] => None,
        [(r, 1, h)] if *h == (hat && out.deterministic) => Some(r.clone()),
        [(r, 1, _)] => return trap(format!("pending label {r} has the wrong parity")),
        _ => return trap("more than one pending label".into()),
    };
    let mut decoded = Vec::with_capacity(k);
    for (i, counts) in stacks.iter().enumerate() {
        match unstm(counts) {
            Some(s) => decoded.push(s),
            None => return trap(format!("stack {} is not a binary position encoding", i + 1)),
        }
    }
    ConfigView::Machine {
        state,
        stacks: decoded,
        label,
        parity,
    }
}

/// Inverts the encoding giving the i-th symbol 2^(i-1) copies.
fn unstm(counts: &[(String, u64, bool)]) -> Option<Vec<String>> {
    let total = counts.iter().try_fold(0u64, |acc, (_, n, _)| acc.checked_add(*n))?;
    let union = counts.iter().fold(0u64, |acc, (_, n, _)| acc | n);
    if union != total || total.checked_add(1).is_none_or(|t| !t.is_power_of_two()) {
        return None;
    }
    let height = (total + 1).trailing_zeros();
    let out = (0..height)
        .map(|bit| {
            counts
                .iter()
                .find(|(_, n, _)| n >> bit & 1 == 1)
                .map(|(x, _, _)| x.clone())
                .expect("bits partition the positions")
        })
        .collect();
    Some(out)
}
