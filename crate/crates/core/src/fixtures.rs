//! Bundled example automata and the two-stack fixture machine.

use crate::io::{parse_ra, parse_sm};
use crate::reactions::ReactionAutomaton;
use crate::stackmachine::StackMachine;

pub const FIG1_TEXT: &str = include_str!("../fixtures/fig1_anbn.ra");
pub const EX1_TEXT: &str = include_str!("../fixtures/ex1_reactions.ra");
pub const EX2_TEXT: &str = include_str!("../fixtures/ex2_pow2.ra");
pub const EX3_TEXT: &str = include_str!("../fixtures/ex3_anbncn.ra");
pub const EX4_TEXT: &str = include_str!("../fixtures/ex4_ambmcndn.ra");
pub const ODD_A_TEXT: &str = include_str!("../fixtures/odd_a.ra");
pub const AB_STAR_TEXT: &str = include_str!("../fixtures/ab_star.ra");
pub const ANBN_SM_TEXT: &str = include_str!("../fixtures/anbn.sm");

fn load(text: &str) -> ReactionAutomaton {
    parse_ra(text).expect("bundled fixture parses")
}

/// `{aⁿbⁿ | n ≥ 0}`.
pub fn fig1() -> ReactionAutomaton {
    load(FIG1_TEXT)
}

/// Three reactions over `{a, …, e}` with no input.
pub fn example1() -> ReactionAutomaton {
    load(EX1_TEXT)
}

/// `{a^(2ⁿ) | n ≥ 1}`.
pub fn example2() -> ReactionAutomaton {
    load(EX2_TEXT)
}

/// `{aⁿbⁿcⁿ | n ≥ 0}`.
pub fn example3() -> ReactionAutomaton {
    load(EX3_TEXT)
}

/// `{aᵐbᵐcⁿdⁿ | m, n ≥ 0}`.
pub fn example4() -> ReactionAutomaton {
    load(EX4_TEXT)
}

/// Odd-length strings over `{a}`; 2-bounded.
pub fn odd_a() -> ReactionAutomaton {
    load(ODD_A_TEXT)
}

/// `(ab)*`; 1-bounded.
pub fn ab_star() -> ReactionAutomaton {
    load(AB_STAR_TEXT)
}

/// Restricted two-stack machine for `{aⁿbⁿ$ | n ≥ 0}`.
pub fn anbn_machine() -> StackMachine {
    parse_sm(ANBN_SM_TEXT).expect("bundled fixture parses")
}
