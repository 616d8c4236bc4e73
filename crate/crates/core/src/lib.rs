//! Reaction automata: multiset-rewriting acceptors that read their input one
//! symbol per step and apply reactions in a maximally parallel manner.
//!
//! The crate covers the multiset and reaction semantics, interactive-process
//! search, restricted two-stack machines and their compilation into reaction
//! automata, workspace measurement with conversion of k-bounded automata into
//! NFAs, and the `.ra`/`.sm` text formats used by the `ra` command-line tool.

pub mod compiler;
pub mod complexity;
pub mod dot;
pub mod error;
pub mod fixtures;
pub mod io;
pub mod multiset;
pub mod process;
pub mod reactions;
pub mod stackmachine;
pub mod word;

pub use error::{Error, Result};
pub use multiset::{stm, Multiset, Symbol};
pub use process::{accepts, SearchBudget, Trace, Verdict};
pub use reactions::{Reaction, ReactionAutomaton, ReactionBag};
pub use stackmachine::StackMachine;
