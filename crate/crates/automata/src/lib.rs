//! Machine engines used both as execution oracles and as compiler inputs:
//!
//! * [`Dfa`] — deterministic finite automata over a byte alphabet, plus the
//!   per-block transition tables that summarize a DFA's effect on a substring.
//! * [`Tm`] — Turing machines with a two-way read-only input tape (delimited
//!   by end-markers) and a work tape of exactly `s` cells, plus the boundary
//!   functions that summarize a machine's behaviour across a block of input.
//! * [`TispMachine`] — single-tape machines with explicit time and space
//!   budgets, reporting exact step and cell counts.
//!
//! All engines are deterministic and total: every run ends in an explicit
//! outcome (accept, reject, diverged, or a budget exhaustion), never a hang.

mod dfa;
mod error;
mod tisp;
mod tm;

pub mod sampling;

pub use dfa::{dfa_transition_table, run_dfa, Dfa, StateId, TransitionTable};
pub use error::AutomataError;
pub use tisp::{run_tisp, TispMachine, TispOutcome, TispRun, TispTransition};
pub use tm::{
    eliminate_stay_moves, run_tm, run_tm_with_budget, tm_boundary_function, BlockRole,
    BoundaryOutcome, BoundaryTable, BudgetedOutcome, ConfigSpace, InputSymbol, Move, Side, Tm,
    TmOutcome, TmRun, TmTransition, WorkConfig,
};
