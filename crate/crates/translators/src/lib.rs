//! Compilers between machine models, built so that every resource claim is
//! checkable by running both sides.
//!
//! Each entry point takes a machine (or decision procedure) of one model and
//! produces an executable program of another, preserving the accept/reject
//! verdict on every input while meeting stated space, time, key, and round
//! budgets:
//!
//! - [`compile_dfa_to_mrc`] — finite automata become 2-round map/reduce
//!   programs: per-block transition tables in round one, composition in
//!   round two. The block exponent is a knob trading reducer memory
//!   against table-collection memory.
//! - [`compile_sublog_tm_to_mrc`] — work-tape machines with very small
//!   work space become 2-round programs via per-block boundary-crossing
//!   tables; [`tm_collector_feasibility`] predicts when the collector's
//!   table set fits the space budget.
//! - [`compile_tisp_to_mrc`] — time-and-space bounded single-tape machines
//!   become one-transition-per-round programs over tape segments, with
//!   round count equal to the time budget ([`tisp_space_feasibility`]
//!   checks the segment plan fits).
//! - [`simulate_mrc_sequential`] — the reverse direction: any program runs
//!   on one thread with an explicit time account
//!   ([`sequential_envelope`]) covering every mapper, reducer, and sort.
//! - [`make_padded_decider`] — wraps a linear-space decision procedure so
//!   it decides the quadratically padded language within a square-root
//!   space budget.
//! - [`build_unary_nonuniform`] — per-input-length programs whose round
//!   structure encodes an arbitrary advice table for unary inputs.

pub mod block;
pub mod error;
pub mod padding;
pub mod regular;
pub mod sequential;
pub mod sublog;
pub mod tisp;
pub mod unary;
mod wire;

pub use block::BlockPlan;
pub use error::TranslateError;
pub use padding::{check_padding, make_padded_decider, pad_string, unpad_string, BaseDecider};
pub use regular::compile_dfa_to_mrc;
pub use sequential::{
    sequential_envelope, simulate_mrc_sequential, RoundAccounting, SequentialAccounting,
    SequentialRun,
};
pub use sublog::{compile_sublog_tm_to_mrc, tm_collector_feasibility};
pub use tisp::{compile_tisp_to_mrc, tisp_space_feasibility, SPACE_HEADROOM};
pub use unary::{build_unary_nonuniform, UnaryOracle};
