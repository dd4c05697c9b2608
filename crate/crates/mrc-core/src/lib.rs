//! A resource-metered, deterministic engine for round-based
//! map/shuffle/reduce computation.
//!
//! A program runs `R` rounds over a multiset of key-value pairs: every round
//! applies a mapper to each pair independently, regroups the emitted pairs by
//! key (shuffle-and-sort, canonically ordered and never charged to any
//! processor), and applies a reducer to each key group independently.
//! Execution is schedule-independent by construction and every run produces
//! a [`ResourceReport`] metering keys, pairs, space, and steps per round
//! against explicit polynomial bounds with rational constants.

mod behavior;
mod engine;
mod error;
mod limits;
mod pair;
mod program;
mod report;

pub use behavior::{
    invoke_mapper, invoke_reducer, InvocationResult, MapperFn, ReducerFn, ReducerOutput,
    RoundBehavior, RoundInfo, ScratchMeter,
};
pub use engine::{
    run, run_round, sentinel_pair, RoundSnapshot, RoundState, RunOptions, RunOutcome, Schedule,
};
pub use error::MrcError;
pub use limits::{
    ceil_mul, ceil_mul_pow, ceil_pow, decimal_digits, log2_ceil, Enforcement, PolyBound,
    Rational, ResourceLimits,
};
pub use pair::{
    encode_input, shuffle_and_sort, InputEncoding, KeyGroup, KeyValuePair, PlacedPair,
};
pub use program::{Acceptance, MrcProgram};
pub use report::{
    BoundKind, Decision, Phase, ResourceReport, RoundMetrics, Verdict, Violation,
};
