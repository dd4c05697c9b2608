//! A deterministic bulk-synchronous engine and its cross-simulations with
//! the round-based map/shuffle/reduce engine.
//!
//! A machine here is `p` stateless processors running `R` rounds: each round
//! every processor reads its input piece (round 1) and inbox, computes one
//! step, and sends messages; the barrier then delivers every message to its
//! destination in canonical (sender, emission) order, uncharged. The run
//! accepts as soon as any processor raises its flag and rejects when the
//! rounds run out. Every run is metered against the same explicit polynomial
//! bounds the round engine uses, with messages in the role of pairs and
//! destinations in the role of keys.
//!
//! [`translate::mrc_to_bsp`] runs a round-based program on `p` processors at
//! exactly twice the declared rounds; [`translate::bsp_to_mrc`] runs a
//! barrier machine in the round engine at exactly the declared rounds.

pub mod engine;
pub mod error;
pub mod machine;
pub mod translate;

pub use engine::{run_bsp, BspOutcome, BspRoundSnapshot};
pub use error::BspError;
pub use machine::{piece_range, BspMachine, BspRoundCtx, BspStep, BspStepFn, Message};
pub use translate::{bsp_to_mrc, encode_pair, mrc_to_bsp, owner, parse_pair, POISON};
