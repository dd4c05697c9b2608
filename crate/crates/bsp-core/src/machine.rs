//! Barrier-synchronous machines: `p` processors that compute, exchange
//! point-to-point messages at a round barrier, and share nothing else.
//!
//! Statelessness is structural: a processor's behaviour is a pure function
//! of (processor index, round, n, this round's input), so nothing survives
//! a round except what was explicitly sent — including to oneself.

use std::sync::Arc;

use mrc_core::{ResourceLimits, ScratchMeter};

use crate::error::BspError;

/// One point-to-point message: a 1-based destination processor and an opaque
/// payload. Payload bytes are charged to the sender's space in the round
/// they are produced and to the receiver's in the round they arrive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    pub dest: usize,
    pub payload: Vec<u8>,
}

impl Message {
    pub fn new(dest: usize, payload: impl Into<Vec<u8>>) -> Self {
        Message {
            dest,
            payload: payload.into(),
        }
    }
}

/// What one processor produces in one round: outgoing messages and an
/// accept flag. There is no reject flag — a run that never accepts rejects
/// when its rounds run out.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BspStep {
    pub messages: Vec<Message>,
    pub accept: bool,
}

impl BspStep {
    pub fn send(messages: Vec<Message>) -> Self {
        BspStep {
            messages,
            accept: false,
        }
    }

    pub fn accept() -> Self {
        BspStep {
            messages: Vec::new(),
            accept: true,
        }
    }

    pub fn idle() -> Self {
        BspStep::default()
    }
}

/// Everything a processor may read in one round. In round 1 `piece` holds
/// the processor's slice of the input and `inbox` is empty; afterwards
/// `piece` is empty and `inbox` holds the payloads delivered at the barrier,
/// in canonical (sender index, emission index) order.
#[derive(Debug, Clone, Copy)]
pub struct BspRoundCtx<'a> {
    /// 1-based processor index.
    pub processor: usize,
    /// 1-based round number.
    pub round: u64,
    /// Input length, shared by all processors.
    pub n: usize,
    pub piece: &'a [u8],
    pub inbox: &'a [Vec<u8>],
}

/// A processor's round computation. Errors are contract failures, not
/// verdicts. The same function serves every processor and round — uniform
/// by construction — dispatching on the context it is given.
pub type BspStepFn =
    Arc<dyn Fn(&BspRoundCtx<'_>, &mut ScratchMeter) -> Result<BspStep, String> + Send + Sync>;

/// A deterministic barrier-synchronous machine.
#[derive(Clone)]
pub struct BspMachine {
    pub name: String,
    /// Processor count; validated against `limits` at run time, since the
    /// admissible count scales with the input (`p ≤ keys_constant·⌈n^c⌉`).
    pub p: usize,
    pub rounds: u64,
    pub behavior: BspStepFn,
    pub limits: ResourceLimits,
}

impl std::fmt::Debug for BspMachine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BspMachine")
            .field("name", &self.name)
            .field("p", &self.p)
            .field("rounds", &self.rounds)
            .field("limits", &self.limits)
            .finish()
    }
}

impl BspMachine {
    /// Structural checks plus the processor-count bound for this input size.
    pub fn validate(&self, n: usize) -> Result<(), BspError> {
        self.limits
            .validate()
            .map_err(|e| BspError::InvalidMachine(e.to_string()))?;
        if self.p == 0 {
            return Err(BspError::InvalidMachine(
                "machine needs at least one processor".into(),
            ));
        }
        if self.rounds == 0 {
            return Err(BspError::InvalidMachine(
                "machine needs at least one round".into(),
            ));
        }
        let cap = self.limits.keys_per_invocation(n);
        if self.p as u64 > cap {
            return Err(BspError::InvalidMachine(format!(
                "{} processors exceed the admissible count {cap} for n = {n}",
                self.p
            )));
        }
        Ok(())
    }
}

/// The input slice owned by 1-based processor `j` when `n` bytes are split
/// into `p` equal-sized pieces: every piece gets `⌊n/p⌋` bytes and the first
/// `n mod p` processors get one extra. Returns (1-based start position,
/// length); an empty piece has length 0.
pub fn piece_range(n: usize, p: usize, j: usize) -> (usize, usize) {
    debug_assert!(j >= 1 && j <= p);
    let base = n / p;
    let extra = n % p;
    let len = base + usize::from(j <= extra);
    let start = (j - 1) * base + (j - 1).min(extra) + 1;
    (start, len)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pieces_tile_the_input_with_front_loaded_extras() {
        for n in 0usize..=40 {
            for p in 1usize..=9 {
                let mut covered = 0usize;
                let mut next_start = 1usize;
                for j in 1..=p {
                    let (start, len) = piece_range(n, p, j);
                    assert_eq!(start, next_start, "n={n} p={p} j={j}");
                    next_start = start + len;
                    covered += len;
                    // Equal sizes up to one extra symbol.
                    assert!(len >= n / p && len <= n / p + 1);
                }
                assert_eq!(covered, n, "n={n} p={p}");
            }
        }
        assert_eq!(piece_range(7, 3, 1), (1, 3));
        assert_eq!(piece_range(7, 3, 2), (4, 2));
        assert_eq!(piece_range(7, 3, 3), (6, 2));
    }

    #[test]
    fn validation_rejects_oversized_processor_counts() {
        let idle: BspStepFn = Arc::new(|_, _| Ok(BspStep::idle()));
        let machine = BspMachine {
            name: "idle".into(),
            p: 100,
            rounds: 1,
            behavior: idle,
            limits: ResourceLimits::default(),
        };
        // Default cap is 4·⌈n^{1/2}⌉ = 8 at n = 4.
        assert!(machine.validate(4).is_err());
        assert!(machine.validate(1000).is_ok());
        let zero_p = BspMachine { p: 0, ..machine.clone() };
        assert!(zero_p.validate(4).is_err());
        let zero_rounds = BspMachine { rounds: 0, ..machine };
        assert!(zero_rounds.validate(1000).is_err());
    }
}
