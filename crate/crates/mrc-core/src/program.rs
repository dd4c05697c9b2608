//! Program definition: round count, behaviour, limits, acceptance.

use crate::behavior::RoundBehavior;
use crate::error::MrcError;
use crate::limits::{decimal_digits, ResourceLimits};

/// How a run's verdict is read off.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Acceptance {
    /// Accept iff some reducer raises the accept flag in some round (the
    /// run then stops early; an explicit reject flag also stops it).
    AcceptState,
    /// Accept iff the final round's output is empty; flags are ignored and
    /// all rounds run.
    EmptyFinalRound,
}

/// An R-round program: one behaviour drives every round, parameterized on
/// the round number.
#[derive(Debug, Clone)]
pub struct MrcProgram {
    pub rounds: u64,
    pub behavior: RoundBehavior,
    pub limits: ResourceLimits,
    pub acceptance: Acceptance,
}

impl MrcProgram {
    /// Structural validation for a given input size. A program whose round
    /// count cannot even be written down inside the per-processor space
    /// budget is unusable: invocations could not know which round they are
    /// in.
    pub fn validate(&self, n: usize) -> Result<(), MrcError> {
        if self.rounds == 0 {
            return Err(MrcError::InvalidProgram(
                "a program needs at least one round".into(),
            ));
        }
        self.limits.validate()?;
        let digits = decimal_digits(self.rounds) as u64;
        let space = self.limits.space_bytes(n);
        if digits > space {
            return Err(MrcError::InvalidProgram(format!(
                "round count {} needs {digits} digits but the space budget is {space} bytes",
                self.rounds
            )));
        }
        Ok(())
    }
}
