//! Errors raised while building programs or checking their feasibility.

use automata::AutomataError;
use mrc_core::MrcError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TranslateError {
    /// A construction parameter is out of its legal range.
    #[error("invalid construction parameter: {0}")]
    Invalid(String),

    /// The construction would not fit in the configured space budget at the
    /// given input size. The asymptotic guarantee holds for large enough
    /// bounds; this reports that the concrete numbers do not.
    #[error("infeasible space: {0}")]
    InfeasibleSpace(String),

    /// A padded string fails the length arithmetic or has a non-zero pad.
    #[error("malformed padding: {0}")]
    MalformedPadding(String),

    #[error(transparent)]
    Automata(#[from] AutomataError),

    #[error(transparent)]
    Mrc(#[from] MrcError),
}
