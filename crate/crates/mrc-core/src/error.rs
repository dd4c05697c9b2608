use thiserror::Error;

/// Errors raised by program validation and round execution. Resource
/// violations are not errors — they are a run verdict — but a behaviour that
/// itself fails (an interpreted machine running out of its step budget,
/// emitting unparseable output, or being handed pairs it cannot encode) is.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MrcError {
    /// The program is structurally unusable: zero rounds, limits outside
    /// their legal ranges, or a round count that cannot even be stored in
    /// the per-processor space budget.
    #[error("invalid program: {0}")]
    InvalidProgram(String),

    /// The input encoding violates its own invariants.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A mapper or reducer invocation failed as a computation (distinct from
    /// exceeding a metered resource bound).
    #[error("behavior error in round {round} ({phase}): {message}")]
    Behavior {
        round: u64,
        phase: &'static str,
        message: String,
    },
}
