use thiserror::Error;

/// Failures of the barrier-synchronous engine and its cross-compilers.
/// Resource excesses are verdicts, not errors; an error means the machine or
/// its behaviour broke the model's contract.
#[derive(Debug, Error)]
pub enum BspError {
    #[error("invalid machine: {0}")]
    InvalidMachine(String),

    #[error("behaviour error on processor {processor} in round {round}: {message}")]
    Behavior {
        round: u64,
        processor: usize,
        message: String,
    },

    #[error(transparent)]
    Mrc(#[from] mrc_core::MrcError),
}
