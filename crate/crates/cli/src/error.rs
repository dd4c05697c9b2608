//! Error classification behind the process exit codes.
//!
//! Every failure is either *invalid* — unreadable paths, malformed or
//! inconsistent documents, inputs outside their alphabet, infeasible
//! construction parameters (exit code 3) — or *internal* — a behaviour
//! failing mid-run or anything that indicates a defect rather than bad user
//! input (exit code 4). Verdicts are not errors: accept, reject, and
//! resource violation map to exit codes 0, 1, and 2 at the call sites.

use automata::AutomataError;
use bsp_core::BspError;
use mrc_core::MrcError;
use thiserror::Error;
use translators::TranslateError;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad spec, input, flag, or construction parameter — exit code 3.
    #[error("{0}")]
    Invalid(String),
    /// A behaviour failed mid-run, or an engine broke its contract — exit
    /// code 4.
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 3,
            CliError::Internal(_) => 4,
        }
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        CliError::Invalid(message.into())
    }

    pub fn internal(message: impl Into<String>) -> Self {
        CliError::Internal(message.into())
    }
}

impl From<MrcError> for CliError {
    fn from(e: MrcError) -> Self {
        match e {
            MrcError::Behavior { .. } => CliError::Internal(e.to_string()),
            MrcError::InvalidProgram(_) | MrcError::InvalidInput(_) => {
                CliError::Invalid(e.to_string())
            }
        }
    }
}

impl From<AutomataError> for CliError {
    fn from(e: AutomataError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<TranslateError> for CliError {
    fn from(e: TranslateError) -> Self {
        match e {
            TranslateError::Mrc(inner) => inner.into(),
            TranslateError::Automata(inner) => inner.into(),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

impl From<BspError> for CliError {
    fn from(e: BspError) -> Self {
        match e {
            BspError::Behavior { .. } => CliError::Internal(e.to_string()),
            BspError::InvalidMachine(_) => CliError::Invalid(e.to_string()),
            BspError::Mrc(inner) => inner.into(),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Invalid(format!("malformed document: {e}"))
    }
}
