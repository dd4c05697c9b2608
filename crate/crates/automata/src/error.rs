use thiserror::Error;

/// Errors raised by machine construction and execution.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomataError {
    /// A machine definition is internally inconsistent (missing transitions,
    /// out-of-range state ids, symbols not in the declared alphabet, ...).
    #[error("invalid machine: {0}")]
    InvalidMachine(String),

    /// An input string contains a symbol outside the machine's alphabet.
    #[error("input symbol {symbol:?} (byte 0x{byte:02x}) at position {position} is not in the machine alphabet")]
    SymbolOutOfAlphabet {
        symbol: char,
        byte: u8,
        position: usize,
    },

    /// The work-configuration space is too large to tabulate.
    #[error("work configuration space too large: {configs} configurations exceed the supported maximum {max}")]
    ConfigSpaceTooLarge { configs: u128, max: u64 },
}
