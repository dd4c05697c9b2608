//! Library surface of the `mrcsim` tool: JSON machine specs, the built-in
//! round-program registry, run reports, and the command implementations.
//! The binary in `main.rs` is a thin argument-parsing shell over
//! [`commands`]; integration tests drive both layers.

pub mod commands;
pub mod error;
pub mod pipeline;
pub mod regexdfa;
pub mod reportdoc;
pub mod schema;

pub use error::CliError;
