//! The JSON run report: what ran, on what, under which limits, and what it
//! measured. Two runs of the same spec on the same input produce
//! byte-identical reports except for the wall-clock field, which is why the
//! wall clock sits last.

use mrc_core::{ResourceLimits, ResourceReport, Verdict};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// One run's report document.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportDocument {
    pub schema: String,
    pub artifact_version: String,
    /// Which engine produced the verdict: `dfa`, `tm`, `tisp`, `rounds`, or
    /// `barrier`.
    pub engine: String,
    /// SHA-256 of the spec document bytes, lowercase hex.
    pub spec_digest: String,
    /// SHA-256 of the raw input bytes, lowercase hex.
    pub input_digest: String,
    pub verdict: Verdict,
    /// The engine's raw outcome when it is more specific than the verdict
    /// (`diverged`, `time-exceeded`, `space-exceeded`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcome: Option<String>,
    /// The limits the run was metered against (round and barrier engines).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limits: Option<ResourceLimits>,
    /// Full per-round accounting (round and barrier engines).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resources: Option<ResourceReport>,
    /// Steps executed (raw machine engines).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<u64>,
    /// Tape cells touched (budgeted single-tape engine).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cells_used: Option<usize>,
    /// Elapsed wall-clock time. The only nondeterministic field, kept last.
    pub wall_clock_micros: u128,
}

impl ReportDocument {
    pub fn new(engine: &str, spec_bytes: &[u8], input_bytes: &[u8], verdict: Verdict) -> Self {
        ReportDocument {
            schema: crate::schema::SCHEMA.to_string(),
            artifact_version: env!("CARGO_PKG_VERSION").to_string(),
            engine: engine.to_string(),
            spec_digest: sha256_hex(spec_bytes),
            input_digest: sha256_hex(input_bytes),
            verdict,
            outcome: None,
            limits: None,
            resources: None,
            steps: None,
            cells_used: None,
            wall_clock_micros: 0,
        }
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        serde_json::to_string_pretty(self)
            .map(|mut s| {
                s.push('\n');
                s
            })
            .map_err(|e| CliError::internal(format!("report serialization failed: {e}")))
    }
}

/// Lowercase-hex SHA-256 of a byte string.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}
