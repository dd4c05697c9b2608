//! Run verdicts and the per-round resource report.

use serde::{Deserialize, Serialize};

/// Overall outcome of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Accept,
    Reject,
    ResourceViolation,
}

/// A verdict flag raised by a reducer. Accept takes precedence when both are
/// raised in the same round; either ends the run early under the
/// accept-state convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decision {
    Accept,
    Reject,
}

/// Which phase of a round an invocation belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phase {
    Mapper,
    Reducer,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Mapper => "mapper",
            Phase::Reducer => "reducer",
        }
    }
}

/// The bound that a violation exceeded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    /// Per-invocation space: input + peak scratch + output bytes.
    Space,
    /// Per-invocation steps.
    Steps,
    /// Distinct keys emitted by one mapper invocation.
    KeysPerInvocation,
    /// Distinct keys across a whole round.
    KeysPerRound,
    /// Total pairs carried by a round.
    PairsPerRound,
    /// Declared round count versus the allowed round bound.
    RoundCount,
}

/// One bound excess: where it happened and by how much. Violations are
/// scanned in canonical invocation order, so the first recorded violation is
/// schedule-independent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub round: u64,
    pub phase: Option<Phase>,
    /// Canonical index of the invocation within its phase; absent for
    /// round-level bounds.
    pub invocation: Option<usize>,
    /// The reducer's key, when the violation is attached to a reducer.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    #[serde(with = "crate::report::opt_byte_string")]
    pub key: Option<Vec<u8>>,
    pub bound: BoundKind,
    pub measured: u64,
    pub allowed: u64,
}

pub(crate) mod opt_byte_string {
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Vec<u8>>, ser: S) -> Result<S::Ok, S::Error> {
        match v {
            None => ser.serialize_none(),
            Some(bytes) => crate::pair::byte_string::serialize(bytes, ser),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Option<Vec<u8>>, D::Error> {
        Ok(Some(crate::pair::byte_string::deserialize(de)?))
    }
}

/// Everything metered about one executed round.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundMetrics {
    pub round: u64,
    /// Largest number of distinct keys emitted by a single mapper invocation.
    pub distinct_keys_per_mapper_invocation: u64,
    /// Distinct keys across the whole round (= reducer invocation count).
    pub total_distinct_keys: u64,
    /// Pairs entering reducers this round (= pairs emitted by mappers).
    pub total_pairs: u64,
    /// Largest reducer input, in bytes (key + all values).
    pub max_reducer_input_bytes: u64,
    /// Largest per-invocation space charge (input + peak scratch + output).
    pub max_working_space_bytes: u64,
    /// Largest per-invocation step count.
    pub max_steps_per_invocation: u64,
    /// Sum of mapper steps this round.
    pub mapper_steps: u64,
    /// Sum of reducer steps this round.
    pub reducer_steps: u64,
    /// Sequential cost of this round's shuffle:
    /// `total_pairs · ⌈log₂(total_pairs + 1)⌉`.
    pub shuffle_charge: u64,
}

/// The complete report of a run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceReport {
    pub verdict: Verdict,
    pub rounds_executed: u64,
    pub rounds: Vec<RoundMetrics>,
    /// Cumulative sequential cost: all mapper and reducer steps plus every
    /// round's shuffle charge. Nondecreasing in rounds executed.
    pub simulated_sequential_time: u64,
    /// Every bound excess observed (at most one under enforcement, which
    /// aborts at the first).
    pub violations: Vec<Violation>,
}

impl ResourceReport {
    pub fn new(verdict: Verdict) -> Self {
        ResourceReport {
            verdict,
            rounds_executed: 0,
            rounds: Vec::new(),
            simulated_sequential_time: 0,
            violations: Vec::new(),
        }
    }
}
