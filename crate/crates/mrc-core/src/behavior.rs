//! Round behaviours: built-in mapper/reducer functions and the interpreted
//! mode that drives a bounded-work-tape machine.
//!
//! Locality is enforced by construction: an invocation receives exactly its
//! own arguments (one pair for a mapper, one key group for a reducer) plus
//! the round number and input size — nothing else exists in its scope.
//! Determinism therefore reduces to the functions being pure, which built-ins
//! are by contract and interpreted machines are by definition.

use crate::error::MrcError;
use crate::pair::KeyValuePair;
use crate::report::Decision;
use automata::{run_tm_with_budget, BudgetedOutcome, Tm};
use std::sync::Arc;

/// Context constants an invocation may read: the round number (1-based) and
/// the input size parameter `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundInfo {
    pub round: u64,
    pub n: usize,
}

/// Tracks explicit working-storage allocations of an invocation. Built-in
/// behaviours charge the buffers they materialize (reassembled blocks,
/// composed tables); the peak feeds the space charge alongside input and
/// output bytes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ScratchMeter {
    current: u64,
    peak: u64,
}

impl ScratchMeter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn charge(&mut self, bytes: u64) {
        self.current = self.current.saturating_add(bytes);
        self.peak = self.peak.max(self.current);
    }

    pub fn release(&mut self, bytes: u64) {
        self.current = self.current.saturating_sub(bytes);
    }

    pub fn peak(&self) -> u64 {
        self.peak
    }

    pub fn current(&self) -> u64 {
        self.current
    }
}

/// What a reducer invocation produces: pairs for the next round and an
/// optional verdict flag.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReducerOutput {
    pub pairs: Vec<KeyValuePair>,
    pub decision: Option<Decision>,
}

impl ReducerOutput {
    pub fn pairs(pairs: Vec<KeyValuePair>) -> Self {
        ReducerOutput {
            pairs,
            decision: None,
        }
    }

    pub fn decide(decision: Decision) -> Self {
        ReducerOutput {
            pairs: Vec::new(),
            decision: Some(decision),
        }
    }

    pub fn empty() -> Self {
        ReducerOutput::default()
    }

    pub fn with_decision(mut self, decision: Decision) -> Self {
        self.decision = Some(decision);
        self
    }
}

/// A mapper: one input pair in, any number of pairs out. Errors are
/// behaviour failures, not verdicts.
pub type MapperFn = Arc<
    dyn Fn(&KeyValuePair, RoundInfo, &mut ScratchMeter) -> Result<Vec<KeyValuePair>, String>
        + Send
        + Sync,
>;

/// A reducer: one key group in, pairs plus an optional verdict flag out.
pub type ReducerFn = Arc<
    dyn Fn(&[u8], &[Vec<u8>], RoundInfo, &mut ScratchMeter) -> Result<ReducerOutput, String>
        + Send
        + Sync,
>;

/// The behaviour driving every round of a program. Built-in behaviours are
/// ordinary functions parameterized on (phase, round, n); the interpreted
/// mode realizes the same signature with a single machine whose input tape
/// is initialized with `phase,round,n,` followed by the argument.
#[derive(Clone)]
pub enum RoundBehavior {
    BuiltIn {
        name: String,
        mapper: MapperFn,
        reducer: ReducerFn,
    },
    Interpreted {
        name: String,
        machine: Arc<Tm>,
    },
}

impl std::fmt::Debug for RoundBehavior {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RoundBehavior::BuiltIn { name, .. } => write!(f, "BuiltIn({name})"),
            RoundBehavior::Interpreted { name, .. } => write!(f, "Interpreted({name})"),
        }
    }
}

impl RoundBehavior {
    pub fn name(&self) -> &str {
        match self {
            RoundBehavior::BuiltIn { name, .. } => name,
            RoundBehavior::Interpreted { name, .. } => name,
        }
    }
}

/// Result of one invocation, with its resource observations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvocationResult {
    pub pairs: Vec<KeyValuePair>,
    pub decision: Option<Decision>,
    pub steps: u64,
    pub scratch_peak: u64,
}

/// Runs one mapper invocation. `step_budget` bounds interpreted machines;
/// built-ins report the byte-proportional step proxy
/// `max(1, input bytes + output bytes)` and are bound-checked by the engine.
pub fn invoke_mapper(
    behavior: &RoundBehavior,
    pair: &KeyValuePair,
    info: RoundInfo,
    step_budget: u64,
) -> Result<InvocationResult, MrcError> {
    match behavior {
        RoundBehavior::BuiltIn { mapper, .. } => {
            let mut scratch = ScratchMeter::new();
            let pairs = mapper(pair, info, &mut scratch).map_err(|message| MrcError::Behavior {
                round: info.round,
                phase: "mapper",
                message,
            })?;
            let out_bytes: u64 = pairs.iter().map(KeyValuePair::bytes).sum();
            Ok(InvocationResult {
                steps: (pair.bytes() + out_bytes).max(1),
                scratch_peak: scratch.peak(),
                decision: None,
                pairs,
            })
        }
        RoundBehavior::Interpreted { machine, .. } => {
            let mut arg = Vec::with_capacity(pair.key.len() + 1 + pair.value.len());
            arg.extend_from_slice(&pair.key);
            arg.push(b':');
            arg.extend_from_slice(&pair.value);
            check_encodable(&pair.key, info, "mapper")?;
            check_encodable(&pair.value, info, "mapper")?;
            let (output, steps) =
                drive_machine(machine, 1, info, &arg, step_budget, "mapper")?;
            let pairs = parse_emissions(&output, info, "mapper")?;
            Ok(InvocationResult {
                pairs,
                decision: None,
                steps,
                scratch_peak: machine.work_space() as u64,
            })
        }
    }
}

/// Runs one reducer invocation; see [`invoke_mapper`] for conventions.
pub fn invoke_reducer(
    behavior: &RoundBehavior,
    key: &[u8],
    values: &[Vec<u8>],
    info: RoundInfo,
    step_budget: u64,
) -> Result<InvocationResult, MrcError> {
    match behavior {
        RoundBehavior::BuiltIn { reducer, .. } => {
            let mut scratch = ScratchMeter::new();
            let output =
                reducer(key, values, info, &mut scratch).map_err(|message| MrcError::Behavior {
                    round: info.round,
                    phase: "reducer",
                    message,
                })?;
            let in_bytes: u64 =
                key.len() as u64 + values.iter().map(|v| v.len() as u64).sum::<u64>();
            let out_bytes: u64 = output.pairs.iter().map(KeyValuePair::bytes).sum();
            Ok(InvocationResult {
                steps: (in_bytes + out_bytes).max(1),
                scratch_peak: scratch.peak(),
                decision: output.decision,
                pairs: output.pairs,
            })
        }
        RoundBehavior::Interpreted { machine, .. } => {
            check_encodable(key, info, "reducer")?;
            let mut arg = Vec::new();
            arg.extend_from_slice(key);
            arg.push(b':');
            for (i, v) in values.iter().enumerate() {
                check_encodable(v, info, "reducer")?;
                if i > 0 {
                    arg.push(b';');
                }
                arg.extend_from_slice(v);
            }
            let (output, steps) =
                drive_machine(machine, 2, info, &arg, step_budget, "reducer")?;
            let (decision, emissions) = match output.split_first() {
                None => (None, &output[..]),
                Some((b'A', rest)) => (Some(Decision::Accept), rest),
                Some((b'R', rest)) => (Some(Decision::Reject), rest),
                Some((b'.', rest)) => (None, rest),
                Some((other, _)) => {
                    return Err(MrcError::Behavior {
                        round: info.round,
                        phase: "reducer",
                        message: format!(
                            "interpreted reducer output must start with 'A', 'R' or '.', got {:?}",
                            *other as char
                        ),
                    })
                }
            };
            let pairs = parse_emissions(emissions, info, "reducer")?;
            Ok(InvocationResult {
                pairs,
                decision,
                steps,
                scratch_peak: machine.work_space() as u64,
            })
        }
    }
}

/// The interpreted wire format reserves `,` `:` `;` as separators and
/// `A R .` as reducer flags; keys and values passing through an interpreted
/// round must avoid the separators.
fn check_encodable(bytes: &[u8], info: RoundInfo, phase: &'static str) -> Result<(), MrcError> {
    if let Some(&bad) = bytes.iter().find(|b| matches!(b, b',' | b':' | b';')) {
        return Err(MrcError::Behavior {
            round: info.round,
            phase,
            message: format!(
                "byte {:?} collides with an interpreted-mode separator",
                bad as char
            ),
        });
    }
    Ok(())
}

/// Initializes the machine's input tape with `phase,round,n,arg`, runs it
/// under the step budget, and returns the work tape (trimmed of trailing
/// blanks) plus the steps taken. A machine that halts rejecting produced no
/// output; one that exhausts the budget is a behaviour error.
fn drive_machine(
    machine: &Tm,
    phase_code: u8,
    info: RoundInfo,
    arg: &[u8],
    step_budget: u64,
    phase: &'static str,
) -> Result<(Vec<u8>, u64), MrcError> {
    let mut tape = format!("{},{},{},", phase_code, info.round, info.n).into_bytes();
    tape.extend_from_slice(arg);
    let behavior_err = |message: String| MrcError::Behavior {
        round: info.round,
        phase,
        message,
    };
    let (outcome, steps, work_tape) = run_tm_with_budget(machine, &tape, step_budget)
        .map_err(|e| behavior_err(e.to_string()))?;
    match outcome {
        BudgetedOutcome::Accept => {
            let mut out = work_tape;
            while out.last() == Some(&machine.blank()) {
                out.pop();
            }
            Ok((out, steps))
        }
        BudgetedOutcome::Reject => Ok((Vec::new(), steps)),
        BudgetedOutcome::OutOfBudget => Err(behavior_err(format!(
            "interpreted machine exceeded its step budget of {step_budget}"
        ))),
    }
}

/// Parses `key:value;key:value;...` (empty input → no pairs).
fn parse_emissions(
    bytes: &[u8],
    info: RoundInfo,
    phase: &'static str,
) -> Result<Vec<KeyValuePair>, MrcError> {
    let mut pairs = Vec::new();
    if bytes.is_empty() {
        return Ok(pairs);
    }
    for segment in bytes.split(|&b| b == b';') {
        if segment.is_empty() {
            continue;
        }
        let colon = segment.iter().position(|&b| b == b':').ok_or_else(|| {
            MrcError::Behavior {
                round: info.round,
                phase,
                message: format!(
                    "interpreted emission {:?} lacks a ':' separator",
                    String::from_utf8_lossy(segment)
                ),
            }
        })?;
        pairs.push(KeyValuePair::new(
            segment[..colon].to_vec(),
            segment[colon + 1..].to_vec(),
        ));
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn info() -> RoundInfo {
        RoundInfo { round: 1, n: 1 }
    }

    #[test]
    fn scratch_meter_tracks_peak_not_sum() {
        let mut m = ScratchMeter::new();
        m.charge(10);
        m.release(10);
        m.charge(7);
        assert_eq!(m.peak(), 10);
        assert_eq!(m.current(), 7);
    }

    #[test]
    fn builtin_mapper_steps_are_byte_proportional() {
        let behavior = RoundBehavior::BuiltIn {
            name: "echo".into(),
            mapper: Arc::new(|pair, _, _| Ok(vec![pair.clone()])),
            reducer: Arc::new(|key, values, _, _| {
                Ok(ReducerOutput::pairs(
                    values
                        .iter()
                        .map(|v| KeyValuePair::new(key.to_vec(), v.clone()))
                        .collect(),
                ))
            }),
        };
        let pair = KeyValuePair::new("k", "vvv");
        let r = invoke_mapper(&behavior, &pair, info(), 1000).unwrap();
        assert_eq!(r.pairs, vec![pair.clone()]);
        assert_eq!(r.steps, 8); // 4 bytes in + 4 bytes out
        let r = invoke_reducer(&behavior, b"k", &[b"vvv".to_vec()], info(), 1000).unwrap();
        assert_eq!(r.steps, 8);
        assert_eq!(r.decision, None);
    }

    #[test]
    fn emission_parsing_round_trips() {
        let parsed = parse_emissions(b"a:1;b:22;c:", info(), "mapper").unwrap();
        assert_eq!(
            parsed,
            vec![
                KeyValuePair::new("a", "1"),
                KeyValuePair::new("b", "22"),
                KeyValuePair::new("c", ""),
            ]
        );
        assert!(parse_emissions(b"broken", info(), "mapper").is_err());
        assert!(parse_emissions(b"", info(), "mapper").unwrap().is_empty());
    }

    #[test]
    fn separator_bytes_in_pairs_are_caught() {
        assert!(check_encodable(b"a:b", info(), "mapper").is_err());
        assert!(check_encodable(b"ab", info(), "mapper").is_ok());
    }
}
