//! JSON machine-spec documents: `{"schema": "mrcsim/1", "kind": …,
//! "machine": {…}}`.
//!
//! The discriminator field `kind` selects one of five machine shapes: `dfa`,
//! `tm`, `tisp`, `mrc-pipeline`, `bsp`. Documents are strict — unknown
//! fields are rejected at every level — and reference states by name, with
//! resolution errors naming the offending state. Rationals are strings like
//! `"1/2"` so constants never suffer float drift.

use std::collections::BTreeMap;

use automata::{Dfa, InputSymbol, Move, Tm, TmTransition};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// The schema tag every document must carry.
pub const SCHEMA: &str = "mrcsim/1";

/// A parsed spec document: schema tag plus one typed machine.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecDoc {
    pub machine: MachineDoc,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MachineDoc {
    Dfa(DfaDoc),
    Tm(TmDoc),
    Tisp(TispDoc),
    MrcPipeline(PipelineDoc),
    Bsp(BspDoc),
}

impl MachineDoc {
    pub fn kind(&self) -> &'static str {
        match self {
            MachineDoc::Dfa(_) => "dfa",
            MachineDoc::Tm(_) => "tm",
            MachineDoc::Tisp(_) => "tisp",
            MachineDoc::MrcPipeline(_) => "mrc-pipeline",
            MachineDoc::Bsp(_) => "bsp",
        }
    }
}

/// Raw wire shape; `machine` is re-deserialized strictly per `kind`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    schema: String,
    kind: String,
    machine: serde_json::Value,
}

/// Parses and validates a spec document.
pub fn parse_spec(text: &str) -> Result<SpecDoc, CliError> {
    let raw: RawSpec = serde_json::from_str(text)?;
    if raw.schema != SCHEMA {
        return Err(CliError::invalid(format!(
            "unsupported schema {:?} (expected {SCHEMA:?})",
            raw.schema
        )));
    }
    let machine = match raw.kind.as_str() {
        "dfa" => MachineDoc::Dfa(serde_json::from_value(raw.machine)?),
        "tm" => MachineDoc::Tm(serde_json::from_value(raw.machine)?),
        "tisp" => MachineDoc::Tisp(serde_json::from_value(raw.machine)?),
        "mrc-pipeline" => MachineDoc::MrcPipeline(serde_json::from_value(raw.machine)?),
        "bsp" => MachineDoc::Bsp(serde_json::from_value(raw.machine)?),
        other => {
            return Err(CliError::invalid(format!(
                "unknown machine kind {other:?} (expected dfa, tm, tisp, mrc-pipeline, or bsp)"
            )))
        }
    };
    Ok(SpecDoc { machine })
}

/// Serializes a spec document with a stable field order.
pub fn spec_to_json(doc: &SpecDoc) -> Result<String, CliError> {
    let machine = match &doc.machine {
        MachineDoc::Dfa(m) => serde_json::to_value(m),
        MachineDoc::Tm(m) => serde_json::to_value(m),
        MachineDoc::Tisp(m) => serde_json::to_value(m),
        MachineDoc::MrcPipeline(m) => serde_json::to_value(m),
        MachineDoc::Bsp(m) => serde_json::to_value(m),
    }
    .map_err(|e| CliError::internal(format!("document serialization failed: {e}")))?;
    let raw = RawSpec {
        schema: SCHEMA.to_string(),
        kind: doc.machine.kind().to_string(),
        machine,
    };
    serde_json::to_string_pretty(&raw)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| CliError::internal(format!("document serialization failed: {e}")))
}

// ---------------------------------------------------------------------------
// Finite automata
// ---------------------------------------------------------------------------

/// A DFA over single-byte symbols. The rule list must be total: exactly one
/// rule per (state, symbol).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DfaDoc {
    pub states: Vec<String>,
    /// Alphabet as a string of distinct single-byte symbols, e.g. `"01"`.
    pub alphabet: String,
    pub start: String,
    pub accepting: Vec<String>,
    pub rules: Vec<DfaRule>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DfaRule {
    pub from: String,
    /// One symbol from the alphabet.
    pub on: String,
    pub to: String,
}

/// Builds a name→index map, rejecting duplicate names.
fn state_index(states: &[String]) -> Result<BTreeMap<&str, usize>, CliError> {
    let mut map = BTreeMap::new();
    for (i, name) in states.iter().enumerate() {
        if map.insert(name.as_str(), i).is_some() {
            return Err(CliError::invalid(format!("duplicate state {name:?}")));
        }
    }
    Ok(map)
}

fn resolve(map: &BTreeMap<&str, usize>, name: &str) -> Result<usize, CliError> {
    map.get(name)
        .copied()
        .ok_or_else(|| CliError::invalid(format!("undeclared state {name:?}")))
}

/// A single byte from a 1-character field.
fn single_byte(field: &str, value: &str) -> Result<u8, CliError> {
    let bytes = value.as_bytes();
    if bytes.len() != 1 {
        return Err(CliError::invalid(format!(
            "field {field:?} must be a single byte, got {value:?}"
        )));
    }
    Ok(bytes[0])
}

fn parse_move(field: &str, value: &str) -> Result<Move, CliError> {
    match value {
        "L" => Ok(Move::Left),
        "R" => Ok(Move::Right),
        "S" => Ok(Move::Stay),
        other => Err(CliError::invalid(format!(
            "field {field:?} must be \"L\", \"R\", or \"S\", got {other:?}"
        ))),
    }
}

impl DfaDoc {
    pub fn to_machine(&self) -> Result<Dfa, CliError> {
        let index = state_index(&self.states)?;
        let alphabet = self.alphabet.as_bytes().to_vec();
        let symbol_pos = |on: &str| -> Result<usize, CliError> {
            let byte = single_byte("on", on)?;
            alphabet
                .iter()
                .position(|&a| a == byte)
                .ok_or_else(|| CliError::invalid(format!("symbol {on:?} not in the alphabet")))
        };
        let mut transitions: Vec<Vec<Option<usize>>> =
            vec![vec![None; alphabet.len()]; self.states.len()];
        for rule in &self.rules {
            let from = resolve(&index, &rule.from)?;
            let sym = symbol_pos(&rule.on)?;
            let to = resolve(&index, &rule.to)?;
            if transitions[from][sym].replace(to).is_some() {
                return Err(CliError::invalid(format!(
                    "duplicate rule for state {:?} on {:?}",
                    rule.from, rule.on
                )));
            }
        }
        let mut total = Vec::with_capacity(self.states.len());
        for (s, row) in transitions.into_iter().enumerate() {
            let mut filled = Vec::with_capacity(row.len());
            for (k, entry) in row.into_iter().enumerate() {
                filled.push(entry.ok_or_else(|| {
                    CliError::invalid(format!(
                        "state {:?} has no rule on {:?}",
                        self.states[s], self.alphabet.as_bytes()[k] as char
                    ))
                })?);
            }
            total.push(filled);
        }
        let start = resolve(&index, &self.start)?;
        let accepting = self
            .accepting
            .iter()
            .map(|name| resolve(&index, name))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Dfa::new(
            self.states.clone(),
            alphabet,
            total,
            start,
            accepting,
        )?)
    }

    pub fn from_machine(dfa: &Dfa) -> DfaDoc {
        let states = dfa.state_names().to_vec();
        let alphabet = String::from_utf8_lossy(dfa.alphabet()).into_owned();
        let mut rules = Vec::new();
        for s in 0..dfa.state_count() {
            for &byte in dfa.alphabet() {
                let to = dfa
                    .transition(s, byte)
                    .expect("a built DFA has a total table");
                rules.push(DfaRule {
                    from: states[s].clone(),
                    on: (byte as char).to_string(),
                    to: states[to].clone(),
                });
            }
        }
        DfaDoc {
            accepting: dfa
                .accepting_states()
                .into_iter()
                .map(|s| states[s].clone())
                .collect(),
            start: states[dfa.start()].clone(),
            alphabet,
            states,
            rules,
        }
    }
}

// ---------------------------------------------------------------------------
// Work-tape machines
// ---------------------------------------------------------------------------

/// A machine with a two-way read-only input tape (between end markers) and a
/// work tape of exactly `work_space` cells. Rules must be total over every
/// non-halting state × input symbol (including the markers `"<"` and `">"`)
/// × work symbol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TmDoc {
    pub states: Vec<String>,
    pub initial: String,
    pub accept: String,
    pub reject: String,
    pub input_alphabet: String,
    pub work_alphabet: String,
    /// One symbol from the work alphabet.
    pub blank: String,
    pub work_space: usize,
    pub rules: Vec<TmRule>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TmRule {
    pub state: String,
    /// `"<"` (left marker), `">"` (right marker), or one input symbol.
    pub input: String,
    /// One work symbol under the work head.
    pub work: String,
    pub next: String,
    /// Work symbol written in place.
    pub write: String,
    pub work_move: String,
    pub input_move: String,
}

impl TmDoc {
    pub fn to_machine(&self) -> Result<Tm, CliError> {
        let index = state_index(&self.states)?;
        if self.input_alphabet.contains('<') || self.input_alphabet.contains('>') {
            return Err(CliError::invalid(
                "input alphabet must not contain '<' or '>': they denote the end markers",
            ));
        }
        let input_symbol = |value: &str| -> Result<InputSymbol, CliError> {
            match value {
                "<" => Ok(InputSymbol::LeftMarker),
                ">" => Ok(InputSymbol::RightMarker),
                other => Ok(InputSymbol::Byte(single_byte("input", other)?)),
            }
        };
        let mut rules = Vec::with_capacity(self.rules.len());
        for rule in &self.rules {
            rules.push((
                resolve(&index, &rule.state)?,
                input_symbol(&rule.input)?,
                single_byte("work", &rule.work)?,
                TmTransition {
                    next: resolve(&index, &rule.next)?,
                    write: single_byte("write", &rule.write)?,
                    work_move: parse_move("work_move", &rule.work_move)?,
                    input_move: parse_move("input_move", &rule.input_move)?,
                },
            ));
        }
        Ok(Tm::from_rules(
            self.states.clone(),
            resolve(&index, &self.initial)?,
            resolve(&index, &self.accept)?,
            resolve(&index, &self.reject)?,
            self.input_alphabet.as_bytes().to_vec(),
            self.work_alphabet.as_bytes().to_vec(),
            single_byte("blank", &self.blank)?,
            self.work_space,
            &rules,
        )?)
    }
}

// ---------------------------------------------------------------------------
// Budgeted single-tape machines
// ---------------------------------------------------------------------------

/// A single-tape machine with explicit step and cell budgets. Rules must be
/// total over every non-halting state × tape symbol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TispDoc {
    pub states: Vec<String>,
    pub initial: String,
    pub accept: String,
    pub reject: String,
    /// Tape alphabet including the blank, e.g. `"01_"`.
    pub alphabet: String,
    pub blank: String,
    pub rules: Vec<TispRule>,
    pub time_budget: u64,
    pub space_budget: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TispRule {
    pub state: String,
    pub read: String,
    pub next: String,
    pub write: String,
    #[serde(rename = "move")]
    pub head_move: String,
}

impl TispDoc {
    pub fn to_machine(&self) -> Result<automata::TispMachine, CliError> {
        let index = state_index(&self.states)?;
        let alphabet = self.alphabet.as_bytes().to_vec();
        let accept = resolve(&index, &self.accept)?;
        let reject = resolve(&index, &self.reject)?;
        let symbol_pos = |read: &str| -> Result<usize, CliError> {
            let byte = single_byte("read", read)?;
            alphabet
                .iter()
                .position(|&a| a == byte)
                .ok_or_else(|| CliError::invalid(format!("symbol {read:?} not in the alphabet")))
        };
        let mut delta: Vec<Vec<Option<automata::TispTransition>>> = (0..self.states.len())
            .map(|s| {
                if s == accept || s == reject {
                    Vec::new()
                } else {
                    vec![None; alphabet.len()]
                }
            })
            .collect();
        for rule in &self.rules {
            let state = resolve(&index, &rule.state)?;
            if state == accept || state == reject {
                return Err(CliError::invalid(format!(
                    "halting state {:?} must not have outgoing rules",
                    rule.state
                )));
            }
            let sym = symbol_pos(&rule.read)?;
            let action = automata::TispTransition {
                next: resolve(&index, &rule.next)?,
                write: single_byte("write", &rule.write)?,
                head_move: parse_move("move", &rule.head_move)?,
            };
            if delta[state][sym].replace(action).is_some() {
                return Err(CliError::invalid(format!(
                    "duplicate rule for state {:?} on {:?}",
                    rule.state, rule.read
                )));
            }
        }
        Ok(automata::TispMachine::new(
            self.states.clone(),
            resolve(&index, &self.initial)?,
            accept,
            reject,
            alphabet,
            single_byte("blank", &self.blank)?,
            delta,
        )?)
    }
}

// ---------------------------------------------------------------------------
// Round-engine pipelines and barrier machines
// ---------------------------------------------------------------------------

/// A named built-in round-program plus its parameters. Which parameter
/// fields are required depends on `builtin`; see the pipeline registry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineDoc {
    pub builtin: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dfa: Option<DfaDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tm: Option<TmDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tisp: Option<TispDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bsp: Option<Box<BspDoc>>,
    /// Block exponent as a rational string, e.g. `"1/2"`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<String>,
    /// Named base language for the pad-stripping decider.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base: Option<String>,
    /// Accepted tally values for the per-length table machine.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<u64>>,
}

impl PipelineDoc {
    /// A bare pipeline with every optional parameter unset.
    pub fn named(builtin: impl Into<String>) -> PipelineDoc {
        PipelineDoc {
            builtin: builtin.into(),
            dfa: None,
            tm: None,
            tisp: None,
            bsp: None,
            epsilon: None,
            base: None,
            table: None,
        }
    }
}

/// A barrier machine: `p` processors running a built-in behaviour. The only
/// behaviour today is `from-rounds`, which runs the embedded pipeline split
/// into map and reduce steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BspDoc {
    pub p: usize,
    pub builtin: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pipeline: Option<Box<PipelineDoc>>,
}
