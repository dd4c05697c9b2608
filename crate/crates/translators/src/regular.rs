//! Deciding a DFA's language in two rounds: round 1 tabulates each block's
//! state-transition summary, round 2 composes the summaries from the start
//! state. Per-processor space is `O(n^max(ε,1−ε))` — sublinear for every
//! split exponent.

use std::sync::Arc;

use automata::{dfa_transition_table, Dfa, StateId};
use mrc_core::{
    Acceptance, Decision, Enforcement, KeyValuePair, MrcProgram, PolyBound, Rational,
    ReducerOutput, ResourceLimits, RoundBehavior,
};

use crate::block::BlockPlan;
use crate::error::TranslateError;
use crate::wire::{parse_decimal, position_fragment, reassemble_block, split_space_exponent};

/// Serializes block `j`'s transition table as `{j}|{t_0},{t_1},…`.
fn table_value(j: usize, table: &[StateId]) -> Vec<u8> {
    let body: Vec<String> = table.iter().map(|s| s.to_string()).collect();
    format!("{j}|{}", body.join(",")).into_bytes()
}

/// Parses a serialized transition table back into `(j, table)`.
fn parse_table_value(value: &[u8], states: usize) -> Result<(usize, Vec<StateId>), String> {
    let text = std::str::from_utf8(value)
        .map_err(|_| format!("table value {value:?} is not UTF-8"))?;
    let (j_text, body) = text
        .split_once('|')
        .ok_or_else(|| format!("table value {text:?} lacks a block tag"))?;
    let j: usize = j_text
        .parse()
        .map_err(|_| format!("table value has malformed block index {j_text:?}"))?;
    let table: Vec<StateId> = body
        .split(',')
        .map(|t| t.parse::<StateId>())
        .collect::<Result<_, _>>()
        .map_err(|_| format!("table for block {j} has a malformed entry"))?;
    if table.len() != states {
        return Err(format!(
            "table for block {j} has {} entries, expected {states}",
            table.len()
        ));
    }
    for &target in &table {
        if target >= states {
            return Err(format!("table for block {j} maps to unknown state {target}"));
        }
    }
    Ok((j, table))
}

/// Generous record-only bounds for the two-round block-composition shape:
/// space exponent `max(ε, 1−ε)` (round 1 holds a block, round 2 holds all
/// block tables), untuned constants.
fn block_compose_limits(epsilon: Rational) -> ResourceLimits {
    ResourceLimits {
        space_exponent: split_space_exponent(epsilon),
        space_constant: Rational::from_integer(64),
        time_bound: PolyBound::new(Rational::from_integer(64), Rational::from_integer(1)),
        keys_constant: Rational::from_integer(4),
        round_bound: PolyBound::new(Rational::from_integer(4), Rational::from_integer(0)),
        enforcement: Enforcement::RecordOnly,
    }
}

/// Compiles a DFA into a 2-round program over the standard indexed
/// encoding of its input string.
///
/// Round 1: the mapper sends pair `⟨i, x_i⟩` to block `⌈i/b⌉`; each block's
/// reducer reassembles its substring and tabulates where every DFA state
/// lands after reading it, shipping the table to the single key `1`.
/// Round 2: the collector composes the tables in block order starting from
/// the DFA's start state and accepts iff the final state is accepting.
///
/// An empty input is handled by the placeholder pair: it becomes the single
/// empty block, whose table is the identity, so the verdict is exactly
/// "start state accepting".
pub fn compile_dfa_to_mrc(dfa: &Dfa, epsilon: Rational) -> Result<MrcProgram, TranslateError> {
    // Fail fast on a bad exponent; per-run plans reuse it.
    BlockPlan::new(0, epsilon)?;
    let dfa = Arc::new(dfa.clone());
    let states = dfa.state_count();

    let mapper_dfa_check = Arc::clone(&dfa);
    let mapper = Arc::new(
        move |pair: &KeyValuePair,
              info: mrc_core::RoundInfo,
              _scratch: &mut mrc_core::ScratchMeter|
              -> Result<Vec<KeyValuePair>, String> {
            if info.round != 1 {
                // Later rounds just forward what the previous round built.
                return Ok(vec![pair.clone()]);
            }
            if pair.key.as_slice() == b"0" {
                // Placeholder for the empty input: wake the single empty
                // block so its (identity) table still gets built.
                return Ok(vec![KeyValuePair::new("1", "i")]);
            }
            let position = parse_decimal(&pair.key, "pair key")?;
            if position == 0 || position > info.n {
                return Err(format!("pair index {position} outside 1..={}", info.n));
            }
            if pair.value.len() != 1 {
                return Err(format!(
                    "pair {position} carries {} bytes, expected one symbol",
                    pair.value.len()
                ));
            }
            let symbol = pair.value[0];
            if !mapper_dfa_check.alphabet().contains(&symbol) {
                return Err(format!(
                    "symbol {:?} at position {position} is outside the machine's alphabet",
                    symbol as char
                ));
            }
            let plan = BlockPlan::new(info.n, epsilon).map_err(|e| e.to_string())?;
            let block = plan.block_of_position(position);
            Ok(vec![KeyValuePair::new(
                block.to_string(),
                position_fragment(position, symbol),
            )])
        },
    );

    let reducer_dfa = Arc::clone(&dfa);
    let reducer = Arc::new(
        move |key: &[u8],
              values: &[Vec<u8>],
              info: mrc_core::RoundInfo,
              scratch: &mut mrc_core::ScratchMeter|
              -> Result<ReducerOutput, String> {
            let plan = BlockPlan::new(info.n, epsilon).map_err(|e| e.to_string())?;
            match info.round {
                1 => {
                    let j = parse_decimal(key, "block key")?;
                    if j == 0 || j > plan.block_count() {
                        return Err(format!(
                            "block key {j} outside 1..={}",
                            plan.block_count()
                        ));
                    }
                    let (start, _) = plan.block_range(j);
                    let len = plan.block_len(j);
                    let block = if values.iter().any(|v| v.as_slice() == b"i") {
                        // Empty-input wake-up: the block has no positions.
                        Vec::new()
                    } else {
                        reassemble_block(values.iter(), start, len)?
                    };
                    scratch.charge(block.len() as u64);
                    let table =
                        dfa_transition_table(&reducer_dfa, &block).map_err(|e| e.to_string())?;
                    Ok(ReducerOutput::pairs(vec![KeyValuePair::new(
                        "1",
                        table_value(j, &table),
                    )]))
                }
                2 => {
                    if key != b"1" {
                        return Err(format!("round-2 key {key:?}, expected the collector key"));
                    }
                    let mut tables: Vec<Option<Vec<StateId>>> =
                        vec![None; plan.block_count()];
                    scratch.charge((plan.block_count() * states) as u64);
                    for value in values {
                        let (j, table) = parse_table_value(value, states)?;
                        if j == 0 || j > tables.len() {
                            return Err(format!(
                                "table block index {j} outside 1..={}",
                                tables.len()
                            ));
                        }
                        if tables[j - 1].replace(table).is_some() {
                            return Err(format!("duplicate table for block {j}"));
                        }
                    }
                    let mut state = reducer_dfa.start();
                    for (j, table) in tables.iter().enumerate() {
                        let table = table
                            .as_ref()
                            .ok_or_else(|| format!("missing table for block {}", j + 1))?;
                        state = table[state];
                    }
                    let decision = if reducer_dfa.is_accepting(state) {
                        Decision::Accept
                    } else {
                        Decision::Reject
                    };
                    Ok(ReducerOutput::decide(decision))
                }
                r => Err(format!("unexpected round {r} for a 2-round program")),
            }
        },
    );

    Ok(MrcProgram {
        rounds: 2,
        behavior: RoundBehavior::BuiltIn {
            name: "block-table-compose".into(),
            mapper,
            reducer,
        },
        limits: block_compose_limits(epsilon),
        acceptance: Acceptance::AcceptState,
    })
}
