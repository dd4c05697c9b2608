//! Simulating a single-tape machine one step per round: the tape is split
//! into `⌈√S⌉`-cell segments, each owned by one reducer key, and a head
//! token `(state, position)` travels between them. Every round applies
//! exactly one machine transition, so the round count of the emitted
//! program equals the step count of the direct run.

use std::sync::Arc;

use automata::{Move, TispMachine};
use mrc_core::{
    Acceptance, Decision, Enforcement, KeyValuePair, MrcProgram, PolyBound, Rational,
    ReducerOutput, ResourceLimits, RoundBehavior,
};

use crate::block::BlockPlan;
use crate::error::TranslateError;
use crate::wire::{parse_decimal, position_fragment};

/// The linear-headroom factor tying a machine's space budget to its input
/// length: `S ≤ 64·max(n,1)` keeps every emitted key and segment inside the
/// program's untuned `O(√n)` bounds.
pub const SPACE_HEADROOM: u64 = 64;

fn segment_plan(space_budget: usize) -> BlockPlan {
    BlockPlan::new(space_budget, Rational::new(1, 2).unwrap())
        .expect("one half is a valid split exponent")
}

/// Serializes segment `j`'s cells as `s{j}|{cells}`.
fn segment_value(j: usize, cells: &[u8]) -> Vec<u8> {
    let mut v = format!("s{j}|").into_bytes();
    v.extend_from_slice(cells);
    v
}

fn parse_segment_value(value: &[u8]) -> Result<(usize, &[u8]), String> {
    let bar = value
        .iter()
        .position(|&b| b == b'|')
        .ok_or_else(|| format!("segment value {value:?} lacks a cells separator"))?;
    let j = parse_decimal(&value[1..bar], "segment tag")?;
    Ok((j, &value[bar + 1..]))
}

/// Serializes the head token as `t{state},{position}`.
fn token_value(state: usize, head: usize) -> Vec<u8> {
    format!("t{state},{head}").into_bytes()
}

fn parse_token_value(value: &[u8]) -> Result<(usize, usize), String> {
    let text = std::str::from_utf8(&value[1..])
        .map_err(|_| format!("token value {value:?} is not UTF-8"))?;
    let (state_text, head_text) = text
        .split_once(',')
        .ok_or_else(|| format!("token value {text:?} lacks a position"))?;
    let state = state_text
        .parse()
        .map_err(|_| format!("token has a malformed state {state_text:?}"))?;
    let head = head_text
        .parse()
        .map_err(|_| format!("token has a malformed position {head_text:?}"))?;
    Ok((state, head))
}

/// What one segment's reducer found in its value list.
struct SegmentInbox {
    cells: Option<Vec<u8>>,
    fragments: Vec<(usize, u8)>,
    woken: bool,
    token: Option<(usize, usize)>,
}

fn read_inbox(values: &[Vec<u8>], round: u64) -> Result<SegmentInbox, String> {
    let mut inbox = SegmentInbox {
        cells: None,
        fragments: Vec::new(),
        woken: false,
        token: None,
    };
    for value in values {
        match value.first() {
            Some(b'i') if value.len() == 1 => inbox.woken = true,
            Some(b's') => {
                let (_, cells) = parse_segment_value(value)?;
                if inbox.cells.replace(cells.to_vec()).is_some() {
                    return Err("segment received two cell snapshots".into());
                }
            }
            Some(b't') => {
                let token = parse_token_value(value)?;
                if inbox.token.replace(token).is_some() {
                    return Err("segment received two head tokens".into());
                }
            }
            Some(b'0'..=b'9') => inbox.fragments.push(crate::wire::parse_fragment(value)?),
            _ => return Err(format!("unrecognized value {value:?} in round {round}")),
        }
    }
    Ok(inbox)
}

/// Untuned record-only bounds for the step-per-round shape. The round bound
/// is pinned to the program's own round count (each round is one machine
/// step, so the bound **is** the time budget).
fn step_per_round_limits(rounds: u64) -> ResourceLimits {
    let c64 = Rational::from_integer(64);
    ResourceLimits {
        space_exponent: Rational::new(1, 2).unwrap(),
        space_constant: c64,
        time_bound: PolyBound::new(c64, Rational::from_integer(1)),
        keys_constant: c64,
        round_bound: PolyBound::new(Rational::from_integer(rounds), Rational::from_integer(0)),
        enforcement: Enforcement::RecordOnly,
    }
}

/// Compiles a single-tape machine plus its run budgets into a program that
/// executes one transition per round.
///
/// Round 1 materializes the tape: the mapper routes pair `⟨i, x_i⟩` to the
/// segment owning cell `i−1`, and the trigger pair (index 1, or the empty
/// input's placeholder) additionally wakes every segment and drops the head
/// token on segment 1. Every round's reducer then: rebuilds or re-emits its
/// cells, and — if it holds the token — applies one transition, deciding
/// when the machine halts (or would leave the space budget) and otherwise
/// forwarding the updated segment and re-keyed token. A run that exhausts
/// all `time_budget` rounds without a verdict rejects, the round-based
/// image of running out of time.
pub fn compile_tisp_to_mrc(
    machine: &TispMachine,
    time_budget: u64,
    space_budget: usize,
) -> Result<MrcProgram, TranslateError> {
    if time_budget == 0 {
        return Err(TranslateError::Invalid(
            "a zero-step time budget leaves no round to simulate in".into(),
        ));
    }
    let machine = Arc::new(machine.clone());
    let plan = segment_plan(space_budget);
    let segments = plan.block_count();

    let mapper_machine = Arc::clone(&machine);
    let mapper = Arc::new(
        move |pair: &KeyValuePair,
              info: mrc_core::RoundInfo,
              _scratch: &mut mrc_core::ScratchMeter|
              -> Result<Vec<KeyValuePair>, String> {
            if info.round != 1 {
                return Ok(vec![pair.clone()]);
            }
            if info.n > space_budget {
                return Err(format!(
                    "input of {} cells does not fit in the space budget of {} cells",
                    info.n, space_budget
                ));
            }
            let mut out = Vec::new();
            let trigger = if pair.key.as_slice() == b"0" {
                true // empty-input placeholder
            } else {
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
                if mapper_machine.symbol_position(symbol).is_none() {
                    return Err(format!(
                        "symbol {:?} at position {position} is outside the machine's alphabet",
                        symbol as char
                    ));
                }
                // Cell i−1 belongs to the segment owning position i.
                let segment = plan.block_of_position(position);
                out.push(KeyValuePair::new(
                    segment.to_string(),
                    position_fragment(position, symbol),
                ));
                position == 1
            };
            if trigger {
                for j in 1..=segments {
                    out.push(KeyValuePair::new(j.to_string(), "i"));
                }
                out.push(KeyValuePair::new(
                    "1",
                    token_value(mapper_machine.initial(), 0),
                ));
            }
            Ok(out)
        },
    );

    let reducer_machine = Arc::clone(&machine);
    let reducer = Arc::new(
        move |key: &[u8],
              values: &[Vec<u8>],
              info: mrc_core::RoundInfo,
              scratch: &mut mrc_core::ScratchMeter|
              -> Result<ReducerOutput, String> {
            let j = parse_decimal(key, "segment key")?;
            if j == 0 || j > segments {
                return Err(format!("segment key {j} outside 1..={segments}"));
            }
            let (start, _) = plan.block_range(j);
            let len = plan.block_len(j);
            let inbox = read_inbox(values, info.round)?;

            let mut cells = match (inbox.cells, info.round) {
                (Some(cells), _) => {
                    if cells.len() != len {
                        return Err(format!(
                            "segment {j} snapshot has {} cells, expected {len}",
                            cells.len()
                        ));
                    }
                    cells
                }
                (None, 1) => {
                    if !inbox.woken && inbox.fragments.is_empty() {
                        return Err(format!("segment {j} was never initialized"));
                    }
                    let mut cells = vec![reducer_machine.blank(); len];
                    for (position, symbol) in &inbox.fragments {
                        let offset = position
                            .checked_sub(start)
                            .filter(|&o| o < len)
                            .ok_or_else(|| {
                                format!("position {position} outside segment {j}")
                            })?;
                        cells[offset] = *symbol;
                    }
                    cells
                }
                (None, r) => return Err(format!("segment {j} lost its cells by round {r}")),
            };
            scratch.charge(cells.len() as u64);

            let Some((state, head)) = inbox.token else {
                // No head here: carry the segment forward unchanged.
                return Ok(ReducerOutput::pairs(vec![KeyValuePair::new(
                    key.to_vec(),
                    segment_value(j, &cells),
                )]));
            };

            if state >= reducer_machine.state_count() {
                return Err(format!("token names unknown state {state}"));
            }
            // Mirrors the direct runner's loop exactly: halt check first,
            // then the space wall, then one transition whose rightward move
            // may itself run out of space before the new state can halt.
            if reducer_machine.is_halting(state) {
                return Ok(ReducerOutput::decide(if state == reducer_machine.accept() {
                    Decision::Accept
                } else {
                    Decision::Reject
                }));
            }
            if space_budget == 0 {
                // No cell to park the head on: any activity is out of space.
                return Ok(ReducerOutput::decide(Decision::Reject));
            }
            let offset = (head + 1)
                .checked_sub(start)
                .filter(|&o| o < len)
                .ok_or_else(|| format!("token at cell {head} arrived at segment {j}"))?;
            let transition = reducer_machine.transition(state, cells[offset]);
            cells[offset] = transition.write;
            let next_state = transition.next;
            let next_head = match transition.head_move {
                Move::Stay => head,
                Move::Left => head.saturating_sub(1),
                Move::Right => {
                    if head + 1 >= space_budget {
                        // The step happened, but the head left the budget.
                        return Ok(ReducerOutput::decide(Decision::Reject));
                    }
                    head + 1
                }
            };
            if reducer_machine.is_halting(next_state) {
                return Ok(ReducerOutput::decide(
                    if next_state == reducer_machine.accept() {
                        Decision::Accept
                    } else {
                        Decision::Reject
                    },
                ));
            }
            let owner = plan.block_of_position(next_head + 1);
            Ok(ReducerOutput::pairs(vec![
                KeyValuePair::new(key.to_vec(), segment_value(j, &cells)),
                KeyValuePair::new(owner.to_string(), token_value(next_state, next_head)),
            ]))
        },
    );

    Ok(MrcProgram {
        rounds: time_budget,
        behavior: RoundBehavior::BuiltIn {
            name: "tape-segment-walk".into(),
            mapper,
            reducer,
        },
        limits: step_per_round_limits(time_budget),
        acceptance: Acceptance::AcceptState,
    })
}

/// Checks the construction's linear-space precondition at a concrete input
/// length: the space budget may exceed the input by at most the headroom
/// factor, which keeps segment sizes and the wake-up fan-out within the
/// emitted program's bounds.
pub fn tisp_space_feasibility(space_budget: usize, n: usize) -> Result<(), TranslateError> {
    let allowed = SPACE_HEADROOM.saturating_mul(n.max(1) as u64);
    if space_budget as u64 > allowed {
        return Err(TranslateError::InfeasibleSpace(format!(
            "space budget {space_budget} exceeds {SPACE_HEADROOM}·max(n,1) = {allowed} at n = {n}"
        )));
    }
    Ok(())
}
