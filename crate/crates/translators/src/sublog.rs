//! Deciding a small-work-tape machine's language in two rounds: round 1
//! tabulates, per block, where the machine exits for every (work
//! configuration, entry side); round 2 ships all the tables to one
//! collector that replays the whole run as table lookups. Feasible whenever
//! the machine's configuration count times the block count fits in the
//! collector's space budget — which is what `o(log n)` work space buys
//! asymptotically.

use std::sync::Arc;

use automata::{
    eliminate_stay_moves, tm_boundary_function, BoundaryOutcome, BoundaryTable, ConfigSpace,
    Side, Tm,
};
use mrc_core::{
    decimal_digits, Acceptance, Decision, Enforcement, KeyValuePair, MrcProgram, PolyBound,
    Rational, ReducerOutput, ResourceLimits, RoundBehavior,
};

use crate::block::BlockPlan;
use crate::error::TranslateError;
use crate::wire::{parse_decimal, position_fragment, reassemble_block, split_space_exponent};

/// Serializes one boundary outcome: `A`ccept, `R`eject, `D`iverged, or
/// `{config}L` / `{config}R` for an exit.
fn outcome_text(outcome: BoundaryOutcome) -> String {
    match outcome {
        BoundaryOutcome::Accept => "A".into(),
        BoundaryOutcome::Reject => "R".into(),
        BoundaryOutcome::Diverged => "D".into(),
        BoundaryOutcome::Exit { config, side } => {
            let s = match side {
                Side::Left => 'L',
                Side::Right => 'R',
            };
            format!("{config}{s}")
        }
    }
}

fn parse_outcome(text: &str, config_count: u32) -> Result<BoundaryOutcome, String> {
    match text {
        "A" => return Ok(BoundaryOutcome::Accept),
        "R" => return Ok(BoundaryOutcome::Reject),
        "D" => return Ok(BoundaryOutcome::Diverged),
        _ => {}
    }
    let (digits, side) = text.split_at(text.len().saturating_sub(1));
    let side = match side {
        "L" => Side::Left,
        "R" => Side::Right,
        _ => return Err(format!("boundary entry {text:?} has no exit side")),
    };
    let config: u32 = digits
        .parse()
        .map_err(|_| format!("boundary entry {text:?} has a malformed configuration"))?;
    if config >= config_count {
        return Err(format!(
            "boundary entry names configuration {config}, but only {config_count} exist"
        ));
    }
    Ok(BoundaryOutcome::Exit { config, side })
}

/// Serializes block `j`'s boundary table as `{j}|{e_0},{e_1},…` where entry
/// `2·c + side` describes entering in configuration `c` from that side.
fn boundary_value(j: usize, table: &BoundaryTable) -> Vec<u8> {
    let body: Vec<String> = table.entries().iter().map(|&e| outcome_text(e)).collect();
    format!("{j}|{}", body.join(",")).into_bytes()
}

fn parse_boundary_value(
    value: &[u8],
    config_count: u32,
) -> Result<(usize, BoundaryTable), String> {
    let text =
        std::str::from_utf8(value).map_err(|_| format!("table value {value:?} is not UTF-8"))?;
    let (j_text, body) = text
        .split_once('|')
        .ok_or_else(|| format!("table value {text:?} lacks a block tag"))?;
    let j: usize = j_text
        .parse()
        .map_err(|_| format!("table value has malformed block index {j_text:?}"))?;
    let entries: Vec<BoundaryOutcome> = body
        .split(',')
        .map(|t| parse_outcome(t, config_count))
        .collect::<Result<_, _>>()?;
    let table = BoundaryTable::from_entries(config_count, entries).map_err(|e| e.to_string())?;
    Ok((j, table))
}

/// Replays the machine over the block tables: starting from the initial
/// work configuration entering block 1 from the left, each lookup crosses
/// one block; an exit through a block's right side enters the next block
/// from its left side and vice versa. `config_count·K·2` lookups exhaust
/// every (configuration, block, side) triple, so exceeding that count
/// proves a loop.
fn chain_tables(
    tables: &[BoundaryTable],
    initial_config: u32,
    config_count: u32,
) -> Result<Decision, String> {
    let k = tables.len();
    let budget = config_count as u64 * k as u64 * 2;
    let mut j = 1usize;
    let mut side = Side::Left;
    let mut config = initial_config;
    let mut lookups = 0u64;
    loop {
        if lookups > budget {
            // Pigeonhole: some (configuration, block, side) repeated.
            return Ok(Decision::Reject);
        }
        match tables[j - 1].get(config, side) {
            BoundaryOutcome::Accept => return Ok(Decision::Accept),
            BoundaryOutcome::Reject | BoundaryOutcome::Diverged => return Ok(Decision::Reject),
            BoundaryOutcome::Exit {
                config: next,
                side: exit,
            } => {
                config = next;
                match exit {
                    Side::Right => j += 1,
                    Side::Left => j -= 1,
                }
                if j == 0 || j > k {
                    // End blocks absorb the input's end-markers, so the walk
                    // can never leave the tape.
                    return Err(format!(
                        "boundary chain left the input through block {j} of {k}"
                    ));
                }
                side = exit.flipped();
                lookups += 1;
            }
        }
    }
}

fn sublog_limits(epsilon: Rational) -> ResourceLimits {
    let big = Rational::from_integer(1 << 20);
    ResourceLimits {
        space_exponent: split_space_exponent(epsilon),
        space_constant: big,
        time_bound: PolyBound::new(big, Rational::from_integer(1)),
        keys_constant: Rational::from_integer(4),
        round_bound: PolyBound::new(Rational::from_integer(4), Rational::from_integer(0)),
        enforcement: Enforcement::RecordOnly,
    }
}

/// Compiles a work-tape machine into a 2-round program over the standard
/// indexed encoding of its input.
///
/// Round 1: the mapper sends pair `⟨i, x_i⟩` to block `⌈i/b⌉`; each block's
/// reducer reassembles its substring and tabulates the machine's boundary
/// behaviour on it, shipping the table to the single key `1`. Round 2: the
/// collector chains the tables from the initial configuration and accepts
/// iff the walk reaches the accept state. A provable in-block loop or a
/// walk that exhausts all (configuration, block, side) triples rejects,
/// matching the direct runner's verdict on diverging machines.
///
/// Machines that keep the input head in place are rewritten up front so the
/// per-block tables and the collector agree on one configuration space.
pub fn compile_sublog_tm_to_mrc(tm: &Tm, epsilon: Rational) -> Result<MrcProgram, TranslateError> {
    BlockPlan::new(0, epsilon)?;
    let machine = if tm.has_input_stay_moves() {
        Arc::new(eliminate_stay_moves(tm))
    } else {
        Arc::new(tm.clone())
    };
    let space = ConfigSpace::for_machine(&machine)?;
    let config_count = space.count() as u32;
    let initial_config = space.encode(&space.initial(&machine));

    let mapper_machine = Arc::clone(&machine);
    let mapper = Arc::new(
        move |pair: &KeyValuePair,
              info: mrc_core::RoundInfo,
              _scratch: &mut mrc_core::ScratchMeter|
              -> Result<Vec<KeyValuePair>, String> {
            if info.round != 1 {
                return Ok(vec![pair.clone()]);
            }
            if pair.key.as_slice() == b"0" {
                // Placeholder for the empty input: wake the single empty
                // block (the whole tape is just the two end-markers).
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
            if !mapper_machine.input_alphabet().contains(&symbol) {
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

    let reducer_machine = Arc::clone(&machine);
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
                        Vec::new()
                    } else {
                        reassemble_block(values.iter(), start, len)?
                    };
                    scratch.charge(block.len() as u64);
                    let table =
                        tm_boundary_function(&reducer_machine, &block, plan.role_of_block(j))
                            .map_err(|e| e.to_string())?;
                    Ok(ReducerOutput::pairs(vec![KeyValuePair::new(
                        "1",
                        boundary_value(j, &table),
                    )]))
                }
                2 => {
                    if key != b"1" {
                        return Err(format!("round-2 key {key:?}, expected the collector key"));
                    }
                    let k = plan.block_count();
                    let mut tables: Vec<Option<BoundaryTable>> = vec![None; k];
                    for value in values {
                        scratch.charge(value.len() as u64);
                        let (j, table) = parse_boundary_value(value, config_count)?;
                        if j == 0 || j > k {
                            return Err(format!("table block index {j} outside 1..={k}"));
                        }
                        if tables[j - 1].replace(table).is_some() {
                            return Err(format!("duplicate table for block {j}"));
                        }
                    }
                    let tables: Vec<BoundaryTable> = tables
                        .into_iter()
                        .enumerate()
                        .map(|(j, t)| t.ok_or_else(|| format!("missing table for block {}", j + 1)))
                        .collect::<Result<_, _>>()?;
                    let decision = chain_tables(&tables, initial_config, config_count)?;
                    Ok(ReducerOutput::decide(decision))
                }
                r => Err(format!("unexpected round {r} for a 2-round program")),
            }
        },
    );

    Ok(MrcProgram {
        rounds: 2,
        behavior: RoundBehavior::BuiltIn {
            name: "boundary-table-chain".into(),
            mapper,
            reducer,
        },
        limits: sublog_limits(epsilon),
        acceptance: Acceptance::AcceptState,
    })
}

/// Checks that the single collector can actually hold all `K` boundary
/// tables at input size `n` under the given limits. The guarantee is
/// asymptotic; at small `n` or large configuration counts the concrete
/// numbers can fail, and this reports how badly.
pub fn tm_collector_feasibility(
    tm: &Tm,
    n: usize,
    epsilon: Rational,
    limits: &ResourceLimits,
) -> Result<(), TranslateError> {
    let machine = if tm.has_input_stay_moves() {
        eliminate_stay_moves(tm)
    } else {
        tm.clone()
    };
    let space = ConfigSpace::for_machine(&machine)?;
    let plan = BlockPlan::new(n, epsilon)?;
    let config_count = space.count();
    // Worst-case serialized entry: `{config}L` plus a separator.
    let entry_bytes = decimal_digits(config_count.saturating_sub(1).max(1)) as u64 + 2;
    let table_bytes = config_count
        .saturating_mul(2)
        .saturating_mul(entry_bytes)
        .saturating_add(decimal_digits(plan.block_count() as u64) as u64 + 1);
    let total = table_bytes.saturating_mul(plan.block_count() as u64);
    let budget = limits.space_bytes(n);
    if total > budget {
        return Err(TranslateError::InfeasibleSpace(format!(
            "{} blocks × {} table bytes = {} exceeds the {}-byte collector budget at n = {}",
            plan.block_count(),
            table_bytes,
            total,
            budget,
            n
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use automata::sampling::{random_bits, random_tm};
    use automata::{run_tm, InputSymbol, Move, TmOutcome, TmTransition};
    use mrc_core::{run, InputEncoding, RunOptions, Verdict};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn half() -> Rational {
        Rational::new(1, 2).unwrap()
    }

    /// Scans right; accepts at the first '1', rejects at the right marker.
    fn contains_a_one() -> Tm {
        let scan = 0;
        let acc = 1;
        let rej = 2;
        let step = |next| TmTransition {
            next,
            write: b'0',
            work_move: Move::Stay,
            input_move: Move::Right,
        };
        Tm::from_rules(
            vec!["scan".into(), "acc".into(), "rej".into()],
            scan,
            acc,
            rej,
            b"01".to_vec(),
            b"0".to_vec(),
            b'0',
            1,
            &[
                (scan, InputSymbol::Byte(b'0'), b'0', step(scan)),
                (scan, InputSymbol::Byte(b'1'), b'0', step(acc)),
                (scan, InputSymbol::LeftMarker, b'0', step(scan)),
                (scan, InputSymbol::RightMarker, b'0', step(rej)),
            ],
        )
        .unwrap()
    }

    fn compiled_verdict(tm: &Tm, input: &[u8]) -> Verdict {
        let program = compile_sublog_tm_to_mrc(tm, half()).unwrap();
        run(
            &program,
            &InputEncoding::from_symbols(input),
            &RunOptions::default(),
        )
        .unwrap()
        .verdict
    }

    fn direct_verdict(tm: &Tm, input: &[u8]) -> Verdict {
        match run_tm(tm, input).unwrap().outcome {
            TmOutcome::Accept => Verdict::Accept,
            TmOutcome::Reject | TmOutcome::Diverged => Verdict::Reject,
        }
    }

    #[test]
    fn scanning_machine_matches_direct_runs() {
        let tm = contains_a_one();
        assert_eq!(compiled_verdict(&tm, b"00000000"), Verdict::Reject);
        assert_eq!(compiled_verdict(&tm, b"00000100"), Verdict::Accept);
        assert_eq!(direct_verdict(&tm, b"00000000"), Verdict::Reject);
        assert_eq!(direct_verdict(&tm, b"00000100"), Verdict::Accept);
    }

    #[test]
    fn immediate_accept_machine_decides_in_round_two() {
        // The lone working state is unreachable (the initial state is the
        // accept state) but still needs a total transition row.
        let idle = TmTransition {
            next: 0,
            write: b'0',
            work_move: Move::Stay,
            input_move: Move::Right,
        };
        let tm = Tm::from_rules(
            vec!["go".into(), "acc".into(), "rej".into()],
            1, // initial state is already the accept state
            1,
            2,
            b"01".to_vec(),
            b"0".to_vec(),
            b'0',
            1,
            &[
                (0, InputSymbol::LeftMarker, b'0', idle),
                (0, InputSymbol::RightMarker, b'0', idle),
                (0, InputSymbol::Byte(b'0'), b'0', idle),
                (0, InputSymbol::Byte(b'1'), b'0', idle),
            ],
        )
        .unwrap();
        let program = compile_sublog_tm_to_mrc(&tm, half()).unwrap();
        for input in [&b""[..], b"01"] {
            let outcome = run(
                &program,
                &InputEncoding::from_symbols(input),
                &RunOptions::default(),
            )
            .unwrap();
            assert_eq!(outcome.verdict, Verdict::Accept);
            assert_eq!(outcome.report.rounds_executed, 2);
        }
    }

    #[test]
    fn empty_input_agrees_with_the_direct_run() {
        let tm = contains_a_one();
        assert_eq!(compiled_verdict(&tm, b""), direct_verdict(&tm, b""));
    }

    #[test]
    fn random_machines_agree_with_direct_runs() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5ab1);
        let mut diverged = 0;
        for case in 0..60 {
            let tm = random_tm(&mut rng, 3, 2);
            let len = rand::Rng::gen_range(&mut rng, 0..40);
            let input = random_bits(&mut rng, len);
            let direct = run_tm(&tm, &input).unwrap();
            if direct.outcome == TmOutcome::Diverged {
                diverged += 1;
            }
            let expected = match direct.outcome {
                TmOutcome::Accept => Verdict::Accept,
                _ => Verdict::Reject,
            };
            assert_eq!(
                compiled_verdict(&tm, &input),
                expected,
                "case {case}, n = {len}"
            );
        }
        // The sweep should exercise the divergence path, not just halting runs.
        assert!(diverged > 0, "sweep never sampled a diverging machine");
    }

    #[test]
    fn feasibility_scales_with_the_budget() {
        let tm = contains_a_one();
        let generous = sublog_limits(half());
        assert!(tm_collector_feasibility(&tm, 4096, half(), &generous).is_ok());

        let tight = ResourceLimits {
            space_constant: Rational::from_integer(1),
            ..generous
        };
        let err = tm_collector_feasibility(&tm, 4096, half(), &tight).unwrap_err();
        assert!(matches!(err, TranslateError::InfeasibleSpace(_)), "{err}");
    }

    #[test]
    fn boundary_values_round_trip() {
        let tm = contains_a_one();
        let table = tm_boundary_function(&tm, b"0010", automata::BlockRole::Interior).unwrap();
        let space = ConfigSpace::for_machine(&tm).unwrap();
        let value = boundary_value(3, &table);
        let (j, parsed) = parse_boundary_value(&value, space.count() as u32).unwrap();
        assert_eq!(j, 3);
        assert_eq!(parsed, table);
    }
}
