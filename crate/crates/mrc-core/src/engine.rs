//! The round engine: mapper phase, shuffle-and-sort, reducer phase, with
//! full metering and schedule-independent results.
//!
//! Invocations within a phase are mutually independent, so the engine may
//! execute them in any order — in canonical order, in a seeded random
//! permutation, or in parallel. Results are always stored by canonical
//! invocation index and merged in canonical order, violations are scanned in
//! canonical order, and all metrics are order-insensitive aggregates, so
//! every schedule produces the identical report. Rounds are separated by a
//! strict barrier: round r+1 sees exactly the reducer outputs of round r.

use crate::behavior::{invoke_mapper, invoke_reducer, InvocationResult, RoundInfo};
use crate::error::MrcError;
use crate::pair::{shuffle_and_sort, InputEncoding, KeyGroup, KeyValuePair, PlacedPair};
use crate::program::{Acceptance, MrcProgram};
use crate::report::{
    BoundKind, Decision, Phase, ResourceReport, RoundMetrics, Verdict, Violation,
};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::BTreeSet;

/// The order in which a phase's invocations are executed. Results never
/// depend on the choice; tests exercise all three to prove it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schedule {
    /// Canonical order.
    InOrder,
    /// A seeded random permutation per phase.
    Permuted { seed: u64 },
    /// A work-stealing thread pool.
    Parallel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub schedule: Schedule,
    /// Capture every round's output pair list in the outcome.
    pub capture_trace: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            schedule: Schedule::InOrder,
            capture_trace: false,
        }
    }
}

/// The multiset `U_r` with provenance, between rounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundState {
    /// 0 before round 1; r after round r.
    pub round_index: u64,
    pub pairs: Vec<PlacedPair>,
}

/// One round's output pairs, for trace inspection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundSnapshot {
    pub round: u64,
    pub pairs: Vec<KeyValuePair>,
}

/// The full result of a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutcome {
    pub verdict: Verdict,
    pub report: ResourceReport,
    /// The pairs of the last executed round (the program's output).
    pub final_pairs: Vec<KeyValuePair>,
    pub trace: Option<Vec<RoundSnapshot>>,
}

/// The placeholder pair injected as `U_0` when the input is empty, so that
/// round behaviours still run (an empty input is a legal input whose verdict
/// the program must still produce). Its key `"0"` can never collide with the
/// 1-based indices of the standard encoding.
pub fn sentinel_pair() -> KeyValuePair {
    KeyValuePair::new("0", "")
}

/// Derived per-round bounds, evaluated once per run.
#[derive(Debug, Clone, Copy)]
struct RoundBounds {
    space: u64,
    steps: u64,
    keys_per_invocation: u64,
    keys_per_round: u64,
    pairs_per_round: u64,
}

/// Executes invocations 0..count under the schedule, storing results by
/// canonical index, then surfaces the lowest-index error if any.
fn execute_indexed<T, F>(count: usize, schedule: Schedule, f: F) -> Result<Vec<T>, MrcError>
where
    T: Send,
    F: Fn(usize) -> Result<T, MrcError> + Sync,
{
    let results: Vec<Result<T, MrcError>> = match schedule {
        Schedule::InOrder => (0..count).map(&f).collect(),
        Schedule::Permuted { seed } => {
            let mut order: Vec<usize> = (0..count).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            order.shuffle(&mut rng);
            let mut slots: Vec<Option<Result<T, MrcError>>> =
                (0..count).map(|_| None).collect();
            for i in order {
                slots[i] = Some(f(i));
            }
            slots.into_iter().map(|s| s.expect("every slot filled")).collect()
        }
        Schedule::Parallel => (0..count).into_par_iter().map(&f).collect(),
    };
    // Canonical-order error surfacing keeps failures schedule-independent.
    let mut out = Vec::with_capacity(count);
    for r in results {
        out.push(r?);
    }
    Ok(out)
}

struct RoundExec {
    next: RoundState,
    metrics: RoundMetrics,
    violations: Vec<Violation>,
    decision: Option<Decision>,
}

fn phase_schedule(schedule: Schedule, round: u64, phase: u64) -> Schedule {
    match schedule {
        // Derive a distinct permutation per (round, phase).
        Schedule::Permuted { seed } => Schedule::Permuted {
            seed: seed ^ (round.wrapping_mul(2).wrapping_add(phase)).wrapping_mul(0x9e37_79b9_7f4a_7c15),
        },
        other => other,
    }
}

fn execute_round(
    state: &RoundState,
    program: &MrcProgram,
    n: usize,
    bounds: &RoundBounds,
    schedule: Schedule,
) -> Result<RoundExec, MrcError> {
    let round = state.round_index + 1;
    let info = RoundInfo { round, n };
    let behavior = &program.behavior;

    // Mapper phase: one invocation per pair of U_{r-1}.
    let mapper_results: Vec<InvocationResult> = execute_indexed(
        state.pairs.len(),
        phase_schedule(schedule, round, 0),
        |i| invoke_mapper(behavior, &state.pairs[i].pair, info, bounds.steps),
    )?;

    let mut emitted: Vec<PlacedPair> = Vec::new();
    let mut mapper_keys_max = 0u64;
    let mut mapper_space_max = 0u64;
    let mut steps_max = 0u64;
    let mut mapper_steps = 0u64;
    let mut mapper_stats: Vec<(u64, u64, u64)> = Vec::with_capacity(mapper_results.len());
    for (i, result) in mapper_results.iter().enumerate() {
        let input_bytes = state.pairs[i].pair.bytes();
        let out_bytes: u64 = result.pairs.iter().map(KeyValuePair::bytes).sum();
        let space = input_bytes + result.scratch_peak + out_bytes;
        let distinct: BTreeSet<&[u8]> =
            result.pairs.iter().map(|p| p.key.as_slice()).collect();
        let keys = distinct.len() as u64;
        mapper_keys_max = mapper_keys_max.max(keys);
        mapper_space_max = mapper_space_max.max(space);
        steps_max = steps_max.max(result.steps);
        mapper_steps += result.steps;
        mapper_stats.push((keys, space, result.steps));
        for (j, pair) in result.pairs.iter().enumerate() {
            emitted.push(PlacedPair::new(pair.clone(), i, j));
        }
    }

    // Shuffle-and-sort: groups in canonical order. Not charged to any
    // invocation; its sequential cost is the round's shuffle charge.
    let groups: Vec<KeyGroup> = shuffle_and_sort(emitted);
    let total_pairs: u64 = groups.iter().map(|g| g.values.len() as u64).sum();
    let total_distinct_keys = groups.len() as u64;

    // Reducer phase: one invocation per key group.
    let reducer_results: Vec<InvocationResult> = execute_indexed(
        groups.len(),
        phase_schedule(schedule, round, 1),
        |g| invoke_reducer(behavior, &groups[g].key, &groups[g].values, info, bounds.steps),
    )?;

    let mut next_pairs: Vec<PlacedPair> = Vec::new();
    let mut reducer_input_max = 0u64;
    let mut reducer_space_max = 0u64;
    let mut reducer_steps = 0u64;
    let mut reducer_stats: Vec<(u64, u64)> = Vec::with_capacity(reducer_results.len());
    let mut decision: Option<Decision> = None;
    for (g, result) in reducer_results.iter().enumerate() {
        let input_bytes = groups[g].input_bytes();
        let out_bytes: u64 = result.pairs.iter().map(KeyValuePair::bytes).sum();
        let space = input_bytes + result.scratch_peak + out_bytes;
        reducer_input_max = reducer_input_max.max(input_bytes);
        reducer_space_max = reducer_space_max.max(space);
        steps_max = steps_max.max(result.steps);
        reducer_steps += result.steps;
        reducer_stats.push((space, result.steps));
        match (decision, result.decision) {
            // Accept wins over reject; the earliest flag of each kind is as
            // good as any other since flags are round-level.
            (Some(Decision::Accept), _) => {}
            (_, Some(Decision::Accept)) => decision = Some(Decision::Accept),
            (None, Some(Decision::Reject)) => decision = Some(Decision::Reject),
            _ => {}
        }
        for (j, pair) in result.pairs.iter().enumerate() {
            next_pairs.push(PlacedPair::new(pair.clone(), g, j));
        }
    }

    let shuffle_charge =
        total_pairs.saturating_mul(crate::limits::log2_ceil(total_pairs + 1) as u64);

    // Violation scan in canonical order: mapper invocations, round totals,
    // reducer invocations — deterministic regardless of schedule.
    let mut violations = Vec::new();
    for (i, &(keys, space, steps)) in mapper_stats.iter().enumerate() {
        let mut record = |bound, measured, allowed| {
            violations.push(Violation {
                round,
                phase: Some(Phase::Mapper),
                invocation: Some(i),
                key: None,
                bound,
                measured,
                allowed,
            })
        };
        if keys > bounds.keys_per_invocation {
            record(BoundKind::KeysPerInvocation, keys, bounds.keys_per_invocation);
        }
        if space > bounds.space {
            record(BoundKind::Space, space, bounds.space);
        }
        if steps > bounds.steps {
            record(BoundKind::Steps, steps, bounds.steps);
        }
    }
    if total_distinct_keys > bounds.keys_per_round {
        violations.push(Violation {
            round,
            phase: None,
            invocation: None,
            key: None,
            bound: BoundKind::KeysPerRound,
            measured: total_distinct_keys,
            allowed: bounds.keys_per_round,
        });
    }
    if total_pairs > bounds.pairs_per_round {
        violations.push(Violation {
            round,
            phase: None,
            invocation: None,
            key: None,
            bound: BoundKind::PairsPerRound,
            measured: total_pairs,
            allowed: bounds.pairs_per_round,
        });
    }
    for (g, &(space, steps)) in reducer_stats.iter().enumerate() {
        let mut record = |bound, measured, allowed| {
            violations.push(Violation {
                round,
                phase: Some(Phase::Reducer),
                invocation: Some(g),
                key: Some(groups[g].key.clone()),
                bound,
                measured,
                allowed,
            })
        };
        if space > bounds.space {
            record(BoundKind::Space, space, bounds.space);
        }
        if steps > bounds.steps {
            record(BoundKind::Steps, steps, bounds.steps);
        }
    }

    let metrics = RoundMetrics {
        round,
        distinct_keys_per_mapper_invocation: mapper_keys_max,
        total_distinct_keys,
        total_pairs,
        max_reducer_input_bytes: reducer_input_max,
        max_working_space_bytes: mapper_space_max.max(reducer_space_max),
        max_steps_per_invocation: steps_max,
        mapper_steps,
        reducer_steps,
        shuffle_charge,
    };

    Ok(RoundExec {
        next: RoundState {
            round_index: round,
            pairs: next_pairs,
        },
        metrics,
        violations,
        decision,
    })
}

/// Executes one round of `program` against `state` (whose `round_index`
/// must be less than `program.rounds`). Returns the next state, the round's
/// metrics, and any bound excesses observed.
pub fn run_round(
    state: &RoundState,
    program: &MrcProgram,
    n: usize,
    options: &RunOptions,
) -> Result<(RoundState, RoundMetrics, Vec<Violation>), MrcError> {
    if state.round_index >= program.rounds {
        return Err(MrcError::InvalidProgram(format!(
            "round index {} is past the program's {} rounds",
            state.round_index, program.rounds
        )));
    }
    let bounds = derive_bounds(program, n);
    let exec = execute_round(state, program, n, &bounds, options.schedule)?;
    Ok((exec.next, exec.metrics, exec.violations))
}

fn derive_bounds(program: &MrcProgram, n: usize) -> RoundBounds {
    RoundBounds {
        space: program.limits.space_bytes(n),
        steps: program.limits.steps_per_invocation(n),
        keys_per_invocation: program.limits.keys_per_invocation(n),
        keys_per_round: program.limits.keys_per_round(n),
        pairs_per_round: program.limits.pairs_per_round(n),
    }
}

/// Runs the program on the input: rounds 1..=R with early exit on a verdict
/// flag (accept-state convention) or on a violation under enforcement.
pub fn run(
    program: &MrcProgram,
    input: &InputEncoding,
    options: &RunOptions,
) -> Result<RunOutcome, MrcError> {
    let n = input.n();
    program.validate(n)?;
    let bounds = derive_bounds(program, n);
    let enforce = matches!(
        program.limits.enforcement,
        crate::limits::Enforcement::Enforce
    );

    let mut report = ResourceReport::new(Verdict::Reject);
    let mut trace: Vec<RoundSnapshot> = Vec::new();

    // Round-count bound: checked before anything runs.
    let rounds_allowed = program.limits.rounds_allowed(n);
    if program.rounds > rounds_allowed {
        report.violations.push(Violation {
            round: 0,
            phase: None,
            invocation: None,
            key: None,
            bound: BoundKind::RoundCount,
            measured: program.rounds,
            allowed: rounds_allowed,
        });
        if enforce {
            report.verdict = Verdict::ResourceViolation;
            return Ok(RunOutcome {
                verdict: Verdict::ResourceViolation,
                report,
                final_pairs: Vec::new(),
                trace: options.capture_trace.then_some(trace),
            });
        }
    }

    let mut placed: Vec<PlacedPair> = input
        .pairs()
        .iter()
        .enumerate()
        .map(|(i, p)| PlacedPair::new(p.clone(), i, 0))
        .collect();
    if placed.is_empty() {
        placed.push(PlacedPair::new(sentinel_pair(), 0, 0));
    }
    let mut state = RoundState {
        round_index: 0,
        pairs: placed,
    };

    let mut verdict: Option<Verdict> = None;
    for _ in 1..=program.rounds {
        let exec = execute_round(&state, program, n, &bounds, options.schedule)?;
        state = exec.next;
        report.rounds_executed += 1;
        report.simulated_sequential_time = report
            .simulated_sequential_time
            .saturating_add(exec.metrics.mapper_steps)
            .saturating_add(exec.metrics.reducer_steps)
            .saturating_add(exec.metrics.shuffle_charge);
        report.rounds.push(exec.metrics);
        if options.capture_trace {
            trace.push(RoundSnapshot {
                round: state.round_index,
                pairs: state.pairs.iter().map(|p| p.pair.clone()).collect(),
            });
        }
        if !exec.violations.is_empty() {
            if enforce {
                // Abort at the first (canonical) violation.
                report.violations.push(exec.violations.into_iter().next().unwrap());
                verdict = Some(Verdict::ResourceViolation);
                break;
            }
            report.violations.extend(exec.violations);
        }
        if program.acceptance == Acceptance::AcceptState {
            match exec.decision {
                Some(Decision::Accept) => {
                    verdict = Some(Verdict::Accept);
                    break;
                }
                Some(Decision::Reject) => {
                    verdict = Some(Verdict::Reject);
                    break;
                }
                None => {}
            }
        }
    }

    let verdict = verdict.unwrap_or_else(|| match program.acceptance {
        Acceptance::AcceptState => Verdict::Reject,
        Acceptance::EmptyFinalRound => {
            if state.pairs.is_empty() {
                Verdict::Accept
            } else {
                Verdict::Reject
            }
        }
    });
    report.verdict = verdict;
    Ok(RunOutcome {
        verdict,
        report,
        final_pairs: state.pairs.iter().map(|p| p.pair.clone()).collect(),
        trace: options.capture_trace.then_some(trace),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::behavior::{ReducerOutput, RoundBehavior};
    use crate::limits::{Enforcement, PolyBound, Rational, ResourceLimits};
    use crate::pair::encode_input;
    use std::sync::Arc;

    fn identity_behavior() -> RoundBehavior {
        RoundBehavior::BuiltIn {
            name: "identity".into(),
            mapper: Arc::new(|pair, _, _| Ok(vec![pair.clone()])),
            reducer: Arc::new(|key, values, _, _| {
                Ok(ReducerOutput::pairs(
                    values
                        .iter()
                        .map(|v| KeyValuePair::new(key.to_vec(), v.clone()))
                        .collect(),
                ))
            }),
        }
    }

    fn program(rounds: u64, behavior: RoundBehavior) -> MrcProgram {
        MrcProgram {
            rounds,
            behavior,
            limits: ResourceLimits::default(),
            acceptance: Acceptance::AcceptState,
        }
    }

    #[test]
    fn identity_round_preserves_pairs() {
        let p = program(1, identity_behavior());
        let input = encode_input(b"1011").unwrap();
        let out = run(&p, &input, &RunOptions::default()).unwrap();
        assert_eq!(out.final_pairs.len(), 4);
        let mut got = out.final_pairs.clone();
        got.sort();
        let mut want = input.pairs().to_vec();
        want.sort();
        assert_eq!(got, want);
        assert_eq!(out.verdict, Verdict::Reject); // no flag ever raised
        assert_eq!(out.report.rounds_executed, 1);
        assert_eq!(out.report.rounds[0].total_pairs, 4);
        assert_eq!(out.report.rounds[0].total_distinct_keys, 4);
    }

    #[test]
    fn swap_mapper_groups_values_by_word() {
        // (k, v) ↦ (v, k): indices grouped under each word.
        let behavior = RoundBehavior::BuiltIn {
            name: "swap".into(),
            mapper: Arc::new(|pair, _, _| {
                Ok(vec![KeyValuePair::new(pair.value.clone(), pair.key.clone())])
            }),
            reducer: Arc::new(|key, values, _, _| {
                Ok(ReducerOutput::pairs(vec![KeyValuePair::new(
                    key.to_vec(),
                    values.len().to_string(),
                )]))
            }),
        };
        let input = InputEncoding::from_pairs(vec![
            KeyValuePair::new("1", "the"),
            KeyValuePair::new("2", "fox"),
            KeyValuePair::new("3", "the"),
        ]);
        let p = program(1, behavior);
        let out = run(&p, &input, &RunOptions::default()).unwrap();
        assert_eq!(
            out.final_pairs,
            vec![KeyValuePair::new("fox", "1"), KeyValuePair::new("the", "2")]
        );
    }

    #[test]
    fn immediate_accept_stops_after_round_one() {
        let behavior = RoundBehavior::BuiltIn {
            name: "accept".into(),
            mapper: Arc::new(|pair, _, _| Ok(vec![pair.clone()])),
            reducer: Arc::new(|_, _, _, _| Ok(ReducerOutput::decide(Decision::Accept))),
        };
        let p = program(4, behavior);
        let input = encode_input(b"01").unwrap();
        let out = run(&p, &input, &RunOptions::default()).unwrap();
        assert_eq!(out.verdict, Verdict::Accept);
        assert_eq!(out.report.rounds_executed, 1);
    }

    #[test]
    fn reject_flag_stops_early_too() {
        let behavior = RoundBehavior::BuiltIn {
            name: "reject-in-round-2".into(),
            mapper: Arc::new(|pair, _, _| Ok(vec![pair.clone()])),
            reducer: Arc::new(|key, values, info, _| {
                Ok(if info.round == 2 {
                    ReducerOutput::decide(Decision::Reject)
                } else {
                    ReducerOutput::pairs(
                        values
                            .iter()
                            .map(|v| KeyValuePair::new(key.to_vec(), v.clone()))
                            .collect(),
                    )
                })
            }),
        };
        let p = program(4, behavior);
        let out = run(&p, &encode_input(b"01").unwrap(), &RunOptions::default()).unwrap();
        assert_eq!(out.verdict, Verdict::Reject);
        assert_eq!(out.report.rounds_executed, 2);
    }

    #[test]
    fn empty_input_still_drives_rounds() {
        let behavior = RoundBehavior::BuiltIn {
            name: "accept-on-sentinel".into(),
            mapper: Arc::new(|pair, _, _| Ok(vec![pair.clone()])),
            reducer: Arc::new(|key, _, _, _| {
                Ok(if key == b"0" {
                    ReducerOutput::decide(Decision::Accept)
                } else {
                    ReducerOutput::empty()
                })
            }),
        };
        let p = program(1, behavior);
        let out = run(&p, &encode_input(b"").unwrap(), &RunOptions::default()).unwrap();
        assert_eq!(out.verdict, Verdict::Accept);
        assert_eq!(out.report.rounds_executed, 1);
    }

    #[test]
    fn empty_final_round_convention() {
        let discard = RoundBehavior::BuiltIn {
            name: "discard".into(),
            mapper: Arc::new(|pair, _, _| Ok(vec![pair.clone()])),
            reducer: Arc::new(|_, _, _, _| Ok(ReducerOutput::empty())),
        };
        let mut p = program(1, discard);
        p.acceptance = Acceptance::EmptyFinalRound;
        let out = run(&p, &encode_input(b"111").unwrap(), &RunOptions::default()).unwrap();
        assert_eq!(out.verdict, Verdict::Accept);

        let mut p = program(1, identity_behavior());
        p.acceptance = Acceptance::EmptyFinalRound;
        let out = run(&p, &encode_input(b"111").unwrap(), &RunOptions::default()).unwrap();
        assert_eq!(out.verdict, Verdict::Reject);
    }

    #[test]
    fn schedules_produce_identical_reports() {
        // A behaviour with plenty of cross-key traffic.
        let behavior = RoundBehavior::BuiltIn {
            name: "scatter".into(),
            mapper: Arc::new(|pair, _, _| {
                let mut out = Vec::new();
                for d in 0..3u8 {
                    out.push(KeyValuePair::new(
                        vec![b'k', b'0' + d],
                        [pair.key.clone(), pair.value.clone()].concat(),
                    ));
                }
                Ok(out)
            }),
            reducer: Arc::new(|key, values, _, _| {
                Ok(ReducerOutput::pairs(vec![KeyValuePair::new(
                    key.to_vec(),
                    values.iter().map(|v| v.len()).sum::<usize>().to_string(),
                )]))
            }),
        };
        let p = program(3, behavior);
        let input = encode_input(b"1100101").unwrap();
        let baseline = run(&p, &input, &RunOptions::default()).unwrap();
        for schedule in [
            Schedule::Permuted { seed: 1 },
            Schedule::Permuted { seed: 99 },
            Schedule::Parallel,
        ] {
            let out = run(
                &p,
                &input,
                &RunOptions {
                    schedule,
                    capture_trace: false,
                },
            )
            .unwrap();
            assert_eq!(out.report, baseline.report, "schedule {schedule:?}");
            assert_eq!(out.final_pairs, baseline.final_pairs);
        }
    }

    #[test]
    fn key_flood_is_caught_under_enforcement() {
        // One mapper invocation emits n distinct keys; with keys_constant 1
        // and c = 1/2 that exceeds ⌈√n⌉ for n ≥ 2.
        let behavior = RoundBehavior::BuiltIn {
            name: "flood".into(),
            mapper: Arc::new(|_, info, _| {
                Ok((0..info.n)
                    .map(|i| KeyValuePair::new(format!("k{i}"), ""))
                    .collect())
            }),
            reducer: Arc::new(|_, _, _, _| Ok(ReducerOutput::empty())),
        };
        let mut limits = ResourceLimits {
            keys_constant: Rational::from_integer(1),
            enforcement: Enforcement::Enforce,
            ..ResourceLimits::default()
        };
        // Keep other bounds out of the way.
        limits.space_constant = Rational::from_integer(1000);
        limits.time_bound = PolyBound::new(Rational::from_integer(1000), Rational::from_integer(1));
        let p = MrcProgram {
            rounds: 1,
            behavior,
            limits,
            acceptance: Acceptance::AcceptState,
        };
        let out = run(&p, &encode_input(b"1111").unwrap(), &RunOptions::default()).unwrap();
        assert_eq!(out.verdict, Verdict::ResourceViolation);
        assert_eq!(out.report.violations.len(), 1);
        let v = &out.report.violations[0];
        assert_eq!(v.bound, BoundKind::KeysPerInvocation);
        assert_eq!(v.round, 1);
        assert_eq!(v.phase, Some(Phase::Mapper));
        assert_eq!(v.measured, 4);
        assert_eq!(v.allowed, 2);
    }

    #[test]
    fn record_only_notes_violations_and_continues() {
        let behavior = RoundBehavior::BuiltIn {
            name: "flood".into(),
            mapper: Arc::new(|_, info, _| {
                Ok((0..info.n)
                    .map(|i| KeyValuePair::new(format!("k{i}"), ""))
                    .collect())
            }),
            reducer: Arc::new(|_, _, _, _| Ok(ReducerOutput::empty())),
        };
        let limits = ResourceLimits {
            keys_constant: Rational::from_integer(1),
            ..ResourceLimits::default()
        };
        let p = MrcProgram {
            rounds: 2,
            behavior,
            limits,
            acceptance: Acceptance::AcceptState,
        };
        let out = run(&p, &encode_input(b"1111").unwrap(), &RunOptions::default()).unwrap();
        assert_eq!(out.verdict, Verdict::Reject); // ran to completion
        assert_eq!(out.report.rounds_executed, 2);
        assert!(!out.report.violations.is_empty());
    }

    #[test]
    fn oversized_round_count_fails_validation() {
        // 10^19 rounds needs 20 digits; the default budget at n = 1 is 4
        // bytes.
        let p = program(10_000_000_000_000_000_000, identity_behavior());
        let err = run(&p, &encode_input(b"1").unwrap(), &RunOptions::default()).unwrap_err();
        assert!(matches!(err, MrcError::InvalidProgram(_)));
    }

    #[test]
    fn round_bound_violation_is_a_verdict_not_an_error() {
        let mut p = program(9, identity_behavior());
        p.limits.enforcement = Enforcement::Enforce;
        // Default round bound is 4·n^0 = 4 < 9.
        let out = run(&p, &encode_input(b"11").unwrap(), &RunOptions::default()).unwrap();
        assert_eq!(out.verdict, Verdict::ResourceViolation);
        assert_eq!(out.report.violations[0].bound, BoundKind::RoundCount);
        assert_eq!(out.report.rounds_executed, 0);
    }

    #[test]
    fn sequential_time_is_nondecreasing_and_summed() {
        let p = program(3, identity_behavior());
        let input = encode_input(b"10101010").unwrap();
        let out = run(&p, &input, &RunOptions::default()).unwrap();
        let mut cumulative = 0u64;
        for m in &out.report.rounds {
            cumulative += m.mapper_steps + m.reducer_steps + m.shuffle_charge;
        }
        assert_eq!(out.report.simulated_sequential_time, cumulative);
        assert!(cumulative > 0);
    }

    #[test]
    fn trace_captures_each_rounds_output() {
        let p = program(2, identity_behavior());
        let input = encode_input(b"10").unwrap();
        let out = run(
            &p,
            &input,
            &RunOptions {
                schedule: Schedule::InOrder,
                capture_trace: true,
            },
        )
        .unwrap();
        let trace = out.trace.unwrap();
        assert_eq!(trace.len(), 2);
        assert_eq!(trace[0].round, 1);
        assert_eq!(trace[0].pairs.len(), 2);
    }

    #[test]
    fn metering_soundness_recomputed() {
        // max_reducer_input_bytes must dominate the byte length of the
        // largest group actually formed.
        let p = program(1, identity_behavior());
        let input = encode_input(b"110").unwrap();
        let out = run(&p, &input, &RunOptions::default()).unwrap();
        // Groups here are singletons: key "1".."3" (1 byte) + value (1 byte).
        assert_eq!(out.report.rounds[0].max_reducer_input_bytes, 2);
        assert!(out.report.rounds[0].max_working_space_bytes >= 2);
    }

    #[test]
    fn behavior_errors_carry_round_and_phase() {
        let behavior = RoundBehavior::BuiltIn {
            name: "broken".into(),
            mapper: Arc::new(|pair, _, _| Ok(vec![pair.clone()])),
            reducer: Arc::new(|_, _, _, _| Err("boom".into())),
        };
        let p = program(1, behavior);
        let err = run(&p, &encode_input(b"1").unwrap(), &RunOptions::default()).unwrap_err();
        match err {
            MrcError::Behavior { round, phase, message } => {
                assert_eq!(round, 1);
                assert_eq!(phase, "reducer");
                assert_eq!(message, "boom");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }
}
