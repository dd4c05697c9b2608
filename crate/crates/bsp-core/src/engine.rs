//! The barrier engine: every processor computes once per round, messages
//! cross at the barrier, and any processor's accept flag ends the run.
//!
//! Results are schedule-independent the same way the round engine's are:
//! processors within a round are mutually isolated, results are stored by
//! processor index, and violations are scanned in index order. Delivery is
//! canonical — a receiver sees payloads ordered by (sender index, emission
//! index) — and uncharged, mirroring how regrouping between rounds is free.
//!
//! The resource report reuses the round-based report shape, with messages
//! standing in for pairs and destinations for keys: `total_pairs` counts
//! messages sent, `total_distinct_keys` counts distinct destinations,
//! `distinct_keys_per_mapper_invocation` is the per-processor maximum of
//! distinct destinations, and all compute steps land in `mapper_steps`.

use mrc_core::{
    log2_ceil, BoundKind, Enforcement, ResourceReport, RoundMetrics, RunOptions, ScratchMeter,
    Schedule, Verdict, Violation,
};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::BTreeSet;

use crate::error::BspError;
use crate::machine::{BspMachine, BspRoundCtx, BspStep, Message};

/// One round's sent messages, for trace inspection. Messages listed here
/// are delivered at the following barrier — except in the run's last round,
/// whose messages are dropped undelivered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BspRoundSnapshot {
    pub round: u64,
    pub messages: Vec<Message>,
}

/// The full result of a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BspOutcome {
    pub verdict: Verdict,
    pub report: ResourceReport,
    /// Messages sent in the last executed round, in canonical order. They
    /// were never delivered — the barrier after the final round does not
    /// fire — but they are the run's residual output.
    pub final_messages: Vec<Message>,
    pub trace: Option<Vec<BspRoundSnapshot>>,
}

/// Executes invocations 0..count under the schedule, storing results by
/// canonical index and surfacing the lowest-index error.
fn execute_indexed<T, F>(count: usize, schedule: Schedule, f: F) -> Result<Vec<T>, BspError>
where
    T: Send,
    F: Fn(usize) -> Result<T, BspError> + Sync,
{
    let results: Vec<Result<T, BspError>> = match schedule {
        Schedule::InOrder => (0..count).map(&f).collect(),
        Schedule::Permuted { seed } => {
            let mut order: Vec<usize> = (0..count).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            order.shuffle(&mut rng);
            let mut slots: Vec<Option<Result<T, BspError>>> = (0..count).map(|_| None).collect();
            for i in order {
                slots[i] = Some(f(i));
            }
            slots
                .into_iter()
                .map(|s| s.expect("every slot filled"))
                .collect()
        }
        Schedule::Parallel => (0..count).into_par_iter().map(&f).collect(),
    };
    let mut out = Vec::with_capacity(count);
    for r in results {
        out.push(r?);
    }
    Ok(out)
}

fn phase_schedule(schedule: Schedule, round: u64) -> Schedule {
    match schedule {
        Schedule::Permuted { seed } => Schedule::Permuted {
            seed: seed ^ round.wrapping_mul(0x9e37_79b9_7f4a_7c15),
        },
        other => other,
    }
}

struct ProcessorResult {
    step: BspStep,
    scratch_peak: u64,
    in_bytes: u64,
}

/// Runs the machine on the input: pieces at round 1, barriers in between,
/// accept when any processor flags it, reject when the rounds run out.
pub fn run_bsp(
    machine: &BspMachine,
    input: &[u8],
    options: &RunOptions,
) -> Result<BspOutcome, BspError> {
    let n = input.len();
    machine.validate(n)?;
    let p = machine.p;
    let limits = &machine.limits;
    let enforce = matches!(limits.enforcement, Enforcement::Enforce);
    let space_bound = limits.space_bytes(n);
    let steps_bound = limits.steps_per_invocation(n);
    let dests_per_processor = limits.keys_per_invocation(n);
    let dests_per_round = limits.keys_per_round(n);
    let messages_per_round = limits.pairs_per_round(n);

    let mut report = ResourceReport::new(Verdict::Reject);
    let mut trace: Vec<BspRoundSnapshot> = Vec::new();

    let rounds_allowed = limits.rounds_allowed(n);
    if machine.rounds > rounds_allowed {
        report.violations.push(Violation {
            round: 0,
            phase: None,
            invocation: None,
            key: None,
            bound: BoundKind::RoundCount,
            measured: machine.rounds,
            allowed: rounds_allowed,
        });
        if enforce {
            report.verdict = Verdict::ResourceViolation;
            return Ok(BspOutcome {
                verdict: Verdict::ResourceViolation,
                report,
                final_messages: Vec::new(),
                trace: options.capture_trace.then_some(trace),
            });
        }
    }

    let pieces: Vec<&[u8]> = (1..=p)
        .map(|j| {
            let (start, len) = crate::machine::piece_range(n, p, j);
            &input[start - 1..start - 1 + len]
        })
        .collect();

    let mut inboxes: Vec<Vec<Vec<u8>>> = vec![Vec::new(); p];
    let mut final_messages: Vec<Message> = Vec::new();
    let mut verdict: Option<Verdict> = None;

    for round in 1..=machine.rounds {
        let results: Vec<ProcessorResult> =
            execute_indexed(p, phase_schedule(options.schedule, round), |i| {
                let ctx = BspRoundCtx {
                    processor: i + 1,
                    round,
                    n,
                    piece: if round == 1 { pieces[i] } else { &[] },
                    inbox: &inboxes[i],
                };
                let mut scratch = ScratchMeter::new();
                let step =
                    (machine.behavior)(&ctx, &mut scratch).map_err(|message| BspError::Behavior {
                        round,
                        processor: i + 1,
                        message,
                    })?;
                for m in &step.messages {
                    if m.dest == 0 || m.dest > p {
                        return Err(BspError::Behavior {
                            round,
                            processor: i + 1,
                            message: format!("message destination {} outside 1..={p}", m.dest),
                        });
                    }
                }
                let in_bytes = ctx.piece.len() as u64
                    + ctx.inbox.iter().map(|v| v.len() as u64).sum::<u64>();
                Ok(ProcessorResult {
                    step,
                    scratch_peak: scratch.peak(),
                    in_bytes,
                })
            })?;

        // Metrics and violations, in processor-index order.
        let mut dests_max = 0u64;
        let mut input_max = 0u64;
        let mut space_max = 0u64;
        let mut steps_max = 0u64;
        let mut steps_total = 0u64;
        let mut total_messages = 0u64;
        let mut round_dests: BTreeSet<usize> = BTreeSet::new();
        let mut violations: Vec<Violation> = Vec::new();
        let mut accepted = false;

        for (i, result) in results.iter().enumerate() {
            let out_bytes: u64 = result.step.messages.iter().map(|m| m.payload.len() as u64).sum();
            let space = result.in_bytes + result.scratch_peak + out_bytes;
            let steps = (result.in_bytes + out_bytes).max(1);
            let distinct: BTreeSet<usize> =
                result.step.messages.iter().map(|m| m.dest).collect();
            round_dests.extend(distinct.iter().copied());
            dests_max = dests_max.max(distinct.len() as u64);
            input_max = input_max.max(result.in_bytes);
            space_max = space_max.max(space);
            steps_max = steps_max.max(steps);
            steps_total += steps;
            total_messages += result.step.messages.len() as u64;
            accepted |= result.step.accept;

            let mut record = |bound, measured, allowed| {
                violations.push(Violation {
                    round,
                    phase: None,
                    invocation: Some(i),
                    key: None,
                    bound,
                    measured,
                    allowed,
                })
            };
            if distinct.len() as u64 > dests_per_processor {
                record(
                    BoundKind::KeysPerInvocation,
                    distinct.len() as u64,
                    dests_per_processor,
                );
            }
            if space > space_bound {
                record(BoundKind::Space, space, space_bound);
            }
            if steps > steps_bound {
                record(BoundKind::Steps, steps, steps_bound);
            }
        }
        if round_dests.len() as u64 > dests_per_round {
            violations.push(Violation {
                round,
                phase: None,
                invocation: None,
                key: None,
                bound: BoundKind::KeysPerRound,
                measured: round_dests.len() as u64,
                allowed: dests_per_round,
            });
        }
        if total_messages > messages_per_round {
            violations.push(Violation {
                round,
                phase: None,
                invocation: None,
                key: None,
                bound: BoundKind::PairsPerRound,
                measured: total_messages,
                allowed: messages_per_round,
            });
        }

        report.rounds_executed += 1;
        let shuffle_charge =
            total_messages.saturating_mul(log2_ceil(total_messages + 1) as u64);
        report.simulated_sequential_time = report
            .simulated_sequential_time
            .saturating_add(steps_total)
            .saturating_add(shuffle_charge);
        report.rounds.push(RoundMetrics {
            round,
            distinct_keys_per_mapper_invocation: dests_max,
            total_distinct_keys: round_dests.len() as u64,
            total_pairs: total_messages,
            max_reducer_input_bytes: input_max,
            max_working_space_bytes: space_max,
            max_steps_per_invocation: steps_max,
            mapper_steps: steps_total,
            reducer_steps: 0,
            shuffle_charge,
        });
        if options.capture_trace {
            trace.push(BspRoundSnapshot {
                round,
                messages: results
                    .iter()
                    .flat_map(|r| r.step.messages.iter().cloned())
                    .collect(),
            });
        }

        let stop = if !violations.is_empty() && enforce {
            report.violations.push(violations.into_iter().next().unwrap());
            verdict = Some(Verdict::ResourceViolation);
            true
        } else {
            report.violations.extend(violations);
            if accepted {
                verdict = Some(Verdict::Accept);
                true
            } else {
                round == machine.rounds
            }
        };

        if stop {
            final_messages = results
                .into_iter()
                .flat_map(|r| r.step.messages)
                .collect();
            break;
        }

        // Barrier: deliver every message to its destination. Iterating
        // senders in index order and emissions in order realizes the
        // canonical (sender, emission) inbox order.
        let mut next: Vec<Vec<Vec<u8>>> = vec![Vec::new(); p];
        for result in results {
            for m in result.step.messages {
                next[m.dest - 1].push(m.payload);
            }
        }
        inboxes = next;
    }

    let verdict = verdict.unwrap_or(Verdict::Reject);
    report.verdict = verdict;
    Ok(BspOutcome {
        verdict,
        report,
        final_messages,
        trace: options.capture_trace.then_some(trace),
    })
}
