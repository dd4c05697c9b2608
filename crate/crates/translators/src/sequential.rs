//! An independent single-threaded runner: mappers in sequence, an explicit
//! stable sort for the shuffle, reducers in sequence. It reproduces the
//! round engine's verdict and output exactly while accounting for every
//! sequential step — the shuffle is charged `pairs·⌈log₂(pairs+1)⌉` per
//! round — and checks the grand total against a polynomial envelope.

use std::collections::BTreeSet;

use mrc_core::{
    ceil_pow, invoke_mapper, invoke_reducer, log2_ceil, sentinel_pair, Acceptance, Decision,
    Enforcement, InputEncoding, KeyValuePair, MrcError, MrcProgram, Rational, RoundInfo,
    Verdict,
};

/// One round's sequential costs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundAccounting {
    pub round: u64,
    pub mapper_steps: u64,
    pub reducer_steps: u64,
    /// `total_pairs · ⌈log₂(total_pairs + 1)⌉` for the round's sort.
    pub shuffle_charge: u64,
    pub total_pairs: u64,
}

/// The whole run's sequential costs, their envelope, and how they compare.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequentialAccounting {
    pub per_round: Vec<RoundAccounting>,
    pub mapper_steps: u64,
    pub reducer_steps: u64,
    pub shuffle_charge: u64,
    /// `mapper_steps + reducer_steps + shuffle_charge`.
    pub simulated_time: u64,
    /// `8·R·(n^{β+1} + n²·⌈log₂ n⌉)` for the program's time exponent β.
    pub envelope: u64,
    /// Whether the total stayed inside the envelope. Guaranteed whenever the
    /// run respected its resource bounds.
    pub within_envelope: bool,
    /// Bound excesses observed along the way (counted, not enforced, when
    /// the program is record-only).
    pub bound_violations: u64,
}

/// Verdict and output of the sequential runner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequentialRun {
    pub verdict: Verdict,
    pub final_pairs: Vec<KeyValuePair>,
    pub accounting: SequentialAccounting,
}

/// The sequential-time envelope `8·R·(n^{β+1} + n²·⌈log₂ n⌉)`: `R` rounds,
/// each mapping every pair (at most `n^β` steps each over at most `n`-ish
/// pairs), sorting, and reducing. The constant 8 is generous on purpose —
/// the point is an asserted polynomial cap, not a tight fit.
pub fn sequential_envelope(program: &MrcProgram, n: usize) -> u64 {
    let n_eff = (n as u64).max(1);
    let beta = program.limits.time_bound.exponent;
    let beta_plus_one = Rational::new(
        beta.numerator().saturating_add(beta.denominator()),
        beta.denominator(),
    )
    .expect("denominator is positive");
    let poly = ceil_pow(n_eff, &beta_plus_one);
    let sort = n_eff
        .saturating_mul(n_eff)
        .saturating_mul(log2_ceil(n_eff) as u64);
    poly.saturating_add(sort)
        .saturating_mul(program.rounds)
        .saturating_mul(8)
}

/// Groups emitted pairs by an explicit stable sort on the key. Stability is
/// what makes this order canonical: pairs are appended in (invocation,
/// emission) order, so equal keys keep exactly that order — the same
/// tie-break the round engine applies.
fn sort_into_groups(mut emitted: Vec<KeyValuePair>) -> Vec<(Vec<u8>, Vec<Vec<u8>>)> {
    emitted.sort_by(|a, b| a.key.cmp(&b.key));
    let mut groups: Vec<(Vec<u8>, Vec<Vec<u8>>)> = Vec::new();
    for p in emitted {
        match groups.last_mut() {
            Some((key, values)) if *key == p.key => values.push(p.value),
            _ => groups.push((p.key, vec![p.value])),
        }
    }
    groups
}

/// Runs the program start to finish on one thread, mirroring the round
/// engine's semantics bound for bound: same placeholder for empty inputs,
/// same per-invocation and per-round resource checks (aborting after the
/// offending round when the program enforces), same verdict conventions.
pub fn simulate_mrc_sequential(
    program: &MrcProgram,
    input: &InputEncoding,
) -> Result<SequentialRun, MrcError> {
    let n = input.n();
    program.validate(n)?;
    let limits = &program.limits;
    let enforce = matches!(limits.enforcement, Enforcement::Enforce);
    let space_bound = limits.space_bytes(n);
    let steps_bound = limits.steps_per_invocation(n);
    let keys_per_invocation = limits.keys_per_invocation(n);
    let keys_per_round = limits.keys_per_round(n);
    let pairs_per_round = limits.pairs_per_round(n);

    let mut accounting = SequentialAccounting {
        per_round: Vec::new(),
        mapper_steps: 0,
        reducer_steps: 0,
        shuffle_charge: 0,
        simulated_time: 0,
        envelope: sequential_envelope(program, n),
        within_envelope: true,
        bound_violations: 0,
    };

    if program.rounds > limits.rounds_allowed(n) {
        accounting.bound_violations += 1;
        if enforce {
            accounting.within_envelope = true;
            return Ok(SequentialRun {
                verdict: Verdict::ResourceViolation,
                final_pairs: Vec::new(),
                accounting,
            });
        }
    }

    let mut pairs: Vec<KeyValuePair> = input.pairs().to_vec();
    if pairs.is_empty() {
        pairs.push(sentinel_pair());
    }

    let mut verdict: Option<Verdict> = None;
    for round in 1..=program.rounds {
        let info = RoundInfo { round, n };
        let mut round_violations = 0u64;

        // Mapper phase, strictly in sequence.
        let mut emitted: Vec<KeyValuePair> = Vec::new();
        let mut mapper_steps = 0u64;
        for pair in &pairs {
            let result = invoke_mapper(&program.behavior, pair, info, steps_bound)?;
            let out_bytes: u64 = result.pairs.iter().map(KeyValuePair::bytes).sum();
            let space = pair.bytes() + result.scratch_peak + out_bytes;
            let distinct: BTreeSet<&[u8]> =
                result.pairs.iter().map(|p| p.key.as_slice()).collect();
            if distinct.len() as u64 > keys_per_invocation {
                round_violations += 1;
            }
            if space > space_bound {
                round_violations += 1;
            }
            if result.steps > steps_bound {
                round_violations += 1;
            }
            mapper_steps += result.steps;
            emitted.extend(result.pairs);
        }

        // Explicit sort in place of the shuffle.
        let total_pairs = emitted.len() as u64;
        let groups = sort_into_groups(emitted);
        if groups.len() as u64 > keys_per_round {
            round_violations += 1;
        }
        if total_pairs > pairs_per_round {
            round_violations += 1;
        }
        let shuffle_charge = total_pairs.saturating_mul(log2_ceil(total_pairs + 1) as u64);

        // Reducer phase, strictly in sequence.
        let mut next: Vec<KeyValuePair> = Vec::new();
        let mut reducer_steps = 0u64;
        let mut decision: Option<Decision> = None;
        for (key, values) in &groups {
            let result = invoke_reducer(&program.behavior, key, values, info, steps_bound)?;
            let in_bytes: u64 =
                key.len() as u64 + values.iter().map(|v| v.len() as u64).sum::<u64>();
            let out_bytes: u64 = result.pairs.iter().map(KeyValuePair::bytes).sum();
            let space = in_bytes + result.scratch_peak + out_bytes;
            if space > space_bound {
                round_violations += 1;
            }
            if result.steps > steps_bound {
                round_violations += 1;
            }
            reducer_steps += result.steps;
            match (decision, result.decision) {
                (Some(Decision::Accept), _) => {}
                (_, Some(Decision::Accept)) => decision = Some(Decision::Accept),
                (None, Some(Decision::Reject)) => decision = Some(Decision::Reject),
                _ => {}
            }
            next.extend(result.pairs);
        }

        pairs = next;
        accounting.per_round.push(RoundAccounting {
            round,
            mapper_steps,
            reducer_steps,
            shuffle_charge,
            total_pairs,
        });
        accounting.bound_violations += round_violations;

        if round_violations > 0 && enforce {
            verdict = Some(Verdict::ResourceViolation);
            break;
        }
        if program.acceptance == Acceptance::AcceptState {
            match decision {
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
            if pairs.is_empty() {
                Verdict::Accept
            } else {
                Verdict::Reject
            }
        }
    });

    for r in &accounting.per_round {
        accounting.mapper_steps += r.mapper_steps;
        accounting.reducer_steps += r.reducer_steps;
        accounting.shuffle_charge += r.shuffle_charge;
    }
    accounting.simulated_time =
        accounting.mapper_steps + accounting.reducer_steps + accounting.shuffle_charge;
    accounting.within_envelope = accounting.simulated_time <= accounting.envelope;
    // For bound-respecting runs past the constant-bookkeeping regime (at
    // tiny n, fixed per-round record sizes — tables, markers — can exceed
    // the polynomial, which says nothing about the accounting), exceeding
    // the envelope means the runner's cost model drifted.
    debug_assert!(
        n < 32 || accounting.within_envelope || accounting.bound_violations > 0,
        "sequential time {} exceeded the envelope {} without any bound excess",
        accounting.simulated_time,
        accounting.envelope
    );

    Ok(SequentialRun {
        verdict,
        final_pairs: pairs,
        accounting,
    })
}
