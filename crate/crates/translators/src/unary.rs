//! Nonuniform acceptance of unary inputs. For each input length a tiny
//! program is generated whose *structure* — not its input — encodes the
//! advice bit: the program counts the `1`s, then idles for as many rounds
//! as the count names before consulting a per-length oracle table baked in
//! at build time. Every round after the first touches a constant number of
//! bytes, so the per-round resource envelope stays flat no matter what the
//! oracle says.

use std::sync::Arc;

use mrc_core::{
    Acceptance, Decision, Enforcement, KeyValuePair, MrcProgram, PolyBound, Rational,
    ReducerOutput, ResourceLimits, RoundBehavior,
};

use crate::block::BlockPlan;
use crate::wire::parse_decimal;

/// Answers "is the all-ones string of this length in the language?". In the
/// nonuniform setting this may be an arbitrary, even uncomputable-in-context
/// table; here it is a callback consulted only while *building* rounds for
/// one specific input length.
pub type UnaryOracle = Arc<dyn Fn(u64) -> bool + Send + Sync>;

/// Builds the program for inputs of exactly `input_len` symbols. Round 1
/// verifies the input is all ones and counts each block's share; round 2
/// totals the per-block counts; each later round either answers — when its
/// index matches the count, using the oracle bit for that count — or
/// forwards the count onward. Inputs containing anything but `1` are
/// rejected in the first round.
pub fn build_unary_nonuniform(oracle: UnaryOracle, input_len: usize) -> MrcProgram {
    let plan = BlockPlan::new(input_len, Rational::new(1, 2).unwrap())
        .expect("1/2 is a valid block exponent");

    let mapper = Arc::new(
        move |pair: &KeyValuePair,
              info: mrc_core::RoundInfo,
              _scratch: &mut mrc_core::ScratchMeter|
              -> Result<Vec<KeyValuePair>, String> {
            if info.round > 1 {
                return Ok(vec![pair.clone()]);
            }
            if pair.key.as_slice() == b"0" {
                // Empty input: wake the single counting group with count 0.
                return Ok(vec![KeyValuePair::new("1", "p0")]);
            }
            let position = parse_decimal(&pair.key, "pair key")?;
            if position == 0 || position > info.n {
                return Err(format!("pair index {position} outside 1..={}", info.n));
            }
            let block = plan.block_of_position(position).to_string();
            if pair.value.as_slice() == b"1" {
                Ok(vec![KeyValuePair::new(block, "p1")])
            } else {
                Ok(vec![KeyValuePair::new(block, "!")])
            }
        },
    );

    let reducer = Arc::new(
        move |key: &[u8],
              values: &[Vec<u8>],
              info: mrc_core::RoundInfo,
              scratch: &mut mrc_core::ScratchMeter|
              -> Result<ReducerOutput, String> {
            match info.round {
                1 => {
                    // Per-block tally. A non-one symbol anywhere rejects:
                    // the language only ever contains all-ones strings.
                    if values.iter().any(|v| v.as_slice() == b"!") {
                        return Ok(ReducerOutput::decide(Decision::Reject));
                    }
                    let mut count = 0u64;
                    for value in values {
                        let digits = value
                            .strip_prefix(b"p")
                            .ok_or_else(|| format!("unexpected tally value {value:?}"))?;
                        count += parse_decimal(digits, "tally")? as u64;
                    }
                    scratch.charge(1);
                    Ok(ReducerOutput::pairs(vec![KeyValuePair::new(
                        "*",
                        format!("{count}"),
                    )]))
                }
                2 => {
                    if key != b"*" {
                        return Err(format!("unexpected round-2 key {key:?}"));
                    }
                    let mut total = 0u64;
                    for value in values {
                        total += parse_decimal(value, "block count")? as u64;
                    }
                    scratch.charge(1);
                    Ok(ReducerOutput::pairs(vec![KeyValuePair::new(
                        "*",
                        format!("{total}"),
                    )]))
                }
                round => {
                    let [value] = values else {
                        return Err(format!(
                            "round {round} expected one carried count, saw {}",
                            values.len()
                        ));
                    };
                    let count = parse_decimal(value, "carried count")? as u64;
                    // Round r handles count r − 3: the structure of which
                    // round answers — and with which bit — is where the
                    // advice lives.
                    if (round as u64) == count + 3 {
                        let decision = if oracle(count) {
                            Decision::Accept
                        } else {
                            Decision::Reject
                        };
                        Ok(ReducerOutput::decide(decision))
                    } else {
                        Ok(ReducerOutput::pairs(vec![KeyValuePair::new(
                            "*",
                            value.clone(),
                        )]))
                    }
                }
            }
        },
    );

    MrcProgram {
        rounds: input_len as u64 + 3,
        behavior: RoundBehavior::BuiltIn {
            name: "unary-advice-ladder".into(),
            mapper,
            reducer,
        },
        limits: ResourceLimits {
            space_exponent: Rational::new(1, 2).unwrap(),
            space_constant: Rational::from_integer(64),
            time_bound: PolyBound::new(Rational::from_integer(64), Rational::from_integer(1)),
            keys_constant: Rational::from_integer(4),
            round_bound: PolyBound::new(Rational::from_integer(4), Rational::from_integer(1)),
            enforcement: Enforcement::RecordOnly,
        },
        acceptance: Acceptance::AcceptState,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use mrc_core::{run, InputEncoding, RunOptions, Verdict};

    fn run_unary(oracle: UnaryOracle, input: &[u8]) -> mrc_core::RunOutcome {
        let program = build_unary_nonuniform(oracle, input.len());
        run(
            &program,
            &InputEncoding::from_symbols(input),
            &RunOptions::default(),
        )
        .unwrap()
    }

    fn even_oracle() -> UnaryOracle {
        Arc::new(|n| n % 2 == 0)
    }

    #[test]
    fn answers_arrive_at_the_count_indexed_round() {
        let outcome = run_unary(even_oracle(), b"1111");
        assert_eq!(outcome.verdict, Verdict::Accept);
        assert_eq!(outcome.report.rounds_executed, 7); // answered at round 4 + 3

        let odd = run_unary(even_oracle(), b"111");
        assert_eq!(odd.verdict, Verdict::Reject);
        assert_eq!(odd.report.rounds_executed, 6);
    }

    #[test]
    fn empty_input_asks_the_oracle_about_zero() {
        let outcome = run_unary(even_oracle(), b"");
        assert_eq!(outcome.verdict, Verdict::Accept);
        assert_eq!(outcome.report.rounds_executed, 3);

        let never: UnaryOracle = Arc::new(|_| false);
        assert_eq!(run_unary(never, b"").verdict, Verdict::Reject);
    }

    #[test]
    fn oracle_table_is_respected_per_length() {
        // A deliberately irregular table — membership bears no relation to
        // any property a fixed program could compute from the input alone.
        let table: UnaryOracle = Arc::new(|n| matches!(n, 1 | 4 | 6));
        for len in 0usize..8 {
            let input = vec![b'1'; len];
            let expected = if matches!(len, 1 | 4 | 6) {
                Verdict::Accept
            } else {
                Verdict::Reject
            };
            assert_eq!(run_unary(table.clone(), &input).verdict, expected, "len {len}");
        }
    }

    #[test]
    fn non_unary_input_is_rejected_in_round_one() {
        let outcome = run_unary(even_oracle(), b"1101");
        assert_eq!(outcome.verdict, Verdict::Reject);
        assert_eq!(outcome.report.rounds_executed, 1);
    }

    #[test]
    fn waiting_rounds_touch_constant_bytes() {
        let outcome = run_unary(even_oracle(), &vec![b'1'; 30]);
        assert_eq!(outcome.verdict, Verdict::Accept);
        for round in &outcome.report.rounds[2..] {
            assert!(
                round.max_working_space_bytes <= 32,
                "round {} touched {} bytes",
                round.round,
                round.max_working_space_bytes
            );
            assert!(
                round.max_steps_per_invocation <= 32,
                "round {} ran {} steps in one invocation",
                round.round,
                round.max_steps_per_invocation
            );
        }
    }
}
