//! End-to-end exercise of the interpreted behaviour mode: a single machine
//! serves as both mapper and reducer, reading the phase code from its input
//! tape. The machine here implements the identity round — it skips the
//! `phase,round,n,` prefix and copies the argument to its work tape (with the
//! reducer's no-flag marker first) — so one round must reproduce the input
//! pairs exactly, with the step metric counting real machine steps.

use automata::{InputSymbol, Move, Tm, TmTransition};
use mrc_core::{
    encode_input, run, Acceptance, MrcProgram, PolyBound, Rational, ResourceLimits,
    RoundBehavior, RunOptions, Verdict,
};
use std::sync::Arc;

/// Builds the copy machine. Input alphabet: digits, the separators, and the
/// bits that travel in pairs. Work alphabet: whatever may be copied plus the
/// no-flag marker and a blank.
fn copy_machine() -> Tm {
    let input_alphabet = b"0123456789,:;".to_vec();
    let work_alphabet = b"0123456789:;._".to_vec();
    let blank = b'_';
    // States: 0 = phase, 1 = expect first comma, 2 = skip round digits,
    // 3 = skip n digits, 4 = copy, 5 = accept, 6 = reject.
    let names = vec![
        "phase".into(),
        "comma".into(),
        "round".into(),
        "size".into(),
        "copy".into(),
        "acc".into(),
        "rej".into(),
    ];
    let mut rules: Vec<(usize, InputSymbol, u8, TmTransition)> = Vec::new();
    let every_work = work_alphabet.clone();
    let mut rule = |state: usize, sym: InputSymbol, next: usize, write: Option<u8>, wm: Move, im: Move| {
        for &w in &every_work {
            rules.push((
                state,
                sym,
                w,
                TmTransition {
                    next,
                    write: write.unwrap_or(w),
                    work_move: wm,
                    input_move: im,
                },
            ));
        }
    };
    let digits = b"0123456789";
    // State 0: read the phase code. Mappers copy directly; reducers first
    // write the '.' no-flag marker.
    rule(0, InputSymbol::Byte(b'1'), 1, None, Move::Stay, Move::Right);
    rule(0, InputSymbol::Byte(b'2'), 1, Some(b'.'), Move::Right, Move::Right);
    for &d in digits {
        if d != b'1' && d != b'2' {
            rule(0, InputSymbol::Byte(d), 6, None, Move::Stay, Move::Stay);
        }
    }
    for sym in [InputSymbol::Byte(b','), InputSymbol::Byte(b':'), InputSymbol::Byte(b';')] {
        rule(0, sym, 6, None, Move::Stay, Move::Stay);
    }
    // State 1: the comma after the phase code.
    rule(1, InputSymbol::Byte(b','), 2, None, Move::Stay, Move::Right);
    for &d in digits {
        rule(1, InputSymbol::Byte(d), 6, None, Move::Stay, Move::Stay);
    }
    for sym in [InputSymbol::Byte(b':'), InputSymbol::Byte(b';')] {
        rule(1, sym, 6, None, Move::Stay, Move::Stay);
    }
    // State 2: skip the round number up to the next comma.
    for &d in digits {
        rule(2, InputSymbol::Byte(d), 2, None, Move::Stay, Move::Right);
    }
    rule(2, InputSymbol::Byte(b','), 3, None, Move::Stay, Move::Right);
    for sym in [InputSymbol::Byte(b':'), InputSymbol::Byte(b';')] {
        rule(2, sym, 6, None, Move::Stay, Move::Stay);
    }
    // State 3: skip n up to the next comma.
    for &d in digits {
        rule(3, InputSymbol::Byte(d), 3, None, Move::Stay, Move::Right);
    }
    rule(3, InputSymbol::Byte(b','), 4, None, Move::Stay, Move::Right);
    for sym in [InputSymbol::Byte(b':'), InputSymbol::Byte(b';')] {
        rule(3, sym, 6, None, Move::Stay, Move::Stay);
    }
    // State 4: copy the argument to the work tape.
    for &c in b"0123456789:;" {
        rule(4, InputSymbol::Byte(c), 4, Some(c), Move::Right, Move::Right);
    }
    rule(4, InputSymbol::Byte(b','), 6, None, Move::Stay, Move::Stay);
    // End of tape: done.
    rule(4, InputSymbol::RightMarker, 5, None, Move::Stay, Move::Stay);
    // Left marker is unreachable but the table must be total.
    for state in 0..5 {
        rule(state, InputSymbol::LeftMarker, 6, None, Move::Stay, Move::Stay);
    }
    for sym in [InputSymbol::RightMarker] {
        for state in 0..4 {
            rule(state, sym, 6, None, Move::Stay, Move::Stay);
        }
    }
    Tm::from_rules(names, 0, 5, 6, input_alphabet, work_alphabet, blank, 24, &rules).unwrap()
}

#[test]
fn interpreted_identity_round_reproduces_the_input() {
    let machine = copy_machine();
    let program = MrcProgram {
        rounds: 1,
        behavior: RoundBehavior::Interpreted {
            name: "copy".into(),
            machine: Arc::new(machine),
        },
        limits: ResourceLimits {
            // Real machine steps per invocation: roughly the tape length,
            // far above the default linear budget at tiny n.
            time_bound: PolyBound::new(Rational::from_integer(64), Rational::from_integer(1)),
            ..ResourceLimits::default()
        },
        acceptance: Acceptance::AcceptState,
    };
    let input = encode_input(b"10").unwrap();
    let out = run(&program, &input, &RunOptions::default()).unwrap();
    assert_eq!(out.verdict, Verdict::Reject); // identity never flags
    let mut got = out.final_pairs.clone();
    got.sort();
    let mut want = input.pairs().to_vec();
    want.sort();
    assert_eq!(got, want);
    // Steps are real machine steps: strictly more than the byte proxy of
    // the tiny pairs involved, and the work tape is charged as scratch.
    let m = &out.report.rounds[0];
    assert!(m.max_steps_per_invocation >= 8, "steps {}", m.max_steps_per_invocation);
    assert!(m.max_working_space_bytes >= 24);
}

#[test]
fn interpreted_budget_exhaustion_is_a_behavior_error() {
    let machine = copy_machine();
    let program = MrcProgram {
        rounds: 1,
        behavior: RoundBehavior::Interpreted {
            name: "copy".into(),
            machine: Arc::new(machine),
        },
        limits: ResourceLimits {
            // Two steps can never finish the copy.
            time_bound: PolyBound::new(Rational::from_integer(2), Rational::from_integer(0)),
            ..ResourceLimits::default()
        },
        acceptance: Acceptance::AcceptState,
    };
    let input = encode_input(b"10").unwrap();
    let err = run(&program, &input, &RunOptions::default()).unwrap_err();
    assert!(matches!(err, mrc_core::MrcError::Behavior { .. }));
}
