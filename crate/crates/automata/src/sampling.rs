//! Seeded random machine generators for equivalence sweeps.
//!
//! The generators are deliberately simple and deterministic in the RNG: the
//! same seed yields the same machine, so test sweeps are reproducible. All
//! generated machines are valid by construction (total transition tables,
//! halting states without outgoing transitions, initial state non-halting,
//! so every run takes at least one step).

use crate::dfa::Dfa;
use crate::tisp::{TispMachine, TispTransition};
use crate::tm::{Move, Tm, TmTransition};
use rand::Rng;

/// A random complete deterministic automaton over `alphabet` with
/// `1..=max_states` states, each independently accepting with probability
/// one half.
pub fn random_dfa(rng: &mut impl Rng, max_states: usize, alphabet: &[u8]) -> Dfa {
    let count = rng.gen_range(1..=max_states.max(1));
    let names = (0..count).map(|i| format!("q{i}")).collect();
    let transitions = (0..count)
        .map(|_| (0..alphabet.len()).map(|_| rng.gen_range(0..count)).collect())
        .collect();
    let accepting = (0..count).filter(|_| rng.gen_bool(0.5)).collect();
    Dfa::new(names, alphabet.to_vec(), transitions, rng.gen_range(0..count), accepting)
        .expect("generated automaton is valid by construction")
}

fn pick_move(rng: &mut impl Rng, allow_stay: bool) -> Move {
    if allow_stay {
        match rng.gen_range(0..3) {
            0 => Move::Left,
            1 => Move::Right,
            _ => Move::Stay,
        }
    } else if rng.gen_bool(0.5) {
        Move::Left
    } else {
        Move::Right
    }
}

/// Picks the target of a transition: mostly working states, occasionally one
/// of the two halting states, so runs are long enough to be interesting but
/// terminate often enough to exercise every outcome.
fn pick_next(rng: &mut impl Rng, working: usize, accept: usize, reject: usize) -> usize {
    match rng.gen_range(0..20) {
        0..=2 => accept,
        3..=5 => reject,
        _ => rng.gen_range(0..working),
    }
}

/// A random two-tape machine over input alphabet `{0,1}` and work alphabet
/// `{0,1}` (blank `0`) with `working_states` non-halting states plus one
/// accept and one reject state, and a work tape of `work_space` cells.
/// Input-head stay moves are generated freely.
pub fn random_tm(rng: &mut impl Rng, working_states: usize, work_space: usize) -> Tm {
    let working = working_states.max(1);
    let accept = working;
    let reject = working + 1;
    let mut names: Vec<String> = (0..working).map(|i| format!("q{i}")).collect();
    names.push("acc".into());
    names.push("rej".into());
    let gamma = b"01".to_vec();
    let input_symbols = 2 + 2; // both markers plus {0,1}
    let mut delta = Vec::with_capacity(working + 2);
    for _ in 0..working {
        let mut row = Vec::with_capacity(input_symbols);
        for _ in 0..input_symbols {
            let mut per_input = Vec::with_capacity(gamma.len());
            for _ in 0..gamma.len() {
                per_input.push(Some(TmTransition {
                    next: pick_next(rng, working, accept, reject),
                    write: gamma[rng.gen_range(0..gamma.len())],
                    work_move: pick_move(rng, true),
                    input_move: pick_move(rng, true),
                }));
            }
            row.push(per_input);
        }
        delta.push(row);
    }
    delta.push(Vec::new());
    delta.push(Vec::new());
    Tm::new(
        names,
        0,
        accept,
        reject,
        b"01".to_vec(),
        gamma,
        b'0',
        work_space,
        delta,
    )
    .expect("generated machine is valid by construction")
}

/// A random single-tape machine over alphabet `{0,1,_}` (blank `_`) with
/// `working_states` non-halting states plus accept and reject. Head moves
/// are strictly left/right.
pub fn random_tisp(rng: &mut impl Rng, working_states: usize) -> TispMachine {
    let working = working_states.max(1);
    let accept = working;
    let reject = working + 1;
    let mut names: Vec<String> = (0..working).map(|i| format!("q{i}")).collect();
    names.push("acc".into());
    names.push("rej".into());
    let alphabet = b"01_".to_vec();
    let mut delta = Vec::with_capacity(working + 2);
    for _ in 0..working {
        let row = (0..alphabet.len())
            .map(|_| {
                Some(TispTransition {
                    next: pick_next(rng, working, accept, reject),
                    write: alphabet[rng.gen_range(0..alphabet.len())],
                    head_move: pick_move(rng, false),
                })
            })
            .collect();
        delta.push(row);
    }
    delta.push(Vec::new());
    delta.push(Vec::new());
    TispMachine::new(names, 0, accept, reject, alphabet, b'_', delta)
        .expect("generated machine is valid by construction")
}

/// A random bit-string of exactly `len` bytes over `{0,1}`.
pub fn random_bits(rng: &mut impl Rng, len: usize) -> Vec<u8> {
    (0..len).map(|_| if rng.gen_bool(0.5) { b'1' } else { b'0' }).collect()
}
