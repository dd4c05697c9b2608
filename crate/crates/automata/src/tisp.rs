//! Single-tape machines run under explicit time and space budgets.
//!
//! The tape is semi-infinite: cell 0 is the leftmost cell, the input starts
//! there, and everything beyond it is blank. Moving left off cell 0 leaves
//! the head in place (the same wall convention as the two-tape machines).
//! The run is charged one tape cell per distinct cell visited; touching a
//! cell at or beyond the space budget, or taking more steps than the time
//! budget, ends the run with the corresponding budget outcome.

use crate::error::AutomataError;
use crate::tm::Move;

pub use crate::dfa::StateId;

/// One transition of a single-tape machine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TispTransition {
    pub next: StateId,
    pub write: u8,
    pub head_move: Move,
}

/// A deterministic single-tape machine. Budgets are properties of a run, not
/// of the machine, and are passed to [`run_tisp`].
#[derive(Debug, Clone)]
pub struct TispMachine {
    state_names: Vec<String>,
    initial: StateId,
    accept: StateId,
    reject: StateId,
    alphabet: Vec<u8>,
    blank: u8,
    /// `delta[state][symbol_index]`; halting states carry empty rows.
    delta: Vec<Vec<Option<TispTransition>>>,
    symbol_index: Vec<Option<u8>>,
}

impl TispMachine {
    pub fn new(
        state_names: Vec<String>,
        initial: StateId,
        accept: StateId,
        reject: StateId,
        alphabet: Vec<u8>,
        blank: u8,
        delta: Vec<Vec<Option<TispTransition>>>,
    ) -> Result<Self, AutomataError> {
        let count = state_names.len();
        if count == 0 {
            return Err(AutomataError::InvalidMachine("no states".into()));
        }
        for (&role, label) in [(initial, "initial"), (accept, "accept"), (reject, "reject")]
            .iter()
            .map(|(s, l)| (s, *l))
        {
            if role >= count {
                return Err(AutomataError::InvalidMachine(format!(
                    "{label} state {role} out of range ({count} states)"
                )));
            }
        }
        if accept == reject {
            return Err(AutomataError::InvalidMachine(
                "accept and reject states must differ".into(),
            ));
        }
        {
            let mut sorted = alphabet.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != alphabet.len() {
                return Err(AutomataError::InvalidMachine(
                    "alphabet contains duplicate symbols".into(),
                ));
            }
        }
        if !alphabet.contains(&blank) {
            return Err(AutomataError::InvalidMachine(
                "blank symbol must be part of the alphabet".into(),
            ));
        }
        if delta.len() != count {
            return Err(AutomataError::InvalidMachine(format!(
                "transition table has {} state rows, expected {count}",
                delta.len()
            )));
        }
        for state in 0..count {
            let halting = state == accept || state == reject;
            let row = &delta[state];
            if halting {
                if row.iter().any(Option::is_some) {
                    return Err(AutomataError::InvalidMachine(format!(
                        "halting state {} must not have outgoing transitions",
                        state_names[state]
                    )));
                }
                continue;
            }
            if row.len() != alphabet.len() {
                return Err(AutomataError::InvalidMachine(format!(
                    "state {} covers {} symbols, expected {}",
                    state_names[state],
                    row.len(),
                    alphabet.len()
                )));
            }
            for tr in row.iter() {
                match tr {
                    None => {
                        return Err(AutomataError::InvalidMachine(format!(
                            "state {} is missing a transition (the table must be total)",
                            state_names[state]
                        )))
                    }
                    Some(t) => {
                        if t.next >= count {
                            return Err(AutomataError::InvalidMachine(format!(
                                "state {} transitions to out-of-range state {}",
                                state_names[state], t.next
                            )));
                        }
                        if !alphabet.contains(&t.write) {
                            return Err(AutomataError::InvalidMachine(format!(
                                "state {} writes a symbol outside the alphabet",
                                state_names[state]
                            )));
                        }
                    }
                }
            }
        }
        let mut symbol_index = vec![None; 256];
        for (i, &b) in alphabet.iter().enumerate() {
            symbol_index[b as usize] = Some(i as u8);
        }
        Ok(TispMachine {
            state_names,
            initial,
            accept,
            reject,
            alphabet,
            blank,
            delta,
            symbol_index,
        })
    }

    pub fn state_count(&self) -> usize {
        self.state_names.len()
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.state_names[s]
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn accept(&self) -> StateId {
        self.accept
    }

    pub fn reject(&self) -> StateId {
        self.reject
    }

    pub fn is_halting(&self, s: StateId) -> bool {
        s == self.accept || s == self.reject
    }

    pub fn alphabet(&self) -> &[u8] {
        &self.alphabet
    }

    pub fn blank(&self) -> u8 {
        self.blank
    }

    pub fn symbol_position(&self, byte: u8) -> Option<usize> {
        self.symbol_index[byte as usize].map(|i| i as usize)
    }

    /// The transition taken in `state` while reading `byte`. Panics on
    /// halting states; validation guarantees totality elsewhere.
    pub fn transition(&self, state: StateId, byte: u8) -> TispTransition {
        let idx = self.symbol_index[byte as usize].expect("symbol in alphabet") as usize;
        self.delta[state][idx].expect("validated machines have total transition tables")
    }
}

/// How a budgeted run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TispOutcome {
    Accept,
    Reject,
    /// The step budget ran out before the machine halted.
    TimeExceeded,
    /// The head touched a cell at or beyond the space budget.
    SpaceExceeded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TispRun {
    pub outcome: TispOutcome,
    pub steps: u64,
    /// Distinct tape cells visited (the input's cells count even if never
    /// revisited).
    pub cells_used: usize,
    /// Tape contents when the run ended, trimmed of trailing blanks.
    pub tape: Vec<u8>,
}

/// Runs the machine on `input` under the given budgets. The input must fit
/// in the space budget; each input byte must be in the machine's alphabet.
pub fn run_tisp(
    machine: &TispMachine,
    input: &[u8],
    time_budget: u64,
    space_budget: usize,
) -> Result<TispRun, AutomataError> {
    if input.len() > space_budget {
        return Err(AutomataError::InvalidMachine(format!(
            "input of {} cells does not fit in the space budget of {} cells",
            input.len(),
            space_budget
        )));
    }
    for (position, &byte) in input.iter().enumerate() {
        if machine.symbol_index[byte as usize].is_none() {
            return Err(AutomataError::SymbolOutOfAlphabet {
                symbol: byte as char,
                byte,
                position,
            });
        }
    }
    let mut tape = input.to_vec();
    let mut head = 0usize;
    let mut state = machine.initial;
    let mut steps = 0u64;
    let mut cells_used = input.len().max(1).min(space_budget.max(1));
    // An empty tape still has the head parked on cell 0.
    if space_budget == 0 {
        // No cell to park the head on: any machine activity is out of space.
        if machine.is_halting(state) {
            let outcome = if state == machine.accept {
                TispOutcome::Accept
            } else {
                TispOutcome::Reject
            };
            return Ok(TispRun {
                outcome,
                steps: 0,
                cells_used: 0,
                tape: Vec::new(),
            });
        }
        return Ok(TispRun {
            outcome: TispOutcome::SpaceExceeded,
            steps: 0,
            cells_used: 0,
            tape: Vec::new(),
        });
    }
    loop {
        if state == machine.accept || state == machine.reject {
            let outcome = if state == machine.accept {
                TispOutcome::Accept
            } else {
                TispOutcome::Reject
            };
            while tape.last() == Some(&machine.blank) {
                tape.pop();
            }
            return Ok(TispRun {
                outcome,
                steps,
                cells_used,
                tape,
            });
        }
        if steps >= time_budget {
            while tape.last() == Some(&machine.blank) {
                tape.pop();
            }
            return Ok(TispRun {
                outcome: TispOutcome::TimeExceeded,
                steps,
                cells_used,
                tape,
            });
        }
        if head >= tape.len() {
            tape.resize(head + 1, machine.blank);
        }
        let tr = machine.transition(state, tape[head]);
        tape[head] = tr.write;
        state = tr.next;
        steps += 1;
        match tr.head_move {
            Move::Stay => {}
            Move::Left => head = head.saturating_sub(1),
            Move::Right => {
                head += 1;
                if head >= space_budget {
                    while tape.last() == Some(&machine.blank) {
                        tape.pop();
                    }
                    return Ok(TispRun {
                        outcome: TispOutcome::SpaceExceeded,
                        steps,
                        cells_used,
                        tape,
                    });
                }
            }
        }
        cells_used = cells_used.max(head + 1);
    }
}
