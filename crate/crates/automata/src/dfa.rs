use crate::error::AutomataError;

/// Index of a machine state. States are dense: `0..state_count()`.
pub type StateId = usize;

/// The effect of running a DFA over one fixed input block: a total map
/// `state -> state`, stored positionally. Tables compose like functions,
/// which is what makes per-block summaries mergeable.
pub type TransitionTable = Vec<StateId>;

/// A deterministic finite automaton over a byte alphabet with a total
/// transition function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    state_names: Vec<String>,
    alphabet: Vec<u8>,
    /// `transitions[state][symbol_index]` — total.
    transitions: Vec<Vec<StateId>>,
    start: StateId,
    accepting: Vec<bool>,
}

impl Dfa {
    /// Builds a DFA and checks totality and range of every component.
    pub fn new(
        state_names: Vec<String>,
        alphabet: Vec<u8>,
        transitions: Vec<Vec<StateId>>,
        start: StateId,
        accepting: Vec<StateId>,
    ) -> Result<Self, AutomataError> {
        let count = state_names.len();
        if count == 0 {
            return Err(AutomataError::InvalidMachine(
                "a DFA needs at least one state".into(),
            ));
        }
        if alphabet.is_empty() {
            return Err(AutomataError::InvalidMachine(
                "a DFA needs a non-empty alphabet".into(),
            ));
        }
        let mut sorted = alphabet.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != alphabet.len() {
            return Err(AutomataError::InvalidMachine(
                "alphabet contains duplicate symbols".into(),
            ));
        }
        if start >= count {
            return Err(AutomataError::InvalidMachine(format!(
                "start state {start} out of range ({count} states)"
            )));
        }
        if transitions.len() != count {
            return Err(AutomataError::InvalidMachine(format!(
                "transition rows ({}) do not match state count ({count})",
                transitions.len()
            )));
        }
        for (state, row) in transitions.iter().enumerate() {
            if row.len() != alphabet.len() {
                return Err(AutomataError::InvalidMachine(format!(
                    "state {} has {} transitions, expected one per alphabet symbol ({})",
                    state_names[state],
                    row.len(),
                    alphabet.len()
                )));
            }
            for &target in row {
                if target >= count {
                    return Err(AutomataError::InvalidMachine(format!(
                        "state {} has a transition to out-of-range state {target}",
                        state_names[state]
                    )));
                }
            }
        }
        let mut accept_flags = vec![false; count];
        for s in accepting {
            if s >= count {
                return Err(AutomataError::InvalidMachine(format!(
                    "accepting state {s} out of range ({count} states)"
                )));
            }
            accept_flags[s] = true;
        }
        Ok(Dfa {
            state_names,
            alphabet,
            transitions,
            start,
            accepting: accept_flags,
        })
    }

    pub fn state_count(&self) -> usize {
        self.state_names.len()
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.state_names[s]
    }

    pub fn state_names(&self) -> &[String] {
        &self.state_names
    }

    pub fn alphabet(&self) -> &[u8] {
        &self.alphabet
    }

    pub fn start(&self) -> StateId {
        self.start
    }

    pub fn is_accepting(&self, s: StateId) -> bool {
        self.accepting[s]
    }

    pub fn accepting_states(&self) -> Vec<StateId> {
        (0..self.state_count())
            .filter(|&s| self.accepting[s])
            .collect()
    }

    pub fn transition(&self, state: StateId, symbol: u8) -> Option<StateId> {
        let idx = self.symbol_index(symbol)?;
        Some(self.transitions[state][idx])
    }

    fn symbol_index(&self, symbol: u8) -> Option<usize> {
        self.alphabet.iter().position(|&b| b == symbol)
    }

    /// Whether the whole string is accepted starting from the start state.
    pub fn accepts(&self, input: &[u8]) -> Result<bool, AutomataError> {
        let end = run_dfa(self, input, self.start)?;
        Ok(self.is_accepting(end))
    }
}

/// Runs the DFA on `input` from `start` and returns the final state.
pub fn run_dfa(dfa: &Dfa, input: &[u8], start: StateId) -> Result<StateId, AutomataError> {
    if start >= dfa.state_count() {
        return Err(AutomataError::InvalidMachine(format!(
            "run started in out-of-range state {start}"
        )));
    }
    let mut state = start;
    for (position, &byte) in input.iter().enumerate() {
        match dfa.transition(state, byte) {
            Some(next) => state = next,
            None => {
                return Err(AutomataError::SymbolOutOfAlphabet {
                    symbol: byte as char,
                    byte,
                    position,
                })
            }
        }
    }
    Ok(state)
}

/// Computes the state-to-state map realized by running the DFA across
/// `block`. The table has exactly one entry per state, so its size is
/// bounded by the (state count)² pairs it can mention.
pub fn dfa_transition_table(dfa: &Dfa, block: &[u8]) -> Result<TransitionTable, AutomataError> {
    let mut table = Vec::with_capacity(dfa.state_count());
    for s in 0..dfa.state_count() {
        table.push(run_dfa(dfa, block, s)?);
    }
    Ok(table)
}
