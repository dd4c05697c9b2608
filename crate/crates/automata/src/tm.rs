//! Turing machines with a two-way read-only input tape and a fixed-size work
//! tape, plus the per-block boundary functions that summarize how a machine
//! crosses a contiguous block of the input.
//!
//! Tape conventions, shared by the direct runner and the block simulator:
//!
//! * The input tape holds `⊢ x ⊣`: cell 0 is the left end-marker, cells
//!   `1..=n` hold the input, cell `n+1` is the right end-marker. The head
//!   starts on cell 1 (the right marker when the input is empty).
//! * Attempting to move off an end-marker leaves the head in place (a wall).
//! * The work tape has exactly `s` cells, all initially blank, head on the
//!   first cell. Moving the work head outside the tape is a crash, and a
//!   crash halts the run as a rejection — this keeps every behaviour table
//!   total even over work configurations a real run never reaches.
//! * A machine that exceeds its configuration-count budget has necessarily
//!   repeated a complete configuration and therefore loops forever; such runs
//!   are reported as diverged, which is exact, not an approximation.

use crate::error::AutomataError;
use std::collections::BTreeMap;
use std::fmt;

pub use crate::dfa::StateId;

/// Head movement for either tape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Move {
    Left,
    Right,
    Stay,
}

/// A symbol as seen by the input head: one of the two end-markers or an
/// ordinary byte from the input alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum InputSymbol {
    LeftMarker,
    RightMarker,
    Byte(u8),
}

/// One transition: target state, work-tape write, and both head moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TmTransition {
    pub next: StateId,
    pub write: u8,
    pub work_move: Move,
    pub input_move: Move,
}

/// A deterministic machine with a read-only two-way input tape and a work
/// tape of exactly `work_space` cells.
#[derive(Debug, Clone)]
pub struct Tm {
    state_names: Vec<String>,
    initial: StateId,
    accept: StateId,
    reject: StateId,
    input_alphabet: Vec<u8>,
    work_alphabet: Vec<u8>,
    blank: u8,
    work_space: usize,
    /// `delta[state][input_symbol_index][work_symbol_index]`; input symbol
    /// index 0 is the left marker, 1 the right marker, `2 + i` the `i`-th
    /// alphabet byte. Halting states carry empty rows.
    delta: Vec<Vec<Vec<Option<TmTransition>>>>,
    /// Byte -> index into `input_alphabet`, 256 entries.
    input_index: Vec<Option<u8>>,
    /// Byte -> index into `work_alphabet`, 256 entries.
    work_index: Vec<Option<u8>>,
}

const LEFT_MARKER_IDX: usize = 0;
const RIGHT_MARKER_IDX: usize = 1;
const MARKER_SYMBOLS: usize = 2;

impl Tm {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        state_names: Vec<String>,
        initial: StateId,
        accept: StateId,
        reject: StateId,
        input_alphabet: Vec<u8>,
        work_alphabet: Vec<u8>,
        blank: u8,
        work_space: usize,
        delta: Vec<Vec<Vec<Option<TmTransition>>>>,
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
        if work_space == 0 {
            return Err(AutomataError::InvalidMachine(
                "work tape needs at least one cell".into(),
            ));
        }
        for alphabet in [&input_alphabet, &work_alphabet] {
            let mut sorted = alphabet.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != alphabet.len() {
                return Err(AutomataError::InvalidMachine(
                    "alphabet contains duplicate symbols".into(),
                ));
            }
        }
        if input_alphabet.is_empty() {
            return Err(AutomataError::InvalidMachine(
                "input alphabet must be non-empty".into(),
            ));
        }
        if !work_alphabet.contains(&blank) {
            return Err(AutomataError::InvalidMachine(
                "blank symbol must be part of the work alphabet".into(),
            ));
        }
        if delta.len() != count {
            return Err(AutomataError::InvalidMachine(format!(
                "transition table has {} state rows, expected {count}",
                delta.len()
            )));
        }
        let input_symbols = MARKER_SYMBOLS + input_alphabet.len();
        for state in 0..count {
            let halting = state == accept || state == reject;
            let row = &delta[state];
            if halting {
                let has_any = row
                    .iter()
                    .any(|per_input| per_input.iter().any(Option::is_some));
                if has_any {
                    return Err(AutomataError::InvalidMachine(format!(
                        "halting state {} must not have outgoing transitions",
                        state_names[state]
                    )));
                }
                continue;
            }
            if row.len() != input_symbols {
                return Err(AutomataError::InvalidMachine(format!(
                    "state {} covers {} input symbols, expected {input_symbols} \
                     (both markers plus the alphabet)",
                    state_names[state],
                    row.len()
                )));
            }
            for (in_idx, per_input) in row.iter().enumerate() {
                if per_input.len() != work_alphabet.len() {
                    return Err(AutomataError::InvalidMachine(format!(
                        "state {} input-symbol {in_idx} covers {} work symbols, expected {}",
                        state_names[state],
                        per_input.len(),
                        work_alphabet.len()
                    )));
                }
                for tr in per_input.iter() {
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
                            if !work_alphabet.contains(&t.write) {
                                return Err(AutomataError::InvalidMachine(format!(
                                    "state {} writes a symbol outside the work alphabet",
                                    state_names[state]
                                )));
                            }
                        }
                    }
                }
            }
        }
        let mut input_index = vec![None; 256];
        for (i, &b) in input_alphabet.iter().enumerate() {
            input_index[b as usize] = Some(i as u8);
        }
        let mut work_index = vec![None; 256];
        for (i, &b) in work_alphabet.iter().enumerate() {
            work_index[b as usize] = Some(i as u8);
        }
        Ok(Tm {
            state_names,
            initial,
            accept,
            reject,
            input_alphabet,
            work_alphabet,
            blank,
            work_space,
            delta,
            input_index,
            work_index,
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

    pub fn input_alphabet(&self) -> &[u8] {
        &self.input_alphabet
    }

    pub fn work_alphabet(&self) -> &[u8] {
        &self.work_alphabet
    }

    pub fn blank(&self) -> u8 {
        self.blank
    }

    pub fn work_space(&self) -> usize {
        self.work_space
    }

    /// Whether any transition keeps the input head in place. Block-boundary
    /// construction first rewrites such machines with [`eliminate_stay_moves`].
    pub fn has_input_stay_moves(&self) -> bool {
        self.delta.iter().flatten().flatten().any(|t| {
            t.map(|t| t.input_move == Move::Stay)
                .unwrap_or(false)
        })
    }

    /// Number of complete configurations of a run on an input of length `n`:
    /// `|Γ|^s · s · |S| · (n + 2)`, saturating. Exceeding this count proves a
    /// repeated configuration, hence divergence.
    pub fn configuration_budget(&self, input_len: usize) -> u64 {
        let work_configs = work_config_count(
            self.work_alphabet.len(),
            self.work_space,
            self.state_count(),
        );
        work_configs.saturating_mul(input_len as u64 + 2)
    }

    /// Builds a machine from a flat rule list instead of a dense table. Every
    /// non-halting state must be covered by exactly one rule per (input
    /// symbol, work symbol) pair.
    #[allow(clippy::too_many_arguments)]
    pub fn from_rules(
        state_names: Vec<String>,
        initial: StateId,
        accept: StateId,
        reject: StateId,
        input_alphabet: Vec<u8>,
        work_alphabet: Vec<u8>,
        blank: u8,
        work_space: usize,
        rules: &[(StateId, InputSymbol, u8, TmTransition)],
    ) -> Result<Self, AutomataError> {
        let count = state_names.len();
        let input_symbols = MARKER_SYMBOLS + input_alphabet.len();
        let input_idx = |sym: InputSymbol| -> Result<usize, AutomataError> {
            match sym {
                InputSymbol::LeftMarker => Ok(LEFT_MARKER_IDX),
                InputSymbol::RightMarker => Ok(RIGHT_MARKER_IDX),
                InputSymbol::Byte(b) => input_alphabet
                    .iter()
                    .position(|&a| a == b)
                    .map(|i| MARKER_SYMBOLS + i)
                    .ok_or(AutomataError::SymbolOutOfAlphabet {
                        symbol: b as char,
                        byte: b,
                        position: 0,
                    }),
            }
        };
        let mut delta: Vec<Vec<Vec<Option<TmTransition>>>> = (0..count)
            .map(|s| {
                if s == accept || s == reject {
                    Vec::new()
                } else {
                    vec![vec![None; work_alphabet.len()]; input_symbols]
                }
            })
            .collect();
        for &(state, sym, work, action) in rules {
            if state >= count {
                return Err(AutomataError::InvalidMachine(format!(
                    "rule refers to out-of-range state {state}"
                )));
            }
            if state == accept || state == reject {
                return Err(AutomataError::InvalidMachine(format!(
                    "halting state {} must not have outgoing transitions",
                    state_names[state]
                )));
            }
            let i = input_idx(sym)?;
            let w = work_alphabet.iter().position(|&g| g == work).ok_or(
                AutomataError::InvalidMachine(format!(
                    "rule for state {} reads a work symbol outside the work alphabet",
                    state_names[state]
                )),
            )?;
            if delta[state][i][w].is_some() {
                return Err(AutomataError::InvalidMachine(format!(
                    "duplicate rule for state {} on input symbol {sym:?}",
                    state_names[state]
                )));
            }
            delta[state][i][w] = Some(action);
        }
        Tm::new(
            state_names,
            initial,
            accept,
            reject,
            input_alphabet,
            work_alphabet,
            blank,
            work_space,
            delta,
        )
    }

    fn work_symbol_index(&self, byte: u8) -> usize {
        self.work_index[byte as usize]
            .expect("work tape holds only alphabet symbols") as usize
    }

    /// Applies one transition: writes the work tape, moves the work head, and
    /// reports the next state and the requested input move. A work-head move
    /// off the tape is a crash, reported as `None` (the run halts rejecting).
    fn apply(
        &self,
        state: StateId,
        input_idx: usize,
        work: &mut [u8],
        work_head: &mut usize,
    ) -> Option<(StateId, Move)> {
        let w_idx = self.work_symbol_index(work[*work_head]);
        let tr = self.delta[state][input_idx][w_idx]
            .expect("validated machines have total transition tables");
        work[*work_head] = tr.write;
        match tr.work_move {
            Move::Stay => {}
            Move::Left => {
                if *work_head == 0 {
                    return None;
                }
                *work_head -= 1;
            }
            Move::Right => {
                if *work_head + 1 >= work.len() {
                    return None;
                }
                *work_head += 1;
            }
        }
        Some((tr.next, tr.input_move))
    }
}

fn work_config_count(gamma: usize, space: usize, states: usize) -> u64 {
    let tape_contents = (gamma as u64).checked_pow(space as u32);
    tape_contents
        .and_then(|t| t.checked_mul(space as u64))
        .and_then(|t| t.checked_mul(states as u64))
        .unwrap_or(u64::MAX)
}

/// Moves the input head with wall semantics at the end-markers.
fn move_input_head(pos: usize, mv: Move, input_len: usize) -> usize {
    match mv {
        Move::Stay => pos,
        Move::Left => pos.saturating_sub(1),
        Move::Right => (pos + 1).min(input_len + 1),
    }
}

/// Final outcome of a full run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TmOutcome {
    Accept,
    Reject,
    /// The run exceeded the configuration-count budget, which proves a loop.
    Diverged,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TmRun {
    pub outcome: TmOutcome,
    pub steps: u64,
}

/// Runs the machine to completion on `input`. Divergence is detected by the
/// configuration-count pigeonhole budget and is exact.
pub fn run_tm(tm: &Tm, input: &[u8]) -> Result<TmRun, AutomataError> {
    for (position, &byte) in input.iter().enumerate() {
        if tm.input_index[byte as usize].is_none() {
            return Err(AutomataError::SymbolOutOfAlphabet {
                symbol: byte as char,
                byte,
                position,
            });
        }
    }
    let budget = tm.configuration_budget(input.len());
    let (outcome, steps, _) = simulate(tm, input, budget);
    Ok(TmRun {
        outcome: match outcome {
            BudgetedOutcome::Accept => TmOutcome::Accept,
            BudgetedOutcome::Reject => TmOutcome::Reject,
            BudgetedOutcome::OutOfBudget => TmOutcome::Diverged,
        },
        steps,
    })
}

/// Outcome of a run under an explicit step budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BudgetedOutcome {
    Accept,
    Reject,
    OutOfBudget,
}

/// Runs the machine for at most `budget` steps and returns the outcome, the
/// steps actually taken, and the final work-tape contents. Used by callers
/// that treat the work tape as the machine's output channel.
pub fn run_tm_with_budget(
    tm: &Tm,
    input: &[u8],
    budget: u64,
) -> Result<(BudgetedOutcome, u64, Vec<u8>), AutomataError> {
    for (position, &byte) in input.iter().enumerate() {
        if tm.input_index[byte as usize].is_none() {
            return Err(AutomataError::SymbolOutOfAlphabet {
                symbol: byte as char,
                byte,
                position,
            });
        }
    }
    let (outcome, steps, tape) = simulate(tm, input, budget);
    Ok((outcome, steps, tape))
}

fn simulate(tm: &Tm, input: &[u8], budget: u64) -> (BudgetedOutcome, u64, Vec<u8>) {
    let n = input.len();
    let mut state = tm.initial;
    let mut pos = 1usize; // first input cell; the right marker when n = 0
    let mut work = vec![tm.blank; tm.work_space];
    let mut work_head = 0usize;
    let mut steps = 0u64;
    loop {
        if state == tm.accept {
            return (BudgetedOutcome::Accept, steps, work);
        }
        if state == tm.reject {
            return (BudgetedOutcome::Reject, steps, work);
        }
        if steps >= budget {
            return (BudgetedOutcome::OutOfBudget, steps, work);
        }
        let sym = if pos == 0 {
            LEFT_MARKER_IDX
        } else if pos == n + 1 {
            RIGHT_MARKER_IDX
        } else {
            MARKER_SYMBOLS + tm.input_index[input[pos - 1] as usize].unwrap() as usize
        };
        match tm.apply(state, sym, &mut work, &mut work_head) {
            None => {
                // Work-head crash: the run halts as a rejection.
                return (BudgetedOutcome::Reject, steps + 1, work);
            }
            Some((next, input_move)) => {
                state = next;
                pos = move_input_head(pos, input_move, n);
                steps += 1;
            }
        }
    }
}

/// Rewrites every input-head stay move into a bounce of two ordinary moves
/// through a fresh intermediate state, preserving the machine's behaviour
/// exactly (accept/reject/divergence, and the final work tape).
///
/// The bounce direction depends on the symbol being scanned: a stay executed
/// on the left end-marker bounces right-then-left (the wall would otherwise
/// swallow the first move and leave the head displaced); every other symbol
/// bounces left-then-right, which is exact because cell 0 is the only wall
/// on that side.
pub fn eliminate_stay_moves(tm: &Tm) -> Tm {
    if !tm.has_input_stay_moves() {
        return tm.clone();
    }
    let mut names = tm.state_names.clone();
    let mut delta = tm.delta.clone();
    let input_symbols = MARKER_SYMBOLS + tm.input_alphabet.len();
    let gamma = tm.work_alphabet.clone();

    // One fresh state per (target, return-direction) pair.
    let mut fresh: BTreeMap<(StateId, Move), StateId> = BTreeMap::new();
    let mut pending: Vec<(StateId, Move)> = Vec::new();

    for state in 0..delta.len() {
        for in_idx in 0..delta[state].len() {
            for w_idx in 0..delta[state][in_idx].len() {
                let Some(tr) = delta[state][in_idx][w_idx] else {
                    continue;
                };
                if tr.input_move != Move::Stay {
                    continue;
                }
                let out_dir = if in_idx == LEFT_MARKER_IDX {
                    Move::Right
                } else {
                    Move::Left
                };
                let back_dir = match out_dir {
                    Move::Right => Move::Left,
                    Move::Left => Move::Right,
                    Move::Stay => unreachable!(),
                };
                let bounce = *fresh.entry((tr.next, back_dir)).or_insert_with(|| {
                    let id = names.len() + pending.len();
                    pending.push((tr.next, back_dir));
                    id
                });
                delta[state][in_idx][w_idx] = Some(TmTransition {
                    next: bounce,
                    write: tr.write,
                    work_move: tr.work_move,
                    input_move: out_dir,
                });
            }
        }
    }

    for (target, back_dir) in pending {
        let id = names.len();
        names.push(format!("bounce{}_{}", id, tm.state_names[target]));
        let mut row = Vec::with_capacity(input_symbols);
        for _ in 0..input_symbols {
            let mut per_input = Vec::with_capacity(gamma.len());
            for &w in &gamma {
                per_input.push(Some(TmTransition {
                    next: target,
                    write: w,
                    work_move: Move::Stay,
                    input_move: back_dir,
                }));
            }
            row.push(per_input);
        }
        delta.push(row);
    }

    Tm::new(
        names,
        tm.initial,
        tm.accept,
        tm.reject,
        tm.input_alphabet.clone(),
        tm.work_alphabet.clone(),
        tm.blank,
        tm.work_space,
        delta,
    )
    .expect("stay elimination preserves machine validity")
}

// ---------------------------------------------------------------------------
// Work configurations and block-boundary tables
// ---------------------------------------------------------------------------

/// A machine's per-processor state: control state, work-head position, and
/// work-tape contents. Everything except the input head position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkConfig {
    pub state: StateId,
    pub work_head: usize,
    pub tape: Vec<u8>,
}

/// Dense enumeration of all work configurations of a machine. The number of
/// distinct configurations is `|Γ|^s · s · |S|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigSpace {
    states: usize,
    space: usize,
    gamma: Vec<u8>,
}

/// Largest tabulated configuration space; beyond this, boundary tables would
/// not be a summary but a memory hog.
const MAX_CONFIGS: u64 = 1 << 21;

impl ConfigSpace {
    pub fn for_machine(tm: &Tm) -> Result<Self, AutomataError> {
        let count = work_config_count(tm.work_alphabet.len(), tm.work_space, tm.state_count());
        if count > MAX_CONFIGS {
            return Err(AutomataError::ConfigSpaceTooLarge {
                configs: count as u128,
                max: MAX_CONFIGS,
            });
        }
        Ok(ConfigSpace {
            states: tm.state_count(),
            space: tm.work_space,
            gamma: tm.work_alphabet.to_vec(),
        })
    }

    /// `|Γ|^s · s · |S|`.
    pub fn count(&self) -> u64 {
        work_config_count(self.gamma.len(), self.space, self.states)
    }

    pub fn encode(&self, cfg: &WorkConfig) -> u32 {
        debug_assert_eq!(cfg.tape.len(), self.space);
        let gamma = self.gamma.len() as u64;
        let mut tape_code = 0u64;
        for &byte in cfg.tape.iter().rev() {
            let idx = self
                .gamma
                .iter()
                .position(|&g| g == byte)
                .expect("tape holds only work-alphabet symbols") as u64;
            tape_code = tape_code * gamma + idx;
        }
        let code = ((cfg.state as u64 * self.space as u64) + cfg.work_head as u64)
            * gamma.pow(self.space as u32)
            + tape_code;
        code as u32
    }

    pub fn decode(&self, id: u32) -> WorkConfig {
        let gamma = self.gamma.len() as u64;
        let tape_span = gamma.pow(self.space as u32);
        let mut code = id as u64;
        let mut tape_code = code % tape_span;
        code /= tape_span;
        let work_head = (code % self.space as u64) as usize;
        let state = (code / self.space as u64) as usize;
        let mut tape = Vec::with_capacity(self.space);
        for _ in 0..self.space {
            tape.push(self.gamma[(tape_code % gamma) as usize]);
            tape_code /= gamma;
        }
        WorkConfig {
            state,
            work_head,
            tape,
        }
    }

    /// The start-of-run configuration: initial state, blank tape, head on the
    /// first work cell.
    pub fn initial(&self, tm: &Tm) -> WorkConfig {
        WorkConfig {
            state: tm.initial(),
            work_head: 0,
            tape: vec![tm.blank(); self.space],
        }
    }
}

/// Which side of a block the input head enters or leaves through.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flipped(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "L",
            Side::Right => "R",
        })
    }
}

/// Position of a block within the partitioned input. Blocks at the ends
/// absorb the adjacent end-marker; a `Whole` block (the only block) absorbs
/// both and may be empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockRole {
    Leftmost,
    Interior,
    Rightmost,
    Whole,
}

impl BlockRole {
    fn has_left_marker(self) -> bool {
        matches!(self, BlockRole::Leftmost | BlockRole::Whole)
    }

    fn has_right_marker(self) -> bool {
        matches!(self, BlockRole::Rightmost | BlockRole::Whole)
    }
}

/// What happens after the head enters a block in a given work configuration:
/// it either leaves through one of the sides in a new configuration, halts
/// inside the block, or loops inside the block forever.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryOutcome {
    Exit { config: u32, side: Side },
    Accept,
    Reject,
    Diverged,
}

/// The boundary function of one block, tabulated over every work
/// configuration and entry side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryTable {
    config_count: u32,
    /// Indexed by `config * 2 + side` with Left = 0, Right = 1.
    entries: Vec<BoundaryOutcome>,
}

impl BoundaryTable {
    pub fn config_count(&self) -> u32 {
        self.config_count
    }

    pub fn get(&self, config: u32, side: Side) -> BoundaryOutcome {
        let s = match side {
            Side::Left => 0,
            Side::Right => 1,
        };
        self.entries[config as usize * 2 + s]
    }

    pub fn entries(&self) -> &[BoundaryOutcome] {
        &self.entries
    }

    pub fn from_entries(
        config_count: u32,
        entries: Vec<BoundaryOutcome>,
    ) -> Result<Self, AutomataError> {
        if entries.len() != config_count as usize * 2 {
            return Err(AutomataError::InvalidMachine(format!(
                "boundary table has {} entries, expected {}",
                entries.len(),
                config_count as usize * 2
            )));
        }
        Ok(BoundaryTable {
            config_count,
            entries,
        })
    }
}

/// Tabulates the boundary function of `block` under `role`: for every work
/// configuration and entry side, the machine is run inside the block (with
/// any absorbed end-markers) until it leaves, halts, or provably loops.
///
/// Machines with input-head stay moves are first rewritten by
/// [`eliminate_stay_moves`]; the table's configuration space is that of the
/// rewritten machine, which is deterministic, so tables built per block by
/// independent calls are mutually consistent.
pub fn tm_boundary_function(
    tm: &Tm,
    block: &[u8],
    role: BlockRole,
) -> Result<BoundaryTable, AutomataError> {
    let owned;
    let machine = if tm.has_input_stay_moves() {
        owned = eliminate_stay_moves(tm);
        &owned
    } else {
        tm
    };
    for (position, &byte) in block.iter().enumerate() {
        if machine.input_index[byte as usize].is_none() {
            return Err(AutomataError::SymbolOutOfAlphabet {
                symbol: byte as char,
                byte,
                position,
            });
        }
    }
    let space = ConfigSpace::for_machine(machine)?;

    // Local tape: optional left marker, the block bytes, optional right marker.
    let mut local: Vec<usize> = Vec::with_capacity(block.len() + 2);
    if role.has_left_marker() {
        local.push(LEFT_MARKER_IDX);
    }
    let first_byte = local.len();
    for &b in block {
        local.push(MARKER_SYMBOLS + machine.input_index[b as usize].unwrap() as usize);
    }
    if role.has_right_marker() {
        local.push(RIGHT_MARKER_IDX);
    }
    let last = local.len() - 1;
    // Entry cells: the first/last block byte. An empty block (possible only
    // for a Whole block, n = 0) is entered where the whole-input run starts:
    // cell 1, the right end-marker.
    let entry_left = if block.is_empty() {
        first_byte.min(last)
    } else {
        first_byte
    };
    let entry_right = if block.is_empty() {
        entry_left
    } else {
        first_byte + block.len() - 1
    };

    let budget = space
        .count()
        .saturating_mul(block.len() as u64 + 2);

    let count = space.count() as u32;
    let mut entries = Vec::with_capacity(count as usize * 2);
    for config_id in 0..count {
        let cfg = space.decode(config_id);
        for side in [Side::Left, Side::Right] {
            let entry_pos = match side {
                Side::Left => entry_left,
                Side::Right => entry_right,
            };
            entries.push(simulate_block(
                machine, &space, &local, role, &cfg, entry_pos, budget, last,
            ));
        }
    }
    BoundaryTable::from_entries(count, entries)
}

#[allow(clippy::too_many_arguments)]
fn simulate_block(
    tm: &Tm,
    space: &ConfigSpace,
    local: &[usize],
    role: BlockRole,
    entry: &WorkConfig,
    entry_pos: usize,
    budget: u64,
    last: usize,
) -> BoundaryOutcome {
    let mut state = entry.state;
    let mut work = entry.tape.clone();
    let mut work_head = entry.work_head;
    let mut pos = entry_pos as isize;
    let mut steps = 0u64;
    loop {
        if state == tm.accept {
            return BoundaryOutcome::Accept;
        }
        if state == tm.reject {
            return BoundaryOutcome::Reject;
        }
        if steps >= budget {
            return BoundaryOutcome::Diverged;
        }
        let sym = local[pos as usize];
        let (next, input_move) = match tm.apply(state, sym, &mut work, &mut work_head) {
            None => return BoundaryOutcome::Reject, // work-head crash
            Some(r) => r,
        };
        state = next;
        steps += 1;
        match input_move {
            Move::Stay => {}
            Move::Left => {
                if pos == 0 {
                    if role.has_left_marker() {
                        // Wall at the global left end-marker.
                    } else {
                        let config = space.encode(&WorkConfig {
                            state,
                            work_head,
                            tape: work,
                        });
                        return BoundaryOutcome::Exit {
                            config,
                            side: Side::Left,
                        };
                    }
                } else {
                    pos -= 1;
                }
            }
            Move::Right => {
                if pos as usize == last {
                    if role.has_right_marker() {
                        // Wall at the global right end-marker.
                    } else {
                        let config = space.encode(&WorkConfig {
                            state,
                            work_head,
                            tape: work,
                        });
                        return BoundaryOutcome::Exit {
                            config,
                            side: Side::Right,
                        };
                    }
                } else {
                    pos += 1;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// A machine that scans right and accepts on the right end-marker iff it
    /// saw an even number of 1s (parity kept in the work cell).
    fn parity_tm() -> Tm {
        // states: 0 = scan, 1 = accept, 2 = reject
        let names = vec!["scan".into(), "acc".into(), "rej".into()];
        let t = |next, write, wm, im| {
            Some(TmTransition {
                next,
                write,
                work_move: wm,
                input_move: im,
            })
        };
        // input symbols: [left, right, '0', '1']; work symbols: ['0', '1']
        let scan_row = vec![
            // on left marker: move right
            vec![t(0, b'0', Move::Stay, Move::Right), t(0, b'1', Move::Stay, Move::Right)],
            // on right marker: accept iff work cell is '0'
            vec![t(1, b'0', Move::Stay, Move::Stay), t(2, b'1', Move::Stay, Move::Stay)],
            // on '0': keep parity, move right
            vec![t(0, b'0', Move::Stay, Move::Right), t(0, b'1', Move::Stay, Move::Right)],
            // on '1': flip parity, move right
            vec![t(0, b'1', Move::Stay, Move::Right), t(0, b'0', Move::Stay, Move::Right)],
        ];
        Tm::new(
            names,
            0,
            1,
            2,
            b"01".to_vec(),
            b"01".to_vec(),
            b'0',
            1,
            vec![scan_row, vec![], vec![]],
        )
        .unwrap()
    }

    /// A machine that loops in place forever.
    fn spinner() -> Tm {
        let t = |next| {
            Some(TmTransition {
                next,
                write: b'0',
                work_move: Move::Stay,
                input_move: Move::Stay,
            })
        };
        Tm::new(
            vec!["spin".into(), "acc".into(), "rej".into()],
            0,
            1,
            2,
            b"01".to_vec(),
            b"0".to_vec(),
            b'0',
            1,
            vec![vec![vec![t(0)], vec![t(0)], vec![t(0)], vec![t(0)]], vec![], vec![]],
        )
        .unwrap()
    }

    #[test]
    fn parity_machine_decides_parity() {
        let tm = parity_tm();
        for (x, expect) in [
            (&b""[..], TmOutcome::Accept),
            (b"0", TmOutcome::Accept),
            (b"1", TmOutcome::Reject),
            (b"1101", TmOutcome::Reject),
            (b"11011", TmOutcome::Accept),
        ] {
            assert_eq!(run_tm(&tm, x).unwrap().outcome, expect, "input {x:?}");
        }
    }

    #[test]
    fn spinner_is_reported_diverged() {
        let run = run_tm(&spinner(), b"01").unwrap();
        assert_eq!(run.outcome, TmOutcome::Diverged);
        // Budget: |Γ|^s·s·|S| · (n+2) = 1·1·3·4 = 12.
        assert_eq!(run.steps, 12);
    }

    #[test]
    fn diverged_runs_really_revisit_a_configuration() {
        // Replay a diverged run recording complete configurations; a repeat
        // must appear within twice the pigeonhole budget.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut checked = 0;
        for _ in 0..400 {
            let tm = sampling::random_tm(&mut rng, 3, 2);
            let x = sampling::random_bits(&mut rng, 5);
            let run = run_tm(&tm, &x).unwrap();
            if run.outcome != TmOutcome::Diverged {
                continue;
            }
            checked += 1;
            let budget = tm.configuration_budget(x.len());
            let mut seen = std::collections::HashSet::new();
            let mut state = tm.initial();
            let mut pos = 1usize;
            let mut work = vec![tm.blank(); tm.work_space()];
            let mut work_head = 0usize;
            let mut repeated = false;
            for _ in 0..budget.saturating_mul(2) {
                if !seen.insert((state, pos, work_head, work.clone())) {
                    repeated = true;
                    break;
                }
                let sym = if pos == 0 {
                    LEFT_MARKER_IDX
                } else if pos == x.len() + 1 {
                    RIGHT_MARKER_IDX
                } else {
                    MARKER_SYMBOLS
                        + tm.input_index[x[pos - 1] as usize].unwrap() as usize
                };
                match tm.apply(state, sym, &mut work, &mut work_head) {
                    None => break,
                    Some((next, mv)) => {
                        state = next;
                        pos = move_input_head(pos, mv, x.len());
                    }
                }
                if tm.is_halting(state) {
                    break;
                }
            }
            assert!(repeated, "diverged run must revisit a configuration");
        }
        assert!(checked > 0, "sample contained no diverging runs");
    }

    #[test]
    fn stay_elimination_preserves_behaviour() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..300 {
            let tm = sampling::random_tm(&mut rng, 3, 2);
            if !tm.has_input_stay_moves() {
                continue;
            }
            let flat = eliminate_stay_moves(&tm);
            assert!(!flat.has_input_stay_moves());
            for len in 0..=5 {
                let x = sampling::random_bits(&mut rng, len);
                let a = run_tm(&tm, &x).unwrap();
                let b = run_tm(&flat, &x).unwrap();
                assert_eq!(a.outcome, b.outcome, "input {x:?}");
                if a.outcome != TmOutcome::Diverged {
                    assert!(b.steps <= 2 * a.steps + 2);
                }
            }
        }
    }

    #[test]
    fn stay_on_left_marker_stays_put() {
        // One stay-transition executed exactly on the left marker: the
        // rewritten machine must end in the same place.
        let t = |next, im| {
            Some(TmTransition {
                next,
                write: b'0',
                work_move: Move::Stay,
                input_move: im,
            })
        };
        // state 0: walk left to the marker; state 1: stay once on it, then
        // accept if still reading the marker, reject otherwise.
        let tm = Tm::new(
            vec!["walk".into(), "pause".into(), "acc".into(), "rej".into()],
            0,
            2,
            3,
            b"01".to_vec(),
            b"0".to_vec(),
            b'0',
            1,
            vec![
                vec![vec![t(1, Move::Stay)], vec![t(0, Move::Left)], vec![t(0, Move::Left)], vec![t(0, Move::Left)]],
                vec![vec![t(2, Move::Stay)], vec![t(3, Move::Stay)], vec![t(3, Move::Stay)], vec![t(3, Move::Stay)]],
                vec![],
                vec![],
            ],
        )
        .unwrap();
        let flat = eliminate_stay_moves(&tm);
        for x in [&b""[..], b"0", b"10", b"011"] {
            assert_eq!(
                run_tm(&tm, x).unwrap().outcome,
                run_tm(&flat, x).unwrap().outcome,
                "input {x:?}"
            );
        }
        assert_eq!(run_tm(&flat, b"01").unwrap().outcome, TmOutcome::Accept);
    }

    #[test]
    fn config_codec_is_a_bijection() {
        let tm = parity_tm();
        let space = ConfigSpace::for_machine(&tm).unwrap();
        assert_eq!(space.count(), 2u64 * 1 * 3); // |Γ|^s · s · |S|
        for id in 0..space.count() as u32 {
            let cfg = space.decode(id);
            assert_eq!(space.encode(&cfg), id);
        }
    }

    #[test]
    fn whole_block_table_reproduces_full_runs() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..150 {
            let tm = sampling::random_tm(&mut rng, 2, 1);
            let x = sampling::random_bits(&mut rng, 4);
            let table = tm_boundary_function(&tm, &x, BlockRole::Whole).unwrap();
            let flat = eliminate_stay_moves(&tm);
            let space = ConfigSpace::for_machine(&flat).unwrap();
            let start = space.encode(&space.initial(&flat));
            let got = table.get(start, Side::Left);
            let want = match run_tm(&tm, &x).unwrap().outcome {
                TmOutcome::Accept => BoundaryOutcome::Accept,
                TmOutcome::Reject => BoundaryOutcome::Reject,
                TmOutcome::Diverged => BoundaryOutcome::Diverged,
            };
            assert_eq!(got, want, "machine/input mismatch on {x:?}");
        }
    }

    #[test]
    fn interior_block_exit_carries_post_transition_config() {
        // Runner that moves right through its block: entering an interior
        // block from the left must exit right, in the same control state.
        let t = |next| {
            Some(TmTransition {
                next,
                write: b'0',
                work_move: Move::Stay,
                input_move: Move::Right,
            })
        };
        let tm = Tm::new(
            vec!["run".into(), "acc".into(), "rej".into()],
            0,
            1,
            2,
            b"01".to_vec(),
            b"0".to_vec(),
            b'0',
            1,
            vec![vec![vec![t(0)], vec![t(0)], vec![t(0)], vec![t(0)]], vec![], vec![]],
        )
        .unwrap();
        let space = ConfigSpace::for_machine(&tm).unwrap();
        let start = space.encode(&space.initial(&tm));
        let table = tm_boundary_function(&tm, b"010", BlockRole::Interior).unwrap();
        match table.get(start, Side::Left) {
            BoundaryOutcome::Exit { config, side } => {
                assert_eq!(side, Side::Right);
                assert_eq!(space.decode(config).state, 0);
            }
            other => panic!("expected a right exit, got {other:?}"),
        }
    }

    #[test]
    fn config_space_size_guard_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let tm = sampling::random_tm(&mut rng, 3, 24);
        assert!(matches!(
            ConfigSpace::for_machine(&tm),
            Err(AutomataError::ConfigSpaceTooLarge { .. })
        ));
    }
}
