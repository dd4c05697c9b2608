//! A small regex-to-DFA compiler over the binary alphabet `{0, 1}`.
//!
//! Grammar: alternation of concatenations of starred atoms, where an atom is
//! `0`, `1`, or a parenthesised group. The pattern is parsed into a Thompson
//! automaton with epsilon moves, then determinised by subset construction;
//! DFA states are named `s0`, `s1`, … in discovery order so the output is a
//! deterministic function of the pattern.

use std::collections::BTreeSet;

use automata::Dfa;

use crate::error::CliError;

const ALPHABET: [u8; 2] = [b'0', b'1'];

/// One Thompson-automaton state: up to two epsilon successors, plus an
/// optional byte edge.
#[derive(Debug, Clone, Default)]
struct NfaState {
    eps: Vec<usize>,
    on_byte: Option<(u8, usize)>,
}

/// A fragment under construction: entry state and exit state. The exit has
/// no outgoing edges yet, so it can be patched by the combinators.
#[derive(Debug, Clone, Copy)]
struct Frag {
    start: usize,
    end: usize,
}

struct Builder {
    states: Vec<NfaState>,
}

impl Builder {
    fn push(&mut self) -> usize {
        self.states.push(NfaState::default());
        self.states.len() - 1
    }

    fn empty(&mut self) -> Frag {
        let start = self.push();
        let end = self.push();
        self.states[start].eps.push(end);
        Frag { start, end }
    }

    fn byte(&mut self, b: u8) -> Frag {
        let start = self.push();
        let end = self.push();
        self.states[start].on_byte = Some((b, end));
        Frag { start, end }
    }

    fn concat(&mut self, a: Frag, b: Frag) -> Frag {
        self.states[a.end].eps.push(b.start);
        Frag { start: a.start, end: b.end }
    }

    fn alternate(&mut self, a: Frag, b: Frag) -> Frag {
        let start = self.push();
        let end = self.push();
        self.states[start].eps.push(a.start);
        self.states[start].eps.push(b.start);
        self.states[a.end].eps.push(end);
        self.states[b.end].eps.push(end);
        Frag { start, end }
    }

    fn star(&mut self, a: Frag) -> Frag {
        let start = self.push();
        let end = self.push();
        self.states[start].eps.push(a.start);
        self.states[start].eps.push(end);
        self.states[a.end].eps.push(a.start);
        self.states[a.end].eps.push(end);
        Frag { start, end }
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek();
        if b.is_some() {
            self.pos += 1;
        }
        b
    }

    /// alternation := concatenation ('|' concatenation)*
    fn alternation(&mut self, b: &mut Builder) -> Result<Frag, CliError> {
        let mut frag = self.concatenation(b)?;
        while self.peek() == Some(b'|') {
            self.bump();
            let rhs = self.concatenation(b)?;
            frag = b.alternate(frag, rhs);
        }
        Ok(frag)
    }

    /// concatenation := starred* (empty allowed)
    fn concatenation(&mut self, b: &mut Builder) -> Result<Frag, CliError> {
        let mut frag: Option<Frag> = None;
        while matches!(self.peek(), Some(c) if c != b'|' && c != b')') {
            let rhs = self.starred(b)?;
            frag = Some(match frag {
                Some(lhs) => b.concat(lhs, rhs),
                None => rhs,
            });
        }
        Ok(frag.unwrap_or_else(|| b.empty()))
    }

    /// starred := atom '*'*
    fn starred(&mut self, b: &mut Builder) -> Result<Frag, CliError> {
        let mut frag = self.atom(b)?;
        while self.peek() == Some(b'*') {
            self.bump();
            frag = b.star(frag);
        }
        Ok(frag)
    }

    /// atom := '0' | '1' | '(' alternation ')'
    fn atom(&mut self, b: &mut Builder) -> Result<Frag, CliError> {
        match self.bump() {
            Some(c @ (b'0' | b'1')) => Ok(b.byte(c)),
            Some(b'(') => {
                let frag = self.alternation(b)?;
                if self.bump() != Some(b')') {
                    return Err(CliError::invalid("unbalanced '(' in pattern"));
                }
                Ok(frag)
            }
            Some(b'*') => Err(CliError::invalid("'*' needs something to repeat")),
            Some(other) => Err(CliError::invalid(format!(
                "unexpected {:?} in pattern (allowed: 0 1 | * parentheses)",
                other as char
            ))),
            None => Err(CliError::invalid("pattern ended unexpectedly")),
        }
    }
}

/// The epsilon closure of a state set, as a sorted set (canonical form).
fn closure(states: &[NfaState], seed: impl IntoIterator<Item = usize>) -> BTreeSet<usize> {
    let mut set: BTreeSet<usize> = BTreeSet::new();
    let mut stack: Vec<usize> = seed.into_iter().collect();
    while let Some(s) = stack.pop() {
        if set.insert(s) {
            stack.extend(states[s].eps.iter().copied());
        }
    }
    set
}

/// Compiles a pattern over `{0, 1}` into a DFA on the alphabet `"01"`.
pub fn regex_to_dfa(pattern: &str) -> Result<Dfa, CliError> {
    let trimmed = pattern.trim();
    let mut builder = Builder { states: Vec::new() };
    let mut parser = Parser { bytes: trimmed.as_bytes(), pos: 0 };
    let frag = parser.alternation(&mut builder)?;
    if parser.pos != trimmed.len() {
        return Err(CliError::invalid("unbalanced ')' in pattern"));
    }
    let nfa = builder.states;
    let accept = frag.end;

    let start_set = closure(&nfa, [frag.start]);
    let mut subsets: Vec<BTreeSet<usize>> = vec![start_set.clone()];
    let mut seen: BTreeSet<BTreeSet<usize>> = BTreeSet::from([start_set]);
    let mut transitions: Vec<Vec<usize>> = Vec::new();
    let mut i = 0;
    while i < subsets.len() {
        let current = subsets[i].clone();
        let mut row = Vec::with_capacity(ALPHABET.len());
        for &byte in &ALPHABET {
            let moved = current.iter().filter_map(|&s| match nfa[s].on_byte {
                Some((b, t)) if b == byte => Some(t),
                _ => None,
            });
            let next = closure(&nfa, moved);
            let id = match subsets.iter().position(|s| *s == next) {
                Some(id) => id,
                None => {
                    seen.insert(next.clone());
                    subsets.push(next);
                    subsets.len() - 1
                }
            };
            row.push(id);
        }
        transitions.push(row);
        i += 1;
    }

    let names: Vec<String> = (0..subsets.len()).map(|i| format!("s{i}")).collect();
    let accepting: Vec<usize> = subsets
        .iter()
        .enumerate()
        .filter(|(_, set)| set.contains(&accept))
        .map(|(i, _)| i)
        .collect();
    Ok(Dfa::new(names, ALPHABET.to_vec(), transitions, 0, accepting)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn accepts(pattern: &str, input: &str) -> bool {
        regex_to_dfa(pattern).unwrap().accepts(input.as_bytes()).unwrap()
    }

    #[test]
    fn literals_and_concatenation() {
        assert!(accepts("0110", "0110"));
        assert!(!accepts("0110", "011"));
        assert!(!accepts("0110", "01100"));
    }

    #[test]
    fn alternation_and_grouping() {
        assert!(accepts("01|10", "01"));
        assert!(accepts("01|10", "10"));
        assert!(!accepts("01|10", "11"));
        assert!(accepts("0(1|0)1", "011"));
        assert!(accepts("0(1|0)1", "001"));
    }

    #[test]
    fn star_matches_any_repetition() {
        for input in ["", "01", "0101", "010101"] {
            assert!(accepts("(01)*", input), "{input:?}");
        }
        assert!(!accepts("(01)*", "010"));
        assert!(accepts("0*1*", "000111"));
        assert!(!accepts("0*1*", "0010"));
    }

    #[test]
    fn empty_pattern_matches_only_the_empty_string() {
        assert!(accepts("", ""));
        assert!(!accepts("", "0"));
    }

    #[test]
    fn malformed_patterns_are_rejected() {
        for bad in ["(01", "01)", "*", "0a1", "(|*)"] {
            assert!(regex_to_dfa(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn determinisation_is_stable() {
        let a = regex_to_dfa("(0|1)*01").unwrap();
        let b = regex_to_dfa("(0|1)*01").unwrap();
        assert_eq!(a.state_count(), b.state_count());
        for n in 0..16u32 {
            for len in 0..=4usize {
                if (n as usize) < 1 << len {
                    let bits: Vec<u8> = (0..len)
                        .map(|i| if n >> (len - 1 - i) & 1 == 1 { b'1' } else { b'0' })
                        .collect();
                    assert_eq!(a.accepts(&bits).unwrap(), b.accepts(&bits).unwrap());
                }
            }
        }
    }
}
