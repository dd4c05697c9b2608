//! Quadratic padding: a string `x` of length `n` becomes `x·0^{n²}`, total
//! length `N = n + n²`. A decider for the padded language needs only
//! `O(n) = O(√N)` space for the interesting prefix — which is how a
//! linear-space decision procedure rides inside a `√N`-space program.

use std::sync::Arc;

use mrc_core::{
    Acceptance, Decision, Enforcement, KeyValuePair, MrcProgram, PolyBound, Rational,
    ReducerOutput, ResourceLimits, RoundBehavior,
};

use crate::error::TranslateError;
use crate::wire::{parse_decimal, position_fragment, reassemble_block};

/// The membership procedure the padded program wraps. It sees the unpadded
/// prefix; the construction's space account assumes it works in memory
/// linear in that prefix.
pub type BaseDecider = Arc<dyn Fn(&[u8]) -> bool + Send + Sync>;

/// Appends `|x|²` zero bytes.
pub fn pad_string(x: &[u8]) -> Vec<u8> {
    let n = x.len();
    let mut padded = x.to_vec();
    padded.resize(n + n * n, b'0');
    padded
}

fn isqrt(v: u64) -> u64 {
    if v < 2 {
        return v;
    }
    let mut lo = 1u64;
    let mut hi = 1u64 << 32;
    while lo < hi {
        let mid = lo + (hi - lo + 1) / 2;
        if mid.checked_mul(mid).map(|sq| sq <= v).unwrap_or(false) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    lo
}

/// Solves `N = n + n²` for `n`, rejecting lengths with no integer solution.
pub fn check_padding(total_len: usize) -> Result<usize, TranslateError> {
    let total = total_len as u64;
    // n = (√(4N+1) − 1) / 2, checked exactly.
    let root = isqrt(4 * total + 1);
    let n = (root.saturating_sub(1) / 2) as usize;
    if n + n * n != total_len {
        return Err(TranslateError::MalformedPadding(format!(
            "no length n satisfies n + n² = {total_len}"
        )));
    }
    Ok(n)
}

/// The exact inverse of [`pad_string`]: validates the length arithmetic and
/// the all-zero suffix, then returns the prefix.
pub fn unpad_string(padded: &[u8]) -> Result<Vec<u8>, TranslateError> {
    let n = check_padding(padded.len())?;
    if let Some(offset) = padded[n..].iter().position(|&b| b != b'0') {
        return Err(TranslateError::MalformedPadding(format!(
            "pad byte at position {} is {:?}, expected '0'",
            n + offset + 1,
            padded[n + offset] as char
        )));
    }
    Ok(padded[..n].to_vec())
}

/// Builds the 1-round program deciding the padded language: the mapper
/// discards every in-pad zero, forwards the first `n` positions to a single
/// reducer, and flags any pad byte that is not a zero; the reducer
/// reassembles the prefix and applies `base` to it. Malformed padding — a
/// length with no valid `n`, or a dirty pad — surfaces as a behaviour
/// error, since such a string is outside the program's input contract.
pub fn make_padded_decider(base: BaseDecider) -> MrcProgram {
    let mapper = Arc::new(
        move |pair: &KeyValuePair,
              info: mrc_core::RoundInfo,
              _scratch: &mut mrc_core::ScratchMeter|
              -> Result<Vec<KeyValuePair>, String> {
            if pair.key.as_slice() == b"0" {
                // Empty-input placeholder: N = 0 solves as n = 0, so the
                // reducer still runs and decides base("").
                return Ok(vec![KeyValuePair::new("1", "i")]);
            }
            let Ok(prefix_len) = crate::padding::check_padding(info.n) else {
                return Ok(vec![KeyValuePair::new("1", "!")]);
            };
            let position = parse_decimal(&pair.key, "pair key")?;
            if position == 0 || position > info.n {
                return Err(format!("pair index {position} outside 1..={}", info.n));
            }
            if pair.value.len() != 1 {
                return Err(format!(
                    "pair {position} carries {} bytes, expected one symbol",
                    pair.value.len()
                ));
            }
            if position <= prefix_len {
                Ok(vec![KeyValuePair::new(
                    "1",
                    position_fragment(position, pair.value[0]),
                )])
            } else if pair.value[0] == b'0' {
                Ok(Vec::new()) // a correct pad byte is discarded
            } else {
                Ok(vec![KeyValuePair::new("1", "!")])
            }
        },
    );

    let reducer = Arc::new(
        move |key: &[u8],
              values: &[Vec<u8>],
              info: mrc_core::RoundInfo,
              scratch: &mut mrc_core::ScratchMeter|
              -> Result<ReducerOutput, String> {
            if key != b"1" {
                return Err(format!("unexpected reducer key {key:?}"));
            }
            let prefix_len = crate::padding::check_padding(info.n).map_err(|e| e.to_string())?;
            if values.iter().any(|v| v.as_slice() == b"!") {
                return Err("malformed padding: the pad has a non-zero byte".into());
            }
            let fragments = values.iter().filter(|v| v.as_slice() != b"i");
            let prefix = reassemble_block(fragments, 1, prefix_len)?;
            scratch.charge(prefix.len() as u64);
            let decision = if base(&prefix) {
                Decision::Accept
            } else {
                Decision::Reject
            };
            Ok(ReducerOutput::decide(decision))
        },
    );

    MrcProgram {
        rounds: 1,
        behavior: RoundBehavior::BuiltIn {
            name: "pad-strip-decide".into(),
            mapper,
            reducer,
        },
        limits: ResourceLimits {
            space_exponent: Rational::new(1, 2).unwrap(),
            space_constant: Rational::from_integer(64),
            time_bound: PolyBound::new(Rational::from_integer(64), Rational::from_integer(1)),
            keys_constant: Rational::from_integer(4),
            round_bound: PolyBound::new(Rational::from_integer(4), Rational::from_integer(0)),
            enforcement: Enforcement::RecordOnly,
        },
        acceptance: Acceptance::AcceptState,
    }
}
