//! Cross-simulations between the round engine and the barrier engine.
//!
//! Going one way, a round-based program runs on `p` barrier processors with
//! each round split into a map step and a reduce step — the declared round
//! count exactly doubles. Emitted pairs travel as messages routed by a hash
//! of their key, an accepting reducer raises the processor's flag the same
//! step, and a rejecting reducer poisons every processor so nothing later
//! can spuriously accept.
//!
//! Going the other way, a barrier machine runs one round per step — the
//! declared round count is preserved exactly. Each processor index becomes a
//! key, messages become values tagged with their (sender, emission)
//! coordinates so the canonical inbox order survives byte-wise key sorting,
//! and processor 1's reducer re-emits wake-up markers every round so idle
//! processors still run: a key with no values would otherwise never reach a
//! reducer.

use std::collections::BTreeMap;
use std::sync::Arc;

use mrc_core::{
    invoke_mapper, invoke_reducer, sentinel_pair, Acceptance, Decision, Enforcement,
    KeyValuePair, MapperFn, MrcProgram, Rational, ReducerFn, ReducerOutput, RoundBehavior,
    RoundInfo,
};

use crate::error::BspError;
use crate::machine::{piece_range, BspMachine, BspRoundCtx, BspStep, BspStepFn, Message};

/// Broadcast when a reduce step decides Reject: a receiver goes silent, so
/// the machine is quiet from the next barrier on and the run ends rejecting.
/// It can never collide with an encoded pair, whose first byte is a digit.
pub const POISON: &[u8] = b"x";

/// FNV-1a, 64 bits: a stable, dependency-free key hash.
fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// The processor (1-based) that owns a key.
pub fn owner(key: &[u8], p: usize) -> usize {
    1 + (fnv1a64(key) % p as u64) as usize
}

/// Encodes one key-value pair as a message payload: `{key_len}:{key}{value}`.
pub fn encode_pair(key: &[u8], value: &[u8]) -> Vec<u8> {
    let mut out = key.len().to_string().into_bytes();
    out.push(b':');
    out.extend_from_slice(key);
    out.extend_from_slice(value);
    out
}

/// Inverse of [`encode_pair`].
pub fn parse_pair(payload: &[u8]) -> Result<(Vec<u8>, Vec<u8>), String> {
    let colon = payload
        .iter()
        .position(|&b| b == b':')
        .ok_or("pair payload without a length header")?;
    let len: usize = std::str::from_utf8(&payload[..colon])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or("pair payload with a malformed length header")?;
    let rest = &payload[colon + 1..];
    if rest.len() < len {
        return Err(format!(
            "pair payload shorter than its declared key length {len}"
        ));
    }
    Ok((rest[..len].to_vec(), rest[len..].to_vec()))
}

fn behavior_name(behavior: &RoundBehavior) -> &str {
    match behavior {
        RoundBehavior::BuiltIn { name, .. } => name,
        RoundBehavior::Interpreted { name, .. } => name,
    }
}

/// `4 · r`, saturating in the numerator.
fn scale4(r: &Rational) -> Rational {
    Rational::new(r.numerator().saturating_mul(4), r.denominator())
        .expect("denominator is already nonzero")
}

/// The larger of `r` and the integer `floor`.
fn at_least(r: Rational, floor: u64) -> Rational {
    if r.numerator() as u128 >= floor as u128 * r.denominator() as u128 {
        r
    } else {
        Rational::from_integer(floor)
    }
}

/// Runs a round-based program on `p` barrier processors. Every program round
/// becomes two steps — map, then reduce — so the machine declares exactly
/// `2 · rounds` rounds.
///
/// The machine's own meters get the program's limits with constants scaled
/// by 4 (and the key constant raised to at least `p`), recorded but not
/// enforced: key hashing may concentrate a round's whole key population on
/// one processor, which is legitimate here even where the per-invocation
/// budgets of the round engine would not allow it. The behaviours inside
/// still run under the program's own unscaled step budgets.
pub fn mrc_to_bsp(program: &MrcProgram, p: usize) -> Result<BspMachine, BspError> {
    if p == 0 {
        return Err(BspError::InvalidMachine(
            "processor count must be at least 1".into(),
        ));
    }
    if program.acceptance != Acceptance::AcceptState {
        return Err(BspError::InvalidMachine(
            "only flag-accepting programs translate: the barrier machine signals its verdict by flag".into(),
        ));
    }
    if program.rounds == 0 {
        return Err(BspError::InvalidMachine(
            "a program needs at least one round".into(),
        ));
    }

    let behavior = program.behavior.clone();
    let source_limits = program.limits;
    let step: BspStepFn = Arc::new(move |ctx, scratch| {
        let n = ctx.n;
        let info = RoundInfo {
            round: ctx.round.div_ceil(2),
            n,
        };
        let budget = source_limits.steps_per_invocation(n);

        if ctx.round % 2 == 1 {
            // Map step: collect this processor's pairs, map each, and route
            // every output to the processor owning its key.
            let mut pairs: Vec<KeyValuePair> = Vec::new();
            if ctx.round == 1 {
                if n == 0 {
                    if ctx.processor == 1 {
                        pairs.push(sentinel_pair());
                    }
                } else {
                    let (start, _) = piece_range(n, p, ctx.processor);
                    for (k, &byte) in ctx.piece.iter().enumerate() {
                        pairs.push(KeyValuePair::new((start + k).to_string(), vec![byte]));
                    }
                }
            } else {
                for payload in ctx.inbox {
                    if payload.as_slice() == POISON {
                        return Ok(BspStep::idle());
                    }
                    let (key, value) = parse_pair(payload)?;
                    pairs.push(KeyValuePair::new(key, value));
                }
            }
            let mut messages = Vec::new();
            for pair in &pairs {
                let result =
                    invoke_mapper(&behavior, pair, info, budget).map_err(|e| e.to_string())?;
                scratch.charge(result.scratch_peak);
                scratch.release(result.scratch_peak);
                for out in result.pairs {
                    messages.push(Message::new(
                        owner(&out.key, p),
                        encode_pair(&out.key, &out.value),
                    ));
                }
            }
            Ok(BspStep::send(messages))
        } else {
            // Reduce step: group the owned pairs by key, run the reducer per
            // group, and merge decisions with Accept winning.
            let mut groups: BTreeMap<Vec<u8>, Vec<Vec<u8>>> = BTreeMap::new();
            for payload in ctx.inbox {
                if payload.as_slice() == POISON {
                    return Ok(BspStep::idle());
                }
                let (key, value) = parse_pair(payload)?;
                groups.entry(key).or_default().push(value);
            }
            let mut decision: Option<Decision> = None;
            let mut outputs: Vec<KeyValuePair> = Vec::new();
            for (key, values) in &groups {
                let result = invoke_reducer(&behavior, key, values, info, budget)
                    .map_err(|e| e.to_string())?;
                scratch.charge(result.scratch_peak);
                scratch.release(result.scratch_peak);
                outputs.extend(result.pairs);
                decision = match (decision, result.decision) {
                    (Some(Decision::Accept), _) | (_, Some(Decision::Accept)) => {
                        Some(Decision::Accept)
                    }
                    (d, r) => r.or(d),
                };
            }
            match decision {
                Some(Decision::Accept) => Ok(BspStep {
                    messages: to_self_messages(ctx.processor, outputs),
                    accept: true,
                }),
                Some(Decision::Reject) => {
                    // The round engine stops on a reject flag; the only way
                    // to stop a barrier machine is to silence it.
                    Ok(BspStep::send(
                        (1..=p).map(|j| Message::new(j, POISON)).collect(),
                    ))
                }
                None => Ok(BspStep::send(to_self_messages(ctx.processor, outputs))),
            }
        }
    });

    let mut limits = source_limits;
    limits.space_constant = scale4(&limits.space_constant);
    limits.time_bound.constant = scale4(&limits.time_bound.constant);
    limits.round_bound.constant = scale4(&limits.round_bound.constant);
    limits.keys_constant = at_least(scale4(&limits.keys_constant), p as u64);
    limits.enforcement = Enforcement::RecordOnly;

    Ok(BspMachine {
        name: format!("{}@p{p}", behavior_name(&program.behavior)),
        p,
        rounds: program.rounds * 2,
        behavior: step,
        limits,
    })
}

/// Reducer outputs stay on their processor; the next map step re-routes
/// them by key.
fn to_self_messages(processor: usize, outputs: Vec<KeyValuePair>) -> Vec<Message> {
    outputs
        .into_iter()
        .map(|out| Message::new(processor, encode_pair(&out.key, &out.value)))
        .collect()
}

/// The processor whose piece contains position `i` (all 1-based), inverting
/// the front-loaded split of [`piece_range`].
fn owning_processor(n: usize, p: usize, i: usize) -> Result<usize, String> {
    if i == 0 || i > n {
        return Err(format!("position {i} outside 1..={n}"));
    }
    let base = n / p;
    let extra = n % p;
    let wide = extra * (base + 1);
    if i <= wide {
        Ok(1 + (i - 1) / (base + 1))
    } else {
        Ok(1 + extra + (i - 1 - wide) / base)
    }
}

/// Tagged message value: `m{sender},{emission}:{payload}`.
fn encode_tagged(sender: usize, emission: usize, payload: &[u8]) -> Vec<u8> {
    let mut value = format!("m{sender},{emission}:").into_bytes();
    value.extend_from_slice(payload);
    value
}

/// Inverse of [`encode_tagged`].
fn parse_tagged(value: &[u8]) -> Result<(u64, u64, Vec<u8>), String> {
    let malformed = || format!("malformed tagged message {:?}", String::from_utf8_lossy(value));
    let rest = value.strip_prefix(b"m").ok_or_else(malformed)?;
    let comma = rest.iter().position(|&b| b == b',').ok_or_else(malformed)?;
    let colon = rest.iter().position(|&b| b == b':').ok_or_else(malformed)?;
    if colon < comma {
        return Err(malformed());
    }
    let sender: u64 = std::str::from_utf8(&rest[..comma])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(malformed)?;
    let emission: u64 = std::str::from_utf8(&rest[comma + 1..colon])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(malformed)?;
    Ok((sender, emission, rest[colon + 1..].to_vec()))
}

/// Runs a barrier machine in the round engine, one round per machine round —
/// the declared round count is preserved exactly.
///
/// Keys are processor indices. Round 1 mappers scatter input positions to
/// their owning processor's key as `{position}:{byte}` fragments and send a
/// wake-up marker `k` to every key (from the sentinel when the input is
/// empty); later rounds forward pairs unchanged. The reducer for key `j`
/// reassembles the piece (round 1), orders the delivered messages by their
/// (sender, emission) tags, runs the processor's step, and re-emits its
/// messages tagged for the next round; processor 1's reducer also renews the
/// wake-up markers so every key stays populated. An accept flag becomes an
/// accept decision.
///
/// Meters are the machine's limits with constants scaled by 4, recorded but
/// not enforced, and with floors covering the wrapper's own bookkeeping,
/// which does not shrink with `n`: the key constant is raised to at least
/// `4·(p+1)` (the busiest mapper emits one fragment plus `p` markers) and
/// the space and step constants to at least `4·(p+1)·(digits(p)+1)` (the
/// byte cost of a full marker broadcast).
pub fn bsp_to_mrc(machine: &BspMachine) -> Result<MrcProgram, BspError> {
    let p = machine.p;
    if p == 0 {
        return Err(BspError::InvalidMachine(
            "processor count must be at least 1".into(),
        ));
    }
    if machine.rounds == 0 {
        return Err(BspError::InvalidMachine(
            "a machine needs at least one round".into(),
        ));
    }

    let mapper: MapperFn = Arc::new(move |pair, info, _scratch| {
        if info.round > 1 {
            return Ok(vec![pair.clone()]);
        }
        if pair.key == b"0" {
            // Empty input: the sentinel wakes every processor.
            return Ok((1..=p)
                .map(|j| KeyValuePair::new(j.to_string(), "k"))
                .collect());
        }
        let i: usize = std::str::from_utf8(&pair.key)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| {
                format!(
                    "input key {:?} is not a position",
                    String::from_utf8_lossy(&pair.key)
                )
            })?;
        if pair.value.len() != 1 {
            return Err(format!(
                "position {i} holds {} bytes; a barrier machine reads a byte string",
                pair.value.len()
            ));
        }
        let j = owning_processor(info.n, p, i)?;
        let mut fragment = i.to_string().into_bytes();
        fragment.push(b':');
        fragment.extend_from_slice(&pair.value);
        let mut out = vec![KeyValuePair::new(j.to_string(), fragment)];
        if i == 1 {
            out.extend((1..=p).map(|jj| KeyValuePair::new(jj.to_string(), "k")));
        }
        Ok(out)
    });

    let step = machine.behavior.clone();
    let total_rounds = machine.rounds;
    let reducer: ReducerFn = Arc::new(move |key, values, info, scratch| {
        let j: usize = std::str::from_utf8(key)
            .ok()
            .and_then(|s| s.parse().ok())
            .filter(|j| (1..=p).contains(j))
            .ok_or_else(|| {
                format!(
                    "key {:?} is not a processor index",
                    String::from_utf8_lossy(key)
                )
            })?;

        let (start, len) = piece_range(info.n, p, j);
        let mut slots: Vec<Option<u8>> = vec![None; if info.round == 1 { len } else { 0 }];
        let mut tagged: Vec<(u64, u64, Vec<u8>)> = Vec::new();
        for value in values {
            if value.as_slice() == b"k" {
                continue;
            }
            if info.round == 1 {
                // `{position}:{byte}` fragment of this processor's piece.
                let colon = value
                    .iter()
                    .position(|&b| b == b':')
                    .ok_or("round 1 value is neither a marker nor a fragment")?;
                let i: usize = std::str::from_utf8(&value[..colon])
                    .ok()
                    .and_then(|s| s.parse().ok())
                    .ok_or("fragment with a malformed position")?;
                let body = &value[colon + 1..];
                if body.len() != 1 {
                    return Err(format!("fragment {i} is not a single byte"));
                }
                if !(start..start + len).contains(&i) {
                    return Err(format!("fragment {i} does not belong to processor {j}"));
                }
                let slot = &mut slots[i - start];
                if slot.is_some() {
                    return Err(format!("duplicate fragment {i}"));
                }
                *slot = Some(body[0]);
            } else if value.first() == Some(&b'm') {
                tagged.push(parse_tagged(value)?);
            } else {
                return Err(format!(
                    "unrecognized value {:?}",
                    String::from_utf8_lossy(value)
                ));
            }
        }
        let piece: Vec<u8> = slots
            .into_iter()
            .enumerate()
            .map(|(k, slot)| slot.ok_or_else(|| format!("missing fragment {}", start + k)))
            .collect::<Result<_, _>>()?;
        scratch.charge(piece.len() as u64);

        // Tags restore the canonical (sender, emission) inbox order, which
        // byte-wise key sorting cannot be trusted to preserve.
        tagged.sort();
        let inbox: Vec<Vec<u8>> = tagged.into_iter().map(|(_, _, payload)| payload).collect();

        let ctx = BspRoundCtx {
            processor: j,
            round: info.round,
            n: info.n,
            piece: &piece,
            inbox: &inbox,
        };
        let result = step(&ctx, scratch)?;

        let mut out = Vec::new();
        for (e, m) in result.messages.iter().enumerate() {
            if m.dest == 0 || m.dest > p {
                return Err(format!("message destination {} outside 1..={p}", m.dest));
            }
            out.push(KeyValuePair::new(
                m.dest.to_string(),
                encode_tagged(j, e, &m.payload),
            ));
        }
        if j == 1 && info.round < total_rounds {
            out.extend((1..=p).map(|jj| KeyValuePair::new(jj.to_string(), "k")));
        }
        let output = ReducerOutput::pairs(out);
        Ok(if result.accept {
            output.with_decision(Decision::Accept)
        } else {
            output
        })
    });

    let marker_bytes = 4 * (p as u64 + 1) * (u64::from(mrc_core::decimal_digits(p as u64)) + 1);
    let mut limits = machine.limits;
    limits.space_constant = at_least(scale4(&limits.space_constant), marker_bytes);
    limits.time_bound.constant = at_least(scale4(&limits.time_bound.constant), marker_bytes);
    limits.round_bound.constant = scale4(&limits.round_bound.constant);
    limits.keys_constant = at_least(scale4(&limits.keys_constant), 4 * (p as u64 + 1));
    limits.enforcement = Enforcement::RecordOnly;

    Ok(MrcProgram {
        rounds: machine.rounds,
        behavior: RoundBehavior::BuiltIn {
            name: format!("{}@rounds", machine.name),
            mapper,
            reducer,
        },
        limits,
        acceptance: Acceptance::AcceptState,
    })
}
