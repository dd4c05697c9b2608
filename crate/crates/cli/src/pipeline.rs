//! The registry of built-in round programs a pipeline document can name,
//! plus input encoding and the `--limits` overlay.
//!
//! Builtins:
//!
//! - `dfa2mrc` — compiles the embedded DFA (parameter `epsilon`, default
//!   `"1/2"`, sets the block exponent).
//! - `tm2mrc` — compiles the embedded work-tape machine; also checks the
//!   collector's table set fits the space budget at the given input length.
//! - `tisp2mrc` — compiles the embedded budgeted single-tape machine.
//! - `pad-decider` — decides the quadratically padded version of a named
//!   base language (parameter `base`: `palindrome`, `all-zeros`, or
//!   `odd-ones`).
//! - `unary-table` — accepts the all-ones string of length n exactly when n
//!   appears in `table`; the answer is encoded in the round structure.
//! - `wordcount` — counts whitespace-separated tokens and emits
//!   ⟨token, count⟩ pairs in sorted order.
//! - `key-flood` — a deliberately wasteful program (each input position
//!   fans out to n distinct keys) for demonstrating limit enforcement.
//! - `from-barrier` — runs the embedded barrier machine one superstep per
//!   round.

use std::sync::Arc;

use bsp_core::{bsp_to_mrc, mrc_to_bsp, BspMachine};
use mrc_core::{
    Acceptance, Decision, Enforcement, InputEncoding, KeyValuePair, MrcProgram, PolyBound,
    Rational, ReducerOutput, ResourceLimits, RoundBehavior, RoundInfo, ScratchMeter,
};
use translators::{
    build_unary_nonuniform, compile_dfa_to_mrc, compile_sublog_tm_to_mrc, compile_tisp_to_mrc,
    make_padded_decider, tisp_space_feasibility, tm_collector_feasibility, BaseDecider,
    UnaryOracle,
};

use crate::error::CliError;
use crate::schema::{BspDoc, PipelineDoc};

/// How raw input bytes become engine input.
#[derive(Debug, Clone, PartialEq)]
pub enum InputMode {
    /// One pair per byte; `allowed` (when present) is the symbol set the
    /// machine declares, checked before anything runs.
    Symbols { allowed: Option<Vec<u8>> },
    /// One pair per whitespace-separated token.
    Tokens,
}

/// Encodes raw input bytes according to the mode.
pub fn encode_input(mode: &InputMode, bytes: &[u8]) -> Result<InputEncoding, CliError> {
    match mode {
        InputMode::Symbols { allowed } => {
            if let Some(allowed) = allowed {
                if let Some(pos) = bytes.iter().position(|b| !allowed.contains(b)) {
                    return Err(CliError::invalid(format!(
                        "input byte {:?} at position {} is outside the machine's alphabet {:?}",
                        bytes[pos] as char,
                        pos + 1,
                        String::from_utf8_lossy(allowed)
                    )));
                }
            }
            Ok(InputEncoding::from_symbols(bytes))
        }
        InputMode::Tokens => {
            let text = std::str::from_utf8(bytes)
                .map_err(|_| CliError::invalid("token input must be valid UTF-8"))?;
            let pairs: Vec<KeyValuePair> = text
                .split_ascii_whitespace()
                .enumerate()
                .map(|(i, token)| KeyValuePair::new((i + 1).to_string(), token))
                .collect();
            Ok(InputEncoding::from_pairs(pairs))
        }
    }
}

fn require<'a, T>(field: &'a Option<T>, builtin: &str, name: &str) -> Result<&'a T, CliError> {
    field.as_ref().ok_or_else(|| {
        CliError::invalid(format!("builtin {builtin:?} needs the {name:?} parameter"))
    })
}

fn block_exponent(doc: &PipelineDoc) -> Result<Rational, CliError> {
    doc.epsilon
        .as_deref()
        .unwrap_or("1/2")
        .parse::<Rational>()
        .map_err(CliError::from)
}

/// The named base languages `pad-decider` can wrap.
pub fn base_decider(name: &str) -> Result<BaseDecider, CliError> {
    match name {
        "palindrome" => Ok(Arc::new(|x: &[u8]| x.iter().eq(x.iter().rev()))),
        "all-zeros" => Ok(Arc::new(|x: &[u8]| x.iter().all(|&b| b == b'0'))),
        "odd-ones" => Ok(Arc::new(|x: &[u8]| {
            x.iter().filter(|&&b| b == b'1').count() % 2 == 1
        })),
        other => Err(CliError::invalid(format!(
            "unknown base language {other:?} (expected palindrome, all-zeros, or odd-ones)"
        ))),
    }
}

/// Builds the round program a pipeline document names, for inputs of length
/// `n`. Some builtins genuinely depend on `n` (the per-length table
/// machine); the rest use it only for feasibility checks.
pub fn build_program(doc: &PipelineDoc, n: usize) -> Result<MrcProgram, CliError> {
    match doc.builtin.as_str() {
        "dfa2mrc" => {
            let dfa = require(&doc.dfa, "dfa2mrc", "dfa")?.to_machine()?;
            Ok(compile_dfa_to_mrc(&dfa, block_exponent(doc)?)?)
        }
        "tm2mrc" => {
            let tm = require(&doc.tm, "tm2mrc", "tm")?.to_machine()?;
            let epsilon = block_exponent(doc)?;
            let program = compile_sublog_tm_to_mrc(&tm, epsilon)?;
            tm_collector_feasibility(&tm, n, epsilon, &program.limits)?;
            Ok(program)
        }
        "tisp2mrc" => {
            let spec = require(&doc.tisp, "tisp2mrc", "tisp")?;
            let machine = spec.to_machine()?;
            tisp_space_feasibility(spec.space_budget, n)?;
            Ok(compile_tisp_to_mrc(
                &machine,
                spec.time_budget,
                spec.space_budget,
            )?)
        }
        "pad-decider" => {
            let base = require(&doc.base, "pad-decider", "base")?;
            Ok(make_padded_decider(base_decider(base)?))
        }
        "unary-table" => {
            let table = require(&doc.table, "unary-table", "table")?.clone();
            let oracle: UnaryOracle = Arc::new(move |count| table.contains(&count));
            Ok(build_unary_nonuniform(oracle, n))
        }
        "wordcount" => Ok(wordcount_program()),
        "key-flood" => Ok(key_flood_program()),
        "from-barrier" => {
            let machine = build_bsp(require(&doc.bsp, "from-barrier", "bsp")?, n)?;
            Ok(bsp_to_mrc(&machine)?)
        }
        other => Err(CliError::invalid(format!(
            "unknown builtin {other:?} (expected dfa2mrc, tm2mrc, tisp2mrc, pad-decider, \
             unary-table, wordcount, key-flood, or from-barrier)"
        ))),
    }
}

/// Builds the barrier machine a barrier document names.
pub fn build_bsp(doc: &BspDoc, n: usize) -> Result<BspMachine, CliError> {
    match doc.builtin.as_str() {
        "from-rounds" => {
            let inner = require(&doc.pipeline, "from-rounds", "pipeline")?;
            if input_mode(inner)? == InputMode::Tokens {
                return Err(CliError::invalid(format!(
                    "the barrier engine delivers byte pieces; builtin {:?} reads tokens, \
                     which cannot cross the piece split",
                    inner.builtin
                )));
            }
            let program = build_program(inner, n)?;
            Ok(mrc_to_bsp(&program, doc.p)?)
        }
        other => Err(CliError::invalid(format!(
            "unknown barrier builtin {other:?} (expected from-rounds)"
        ))),
    }
}

/// The input mode a pipeline document expects.
pub fn input_mode(doc: &PipelineDoc) -> Result<InputMode, CliError> {
    match doc.builtin.as_str() {
        "dfa2mrc" => Ok(InputMode::Symbols {
            allowed: Some(require(&doc.dfa, "dfa2mrc", "dfa")?.alphabet.as_bytes().to_vec()),
        }),
        "tm2mrc" => Ok(InputMode::Symbols {
            allowed: Some(
                require(&doc.tm, "tm2mrc", "tm")?
                    .input_alphabet
                    .as_bytes()
                    .to_vec(),
            ),
        }),
        "tisp2mrc" => Ok(InputMode::Symbols {
            allowed: Some(
                require(&doc.tisp, "tisp2mrc", "tisp")?
                    .alphabet
                    .as_bytes()
                    .to_vec(),
            ),
        }),
        "wordcount" => Ok(InputMode::Tokens),
        "pad-decider" | "unary-table" | "key-flood" => {
            Ok(InputMode::Symbols { allowed: None })
        }
        "from-barrier" => bsp_input_mode(require(&doc.bsp, "from-barrier", "bsp")?),
        other => Err(CliError::invalid(format!("unknown builtin {other:?}"))),
    }
}

/// The input mode a barrier document expects (that of its inner pipeline,
/// which must be byte-based: the engine splits raw bytes into pieces).
pub fn bsp_input_mode(doc: &BspDoc) -> Result<InputMode, CliError> {
    match doc.builtin.as_str() {
        "from-rounds" => {
            let mode = input_mode(require(&doc.pipeline, "from-rounds", "pipeline")?)?;
            if mode == InputMode::Tokens {
                return Err(CliError::invalid(
                    "the barrier engine delivers byte pieces; token-input pipelines cannot cross it",
                ));
            }
            Ok(mode)
        }
        other => Err(CliError::invalid(format!(
            "unknown barrier builtin {other:?} (expected from-rounds)"
        ))),
    }
}

/// Applies a `--limits` overlay: comma-separated directives over the
/// program's own limits. `enforce` / `record-only` switch the mode;
/// `c=⟨rational⟩` sets the space exponent; `const=⟨rational⟩` sets every
/// leading constant (space, keys, step, and round bounds) at once.
pub fn apply_limits_flag(limits: &mut ResourceLimits, flag: &str) -> Result<(), CliError> {
    for token in flag.split(',') {
        let token = token.trim();
        match token {
            "" => continue,
            "enforce" => limits.enforcement = Enforcement::Enforce,
            "record-only" => limits.enforcement = Enforcement::RecordOnly,
            _ => {
                if let Some(value) = token.strip_prefix("c=") {
                    limits.space_exponent = value.parse::<Rational>()?;
                } else if let Some(value) = token.strip_prefix("const=") {
                    let constant = value.parse::<Rational>()?;
                    limits.space_constant = constant;
                    limits.keys_constant = constant;
                    limits.time_bound.constant = constant;
                    limits.round_bound.constant = constant;
                } else {
                    return Err(CliError::invalid(format!(
                        "unknown limits directive {token:?} (expected enforce, record-only, \
                         c=⟨rational⟩, or const=⟨rational⟩)"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Two rounds: count each token, then collect every ⟨token, count⟩ line on
/// one key and re-emit them in sorted order with an accepting flag.
fn wordcount_program() -> MrcProgram {
    let mapper = Arc::new(
        |pair: &KeyValuePair,
         info: RoundInfo,
         _scratch: &mut ScratchMeter|
         -> Result<Vec<KeyValuePair>, String> {
            match info.round {
                1 => {
                    if pair.key.as_slice() == b"0" {
                        // Empty input: keep a marker alive so the collector
                        // still runs and accepts. Tokens never contain
                        // whitespace, so the space key cannot collide.
                        return Ok(vec![KeyValuePair::new(" ", "k")]);
                    }
                    Ok(vec![KeyValuePair::new(pair.value.clone(), "1")])
                }
                _ => {
                    if pair.key.as_slice() == b" " {
                        return Ok(vec![KeyValuePair::new("*", "")]);
                    }
                    let mut line = pair.key.clone();
                    line.push(b'\t');
                    line.extend_from_slice(&pair.value);
                    Ok(vec![KeyValuePair::new("*", line)])
                }
            }
        },
    );
    let reducer = Arc::new(
        |key: &[u8],
         values: &[Vec<u8>],
         info: RoundInfo,
         scratch: &mut ScratchMeter|
         -> Result<ReducerOutput, String> {
            match info.round {
                1 => {
                    scratch.charge(1);
                    if key == b" " {
                        // Empty-input marker: pass through, not a count.
                        return Ok(ReducerOutput::pairs(vec![KeyValuePair::new(" ", "k")]));
                    }
                    Ok(ReducerOutput::pairs(vec![KeyValuePair::new(
                        key,
                        values.len().to_string(),
                    )]))
                }
                _ => {
                    let mut lines: Vec<&Vec<u8>> = values.iter().filter(|v| !v.is_empty()).collect();
                    // The tab byte sorts below every printable byte, so
                    // whole-line order equals token order.
                    lines.sort_unstable();
                    scratch.charge(lines.len().max(1) as u64);
                    let mut pairs = Vec::with_capacity(lines.len());
                    for line in lines {
                        let cut = line
                            .iter()
                            .position(|&b| b == b'\t')
                            .ok_or("collector line lost its tab separator")?;
                        pairs.push(KeyValuePair::new(&line[..cut], &line[cut + 1..]));
                    }
                    Ok(ReducerOutput::pairs(pairs).with_decision(Decision::Accept))
                }
            }
        },
    );
    MrcProgram {
        rounds: 2,
        behavior: RoundBehavior::BuiltIn {
            name: "token-count".into(),
            mapper,
            reducer,
        },
        limits: ResourceLimits {
            space_exponent: Rational::new(1, 2).unwrap(),
            space_constant: Rational::from_integer(4096),
            time_bound: PolyBound::new(Rational::from_integer(64), Rational::from_integer(1)),
            keys_constant: Rational::from_integer(64),
            round_bound: PolyBound::new(Rational::from_integer(4), Rational::from_integer(0)),
            enforcement: Enforcement::RecordOnly,
        },
        acceptance: Acceptance::AcceptState,
    }
}

/// One round in which every input position fans out to n distinct keys —
/// a key-budget violation on any input of 64 bytes or more, built for
/// demonstrating `--limits enforce` (and exit code 2).
fn key_flood_program() -> MrcProgram {
    let mapper = Arc::new(
        |pair: &KeyValuePair,
         info: RoundInfo,
         _scratch: &mut ScratchMeter|
         -> Result<Vec<KeyValuePair>, String> {
            if pair.key.as_slice() == b"0" {
                return Ok(Vec::new());
            }
            let position = String::from_utf8_lossy(&pair.key).into_owned();
            Ok((0..info.n)
                .map(|k| KeyValuePair::new(format!("f{position}.{k}"), ""))
                .collect())
        },
    );
    let reducer = Arc::new(
        |_key: &[u8],
         _values: &[Vec<u8>],
         _info: RoundInfo,
         _scratch: &mut ScratchMeter|
         -> Result<ReducerOutput, String> { Ok(ReducerOutput::empty()) },
    );
    MrcProgram {
        rounds: 1,
        behavior: RoundBehavior::BuiltIn {
            name: "key-flood".into(),
            mapper,
            reducer,
        },
        limits: ResourceLimits::default(),
        acceptance: Acceptance::EmptyFinalRound,
    }
}
