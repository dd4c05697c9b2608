//! The four commands: `run`, `compile`, `verify`, `wordcount`.
//!
//! Exit codes are part of the contract: 0 accept, 1 reject (or, for
//! `verify`, a disagreement), 2 resource violation under enforcement,
//! 3 anything wrong with the spec, input, or invocation, 4 a machine
//! behaviour contract failure inside an engine.

use std::io::{Read, Write};
use std::path::Path;
use std::time::Instant;

use automata::{run_tisp, run_tm, TispOutcome, TmOutcome};
use bsp_core::{mrc_to_bsp, run_bsp};
use mrc_core::{run, InputEncoding, RunOptions, Schedule, Verdict, Violation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::CliError;
use crate::pipeline::{
    apply_limits_flag, base_decider, build_bsp, build_program, bsp_input_mode, encode_input,
    input_mode, InputMode,
};
use crate::regexdfa::regex_to_dfa;
use crate::reportdoc::ReportDocument;
use crate::schema::{
    parse_spec, spec_to_json, BspDoc, DfaDoc, MachineDoc, PipelineDoc, SpecDoc,
};

/// Reads a file, or standard input when the path is `-`.
fn read_bytes(path: &Path) -> Result<Vec<u8>, CliError> {
    if path.as_os_str() == "-" {
        let mut bytes = Vec::new();
        std::io::stdin()
            .read_to_end(&mut bytes)
            .map_err(|e| CliError::invalid(format!("reading standard input: {e}")))?;
        return Ok(bytes);
    }
    std::fs::read(path)
        .map_err(|e| CliError::invalid(format!("reading {}: {e}", path.display())))
}

fn read_text(path: &Path) -> Result<String, CliError> {
    String::from_utf8(read_bytes(path)?)
        .map_err(|_| CliError::invalid(format!("{} is not valid UTF-8", path.display())))
}

/// Drops one trailing newline (LF or CRLF) so `echo`-made files carry the
/// intended bytes.
fn strip_newline(mut bytes: Vec<u8>) -> Vec<u8> {
    if bytes.last() == Some(&b'\n') {
        bytes.pop();
        if bytes.last() == Some(&b'\r') {
            bytes.pop();
        }
    }
    bytes
}

/// The kebab-case wire name of a serializable enum value.
fn kebab<T: serde::Serialize>(value: &T) -> String {
    match serde_json::to_value(value) {
        Ok(serde_json::Value::String(s)) => s,
        _ => "?".to_string(),
    }
}

fn exit_code_for(verdict: Verdict) -> i32 {
    match verdict {
        Verdict::Accept => 0,
        Verdict::Reject => 1,
        Verdict::ResourceViolation => 2,
    }
}

fn describe_violation(v: &Violation) -> String {
    format!(
        "first violation: {} at round {} (measured {}, allowed {})",
        kebab(&v.bound),
        v.round,
        v.measured,
        v.allowed
    )
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

pub fn cmd_run(
    spec_path: &Path,
    input_path: &Path,
    limits_flag: Option<&str>,
    report_path: Option<&Path>,
    seed: Option<u64>,
) -> Result<i32, CliError> {
    let spec_bytes = read_bytes(spec_path)?;
    let spec_text = String::from_utf8(spec_bytes.clone())
        .map_err(|_| CliError::invalid(format!("{} is not valid UTF-8", spec_path.display())))?;
    let doc = parse_spec(&spec_text)?;
    let input = strip_newline(read_bytes(input_path)?);

    let started = Instant::now();
    let mut report = match &doc.machine {
        MachineDoc::Dfa(dfa_doc) => {
            if limits_flag.is_some() || seed.is_some() {
                return Err(CliError::invalid(
                    "--limits and --seed only apply to round and barrier engines",
                ));
            }
            let dfa = dfa_doc.to_machine()?;
            let accepted = dfa.accepts(&input)?;
            let verdict = if accepted { Verdict::Accept } else { Verdict::Reject };
            let mut report = ReportDocument::new("dfa", &spec_bytes, &input, verdict);
            report.steps = Some(input.len() as u64);
            report
        }
        MachineDoc::Tm(tm_doc) => {
            if limits_flag.is_some() || seed.is_some() {
                return Err(CliError::invalid(
                    "--limits and --seed only apply to round and barrier engines",
                ));
            }
            let tm = tm_doc.to_machine()?;
            let outcome = run_tm(&tm, &input)?;
            let verdict = match outcome.outcome {
                TmOutcome::Accept => Verdict::Accept,
                TmOutcome::Reject | TmOutcome::Diverged => Verdict::Reject,
            };
            let mut report = ReportDocument::new("tm", &spec_bytes, &input, verdict);
            if outcome.outcome == TmOutcome::Diverged {
                report.outcome = Some("diverged".to_string());
            }
            report.steps = Some(outcome.steps);
            report
        }
        MachineDoc::Tisp(tisp_doc) => {
            if limits_flag.is_some() || seed.is_some() {
                return Err(CliError::invalid(
                    "--limits and --seed only apply to round and barrier engines",
                ));
            }
            let machine = tisp_doc.to_machine()?;
            let outcome = run_tisp(&machine, &input, tisp_doc.time_budget, tisp_doc.space_budget)?;
            let verdict = match outcome.outcome {
                TispOutcome::Accept => Verdict::Accept,
                _ => Verdict::Reject,
            };
            let mut report = ReportDocument::new("tisp", &spec_bytes, &input, verdict);
            report.outcome = match outcome.outcome {
                TispOutcome::TimeExceeded => Some("time-exceeded".to_string()),
                TispOutcome::SpaceExceeded => Some("space-exceeded".to_string()),
                _ => None,
            };
            report.steps = Some(outcome.steps);
            report.cells_used = Some(outcome.cells_used);
            report
        }
        MachineDoc::MrcPipeline(pipeline) => {
            let mode = input_mode(pipeline)?;
            let encoded = encode_input(&mode, &input)?;
            let mut program = build_program(pipeline, encoded.n())?;
            if let Some(flag) = limits_flag {
                apply_limits_flag(&mut program.limits, flag)?;
            }
            let options = RunOptions {
                schedule: match seed {
                    Some(seed) => Schedule::Permuted { seed },
                    None => Schedule::InOrder,
                },
                capture_trace: false,
            };
            let outcome = run(&program, &encoded, &options)?;
            let mut report = ReportDocument::new("rounds", &spec_bytes, &input, outcome.verdict);
            report.limits = Some(program.limits);
            report.resources = Some(outcome.report);
            report
        }
        MachineDoc::Bsp(bsp_doc) => {
            let mode = bsp_input_mode(bsp_doc)?;
            encode_input(&mode, &input)?; // alphabet check; the engine takes raw bytes
            let mut machine = build_bsp(bsp_doc, input.len())?;
            if let Some(flag) = limits_flag {
                apply_limits_flag(&mut machine.limits, flag)?;
            }
            let options = RunOptions {
                schedule: match seed {
                    Some(seed) => Schedule::Permuted { seed },
                    None => Schedule::InOrder,
                },
                capture_trace: false,
            };
            let outcome = run_bsp(&machine, &input, &options)?;
            let mut report = ReportDocument::new("barrier", &spec_bytes, &input, outcome.verdict);
            report.limits = Some(machine.limits);
            report.resources = Some(outcome.report);
            report
        }
    };
    report.wall_clock_micros = started.elapsed().as_micros();

    if let Some(path) = report_path {
        std::fs::write(path, report.to_json()?)
            .map_err(|e| CliError::invalid(format!("writing {}: {e}", path.display())))?;
    }
    println!("{}", kebab(&report.verdict));
    if let Some(outcome) = &report.outcome {
        println!("engine outcome: {outcome}");
    }
    if let Some(resources) = &report.resources {
        if let Some(v) = resources.violations.first() {
            println!("{}", describe_violation(v));
        }
    }
    Ok(exit_code_for(report.verdict))
}

// ---------------------------------------------------------------------------
// compile
// ---------------------------------------------------------------------------

fn require_flag<'a, T>(flag: &'a Option<T>, kind: &str, name: &str) -> Result<&'a T, CliError> {
    flag.as_ref()
        .ok_or_else(|| CliError::invalid(format!("compile {kind} needs --{name}")))
}

fn spec_of_kind(path: &Path, kind: &str) -> Result<MachineDoc, CliError> {
    let doc = parse_spec(&read_text(path)?)?;
    if doc.machine.kind() != kind {
        return Err(CliError::invalid(format!(
            "{} holds a {:?} spec, but this translation starts from {kind:?}",
            path.display(),
            doc.machine.kind()
        )));
    }
    Ok(doc.machine)
}

/// Checks a pipeline document without fixing an input length: machine
/// documents must build and n-independent compilation must succeed.
fn light_validate_pipeline(doc: &PipelineDoc) -> Result<(), CliError> {
    match doc.builtin.as_str() {
        "dfa2mrc" | "tm2mrc" | "tisp2mrc" | "pad-decider" | "wordcount" | "key-flood"
        | "unary-table" => {
            // These builtins compile the same way at every n; n = 1 touches
            // no n-dependent feasibility check.
            if doc.builtin == "tisp2mrc" {
                let spec = doc
                    .tisp
                    .as_ref()
                    .ok_or_else(|| CliError::invalid("builtin \"tisp2mrc\" needs the \"tisp\" parameter"))?;
                translators::compile_tisp_to_mrc(
                    &spec.to_machine()?,
                    spec.time_budget,
                    spec.space_budget,
                )?;
                Ok(())
            } else if doc.builtin == "pad-decider" {
                let base = doc
                    .base
                    .as_deref()
                    .ok_or_else(|| CliError::invalid("builtin \"pad-decider\" needs the \"base\" parameter"))?;
                base_decider(base).map(|_| ())
            } else if doc.builtin == "unary-table" {
                doc.table
                    .as_ref()
                    .map(|_| ())
                    .ok_or_else(|| CliError::invalid("builtin \"unary-table\" needs the \"table\" parameter"))
            } else if doc.builtin == "tm2mrc" {
                // Compile without the collector feasibility check, which
                // depends on the input length.
                let tm = doc
                    .tm
                    .as_ref()
                    .ok_or_else(|| CliError::invalid("builtin \"tm2mrc\" needs the \"tm\" parameter"))?
                    .to_machine()?;
                let epsilon = doc
                    .epsilon
                    .as_deref()
                    .unwrap_or("1/2")
                    .parse::<mrc_core::Rational>()?;
                translators::compile_sublog_tm_to_mrc(&tm, epsilon)?;
                Ok(())
            } else if doc.builtin == "dfa2mrc" {
                build_program(doc, 0).map(|_| ())
            } else {
                Ok(())
            }
        }
        "from-barrier" => {
            let bsp = doc
                .bsp
                .as_ref()
                .ok_or_else(|| CliError::invalid("builtin \"from-barrier\" needs the \"bsp\" parameter"))?;
            light_validate_bsp(bsp)
        }
        other => Err(CliError::invalid(format!("unknown builtin {other:?}"))),
    }
}

fn light_validate_bsp(doc: &BspDoc) -> Result<(), CliError> {
    if doc.builtin != "from-rounds" {
        return Err(CliError::invalid(format!(
            "unknown barrier builtin {:?} (expected from-rounds)",
            doc.builtin
        )));
    }
    if doc.p == 0 {
        return Err(CliError::invalid("a barrier machine needs at least one processor"));
    }
    bsp_input_mode(doc)?; // also rejects token-input pipelines
    let inner = doc
        .pipeline
        .as_ref()
        .ok_or_else(|| CliError::invalid("builtin \"from-rounds\" needs the \"pipeline\" parameter"))?;
    light_validate_pipeline(inner)
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_compile(
    kind: &str,
    spec_path: Option<&Path>,
    epsilon: Option<&str>,
    p: Option<usize>,
    base: Option<&str>,
    check_n: Option<usize>,
    out: &Path,
) -> Result<(), CliError> {
    let out_doc = match kind {
        "dfa2mrc" => {
            let path = require_flag(&spec_path, kind, "spec")?;
            let text = read_text(path)?;
            let dfa_doc = if text.trim_start().starts_with('{') {
                match spec_of_kind(path, "dfa")? {
                    MachineDoc::Dfa(d) => d,
                    _ => unreachable!("spec_of_kind checked the kind"),
                }
            } else {
                DfaDoc::from_machine(&regex_to_dfa(&text)?)
            };
            let mut pipeline = PipelineDoc::named("dfa2mrc");
            pipeline.dfa = Some(dfa_doc);
            pipeline.epsilon = epsilon.map(str::to_string);
            SpecDoc { machine: MachineDoc::MrcPipeline(pipeline) }
        }
        "tm2mrc" => {
            let path = require_flag(&spec_path, kind, "spec")?;
            let MachineDoc::Tm(tm_doc) = spec_of_kind(path, "tm")? else {
                unreachable!("spec_of_kind checked the kind")
            };
            let mut pipeline = PipelineDoc::named("tm2mrc");
            pipeline.tm = Some(tm_doc);
            pipeline.epsilon = epsilon.map(str::to_string);
            SpecDoc { machine: MachineDoc::MrcPipeline(pipeline) }
        }
        "tisp2mrc" => {
            let path = require_flag(&spec_path, kind, "spec")?;
            let MachineDoc::Tisp(tisp_doc) = spec_of_kind(path, "tisp")? else {
                unreachable!("spec_of_kind checked the kind")
            };
            let mut pipeline = PipelineDoc::named("tisp2mrc");
            pipeline.tisp = Some(tisp_doc);
            SpecDoc { machine: MachineDoc::MrcPipeline(pipeline) }
        }
        "pad-decider" => {
            let base = require_flag(&base, kind, "base")?;
            let mut pipeline = PipelineDoc::named("pad-decider");
            pipeline.base = Some((*base).to_string());
            SpecDoc { machine: MachineDoc::MrcPipeline(pipeline) }
        }
        "mrc2bsp" => {
            let path = require_flag(&spec_path, kind, "spec")?;
            let p = *require_flag(&p, kind, "p")?;
            let MachineDoc::MrcPipeline(pipeline) = spec_of_kind(path, "mrc-pipeline")? else {
                unreachable!("spec_of_kind checked the kind")
            };
            SpecDoc {
                machine: MachineDoc::Bsp(BspDoc {
                    p,
                    builtin: "from-rounds".to_string(),
                    pipeline: Some(Box::new(pipeline)),
                }),
            }
        }
        "bsp2mrc" => {
            let path = require_flag(&spec_path, kind, "spec")?;
            let MachineDoc::Bsp(bsp_doc) = spec_of_kind(path, "bsp")? else {
                unreachable!("spec_of_kind checked the kind")
            };
            let mut pipeline = PipelineDoc::named("from-barrier");
            pipeline.bsp = Some(Box::new(bsp_doc));
            SpecDoc { machine: MachineDoc::MrcPipeline(pipeline) }
        }
        other => {
            return Err(CliError::invalid(format!(
                "unknown translation {other:?} (expected dfa2mrc, tm2mrc, tisp2mrc, \
                 pad-decider, mrc2bsp, or bsp2mrc)"
            )))
        }
    };

    // Validate the product before writing it.
    match &out_doc.machine {
        MachineDoc::MrcPipeline(pipeline) => match check_n {
            Some(n) => build_program(pipeline, n).map(|_| ())?,
            None => light_validate_pipeline(pipeline)?,
        },
        MachineDoc::Bsp(bsp) => match check_n {
            Some(n) => build_bsp(bsp, n).map(|_| ())?,
            None => light_validate_bsp(bsp)?,
        },
        _ => {}
    }

    let json = spec_to_json(&out_doc)?;
    if out.as_os_str() == "-" {
        print!("{json}");
    } else {
        std::fs::write(out, json)
            .map_err(|e| CliError::invalid(format!("writing {}: {e}", out.display())))?;
        println!("wrote {} spec to {}", out_doc.machine.kind(), out.display());
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct Disagreement {
    trial: u64,
    input: Vec<u8>,
    oracle_says: String,
    artifact_says: String,
}

fn report_disagreement(d: &Disagreement, spec_path: &Path, oracle: &str) -> i32 {
    println!(
        "disagreement at trial {}: input {:?} ({} bytes)",
        d.trial,
        String::from_utf8_lossy(&d.input),
        d.input.len()
    );
    println!("  oracle ({oracle}): {}", d.oracle_says);
    println!("  artifact: {}", d.artifact_says);
    println!(
        "repro: printf '%s' {:?} > cx.in && mrcsim run {} cx.in",
        String::from_utf8_lossy(&d.input),
        spec_path.display()
    );
    1
}

fn random_symbols(rng: &mut ChaCha8Rng, alphabet: &[u8], len: usize) -> Vec<u8> {
    if alphabet.is_empty() {
        return Vec::new();
    }
    (0..len)
        .map(|_| alphabet[rng.gen_range(0..alphabet.len())])
        .collect()
}

fn random_input_for(mode: &InputMode, rng: &mut ChaCha8Rng, max_n: usize) -> Vec<u8> {
    match mode {
        InputMode::Symbols { allowed } => {
            let alphabet: &[u8] = allowed.as_deref().unwrap_or(b"01");
            let len = rng.gen_range(0..=max_n);
            random_symbols(rng, alphabet, len)
        }
        InputMode::Tokens => {
            let words = rng.gen_range(0..=max_n / 4);
            let mut out = Vec::new();
            for i in 0..words {
                if i > 0 {
                    out.push(b' ');
                }
                let len = rng.gen_range(1..=6);
                out.extend((0..len).map(|_| rng.gen_range(b'a'..=b'z')));
            }
            out
        }
    }
}

fn verdict_word(verdict: Verdict) -> &'static str {
    match verdict {
        Verdict::Accept => "accept",
        Verdict::Reject => "reject",
        Verdict::ResourceViolation => "resource-violation",
    }
}

fn agrees(expected: bool, got: Verdict) -> bool {
    matches!(
        (expected, got),
        (true, Verdict::Accept) | (false, Verdict::Reject)
    )
}

/// Rotates the first rule's target state to the next declared state —
/// a small, spec-valid perturbation used to prove the harness can detect a
/// wrong artifact.
fn inject_fault(machine: &mut MachineDoc) -> Result<(), CliError> {
    fn next_state(states: &[String], current: &str) -> Result<String, CliError> {
        if states.len() < 2 {
            return Err(CliError::invalid(
                "fault injection needs at least two states to perturb a rule target",
            ));
        }
        let at = states
            .iter()
            .position(|s| s == current)
            .ok_or_else(|| CliError::invalid(format!("undeclared state {current:?}")))?;
        Ok(states[(at + 1) % states.len()].clone())
    }
    match machine {
        MachineDoc::Dfa(doc) => {
            let rule = doc
                .rules
                .first_mut()
                .ok_or_else(|| CliError::invalid("the spec has no rules to perturb"))?;
            rule.to = next_state(&doc.states, &rule.to)?;
        }
        MachineDoc::Tm(doc) => {
            let rule = doc
                .rules
                .first_mut()
                .ok_or_else(|| CliError::invalid("the spec has no rules to perturb"))?;
            rule.next = next_state(&doc.states, &rule.next)?;
        }
        MachineDoc::Tisp(doc) => {
            let rule = doc
                .rules
                .first_mut()
                .ok_or_else(|| CliError::invalid("the spec has no rules to perturb"))?;
            rule.next = next_state(&doc.states, &rule.next)?;
        }
        _ => {
            return Err(CliError::invalid(
                "--inject-fault needs a machine spec (dfa, tm, or tisp)",
            ))
        }
    }
    Ok(())
}

pub fn cmd_verify(
    spec_path: &Path,
    oracle: &str,
    trials: u64,
    max_n: usize,
    seed: u64,
    fault: bool,
) -> Result<i32, CliError> {
    let doc = parse_spec(&read_text(spec_path)?)?;
    if trials == 0 {
        eprintln!("warning: 0 trials verify nothing");
        println!("verified {oracle}: 0 trials, no disagreement possible");
        return Ok(0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let disagreement: Option<Disagreement> = match oracle {
        "dfa" => {
            let MachineDoc::Dfa(dfa_doc) = &doc.machine else {
                return Err(CliError::invalid("oracle \"dfa\" needs a dfa spec"));
            };
            let pristine = dfa_doc.to_machine()?;
            let mut artifact = doc.machine.clone();
            if fault {
                inject_fault(&mut artifact)?;
            }
            let MachineDoc::Dfa(artifact_doc) = artifact else { unreachable!() };
            let mut pipeline = PipelineDoc::named("dfa2mrc");
            pipeline.dfa = Some(artifact_doc);
            let mut found = None;
            for trial in 0..trials {
                let len = rng.gen_range(0..=max_n);
                let input = random_symbols(&mut rng, pristine.alphabet(), len);
                let expected = pristine.accepts(&input)?;
                let encoded = InputEncoding::from_symbols(&input);
                let program = build_program(&pipeline, encoded.n())?;
                let got = run(&program, &encoded, &RunOptions::default())?.verdict;
                if !agrees(expected, got) {
                    found = Some(Disagreement {
                        trial,
                        input,
                        oracle_says: (if expected { "accept" } else { "reject" }).into(),
                        artifact_says: format!("compiled round program says {}", verdict_word(got)),
                    });
                    break;
                }
            }
            found
        }
        "tm" => {
            let MachineDoc::Tm(tm_doc) = &doc.machine else {
                return Err(CliError::invalid("oracle \"tm\" needs a tm spec"));
            };
            let pristine = tm_doc.to_machine()?;
            let mut artifact = doc.machine.clone();
            if fault {
                inject_fault(&mut artifact)?;
            }
            let MachineDoc::Tm(artifact_doc) = artifact else { unreachable!() };
            let mut pipeline = PipelineDoc::named("tm2mrc");
            pipeline.tm = Some(artifact_doc);
            let mut found = None;
            for trial in 0..trials {
                let len = rng.gen_range(0..=max_n);
                let input = random_symbols(&mut rng, pristine.input_alphabet(), len);
                let outcome = run_tm(&pristine, &input)?;
                let expected = outcome.outcome == TmOutcome::Accept;
                let encoded = InputEncoding::from_symbols(&input);
                let program = build_program(&pipeline, encoded.n())?;
                let got = run(&program, &encoded, &RunOptions::default())?.verdict;
                if !agrees(expected, got) {
                    found = Some(Disagreement {
                        trial,
                        input,
                        oracle_says: format!("raw machine outcome {:?}", outcome.outcome),
                        artifact_says: format!("compiled round program says {}", verdict_word(got)),
                    });
                    break;
                }
            }
            found
        }
        "tisp" => {
            let MachineDoc::Tisp(tisp_doc) = &doc.machine else {
                return Err(CliError::invalid("oracle \"tisp\" needs a tisp spec"));
            };
            let pristine = tisp_doc.to_machine()?;
            let mut artifact = doc.machine.clone();
            if fault {
                inject_fault(&mut artifact)?;
            }
            let MachineDoc::Tisp(artifact_doc) = artifact else { unreachable!() };
            let space = tisp_doc.space_budget;
            let time = tisp_doc.time_budget;
            let mut pipeline = PipelineDoc::named("tisp2mrc");
            pipeline.tisp = Some(artifact_doc);
            // Lengths must satisfy both the tape budget (n ≤ space) and the
            // segment-plan feasibility bound (space ≤ 64·max(n,1)).
            let hi = max_n.min(space);
            let lo = if space <= 64 { 0 } else { space.div_ceil(64) };
            if lo > hi {
                return Err(CliError::invalid(format!(
                    "budgets admit no testable input length (need {lo} ≤ n ≤ {hi})"
                )));
            }
            let mut found = None;
            for trial in 0..trials {
                let len = rng.gen_range(lo..=hi);
                let input = random_symbols(&mut rng, pristine.alphabet(), len);
                let outcome = run_tisp(&pristine, &input, time, space)?;
                let expected = outcome.outcome == TispOutcome::Accept;
                let encoded = InputEncoding::from_symbols(&input);
                let program = build_program(&pipeline, encoded.n())?;
                let got = run(&program, &encoded, &RunOptions::default())?.verdict;
                if !agrees(expected, got) {
                    found = Some(Disagreement {
                        trial,
                        input,
                        oracle_says: format!("raw machine outcome {:?}", outcome.outcome),
                        artifact_says: format!("compiled round program says {}", verdict_word(got)),
                    });
                    break;
                }
            }
            found
        }
        "mrc-engine" => {
            let MachineDoc::MrcPipeline(pipeline) = &doc.machine else {
                return Err(CliError::invalid("oracle \"mrc-engine\" needs an mrc-pipeline spec"));
            };
            if fault {
                return Err(CliError::invalid(
                    "--inject-fault needs a machine spec (dfa, tm, or tisp)",
                ));
            }
            let mode = input_mode(pipeline)?;
            let mut found = None;
            for trial in 0..trials {
                let input = random_input_for(&mode, &mut rng, max_n);
                let encoded = encode_input(&mode, &input)?;
                let program = build_program(pipeline, encoded.n())?;
                let in_order = run(&program, &encoded, &RunOptions::default());
                let shuffle_seed: u64 = rng.gen();
                let permuted = run(
                    &program,
                    &encoded,
                    &RunOptions {
                        schedule: Schedule::Permuted { seed: shuffle_seed },
                        capture_trace: false,
                    },
                );
                let mismatch = match (&in_order, &permuted) {
                    (Ok(a), Ok(b)) => {
                        if a.verdict != b.verdict {
                            Some((verdict_word(a.verdict).into(), format!(
                                "permuted schedule (seed {shuffle_seed}) says {}",
                                verdict_word(b.verdict)
                            )))
                        } else if a.final_pairs != b.final_pairs {
                            Some(("final pairs as in-order".into(),
                                format!("permuted schedule (seed {shuffle_seed}) emits different final pairs")))
                        } else {
                            let ja = serde_json::to_string(&a.report).ok();
                            let jb = serde_json::to_string(&b.report).ok();
                            (ja != jb).then(|| ("resource report as in-order".into(),
                                format!("permuted schedule (seed {shuffle_seed}) meters a different report")))
                        }
                    }
                    (Err(a), Err(b)) if a.to_string() == b.to_string() => None,
                    (a, b) => Some((
                        format!("in-order run: {}", summarize(a)),
                        format!("permuted run (seed {shuffle_seed}): {}", summarize(b)),
                    )),
                };
                if let Some((oracle_says, artifact_says)) = mismatch {
                    found = Some(Disagreement { trial, input, oracle_says, artifact_says });
                    break;
                }
            }
            found
        }
        "bsp-engine" => {
            let MachineDoc::MrcPipeline(pipeline) = &doc.machine else {
                return Err(CliError::invalid("oracle \"bsp-engine\" needs an mrc-pipeline spec"));
            };
            if fault {
                return Err(CliError::invalid(
                    "--inject-fault needs a machine spec (dfa, tm, or tisp)",
                ));
            }
            let mode = input_mode(pipeline)?;
            if mode == InputMode::Tokens {
                return Err(CliError::invalid(
                    "the barrier engine delivers byte pieces; token-input pipelines cannot cross it",
                ));
            }
            let mut found = None;
            for trial in 0..trials {
                let input = random_input_for(&mode, &mut rng, max_n);
                let encoded = encode_input(&mode, &input)?;
                let program = build_program(pipeline, encoded.n())?;
                let direct = run(&program, &encoded, &RunOptions::default())?;
                let machine = mrc_to_bsp(&program, 4)?;
                let barrier = run_bsp(&machine, &input, &RunOptions::default())?;
                if direct.verdict != barrier.verdict {
                    found = Some(Disagreement {
                        trial,
                        input,
                        oracle_says: format!("round engine says {}", verdict_word(direct.verdict)),
                        artifact_says: format!(
                            "barrier twin (p = 4) says {}",
                            verdict_word(barrier.verdict)
                        ),
                    });
                    break;
                }
            }
            found
        }
        other => {
            return Err(CliError::invalid(format!(
                "unknown oracle {other:?} (expected dfa, tm, tisp, mrc-engine, or bsp-engine)"
            )))
        }
    };

    match disagreement {
        Some(d) => Ok(report_disagreement(&d, spec_path, oracle)),
        None => {
            println!(
                "verified against {oracle} oracle: {trials} trials up to length {max_n} \
                 (seed {seed}), no disagreement"
            );
            Ok(0)
        }
    }
}

fn summarize<T>(result: &Result<T, mrc_core::MrcError>) -> String {
    match result {
        Ok(_) => "completed".to_string(),
        Err(e) => format!("failed with {e}"),
    }
}

// ---------------------------------------------------------------------------
// wordcount
// ---------------------------------------------------------------------------

pub fn cmd_wordcount(input_path: &Path) -> Result<(), CliError> {
    let bytes = read_bytes(input_path)?;
    let encoded = encode_input(&InputMode::Tokens, &bytes)?;
    let program = build_program(&PipelineDoc::named("wordcount"), encoded.n())?;
    let outcome = run(&program, &encoded, &RunOptions::default())?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for pair in &outcome.final_pairs {
        out.write_all(&pair.key)
            .and_then(|_| out.write_all(b"\t"))
            .and_then(|_| out.write_all(&pair.value))
            .and_then(|_| out.write_all(b"\n"))
            .map_err(|e| CliError::internal(format!("writing output: {e}")))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trailing_newlines_are_stripped_once() {
        assert_eq!(strip_newline(b"01\n".to_vec()), b"01".to_vec());
        assert_eq!(strip_newline(b"01\r\n".to_vec()), b"01".to_vec());
        assert_eq!(strip_newline(b"01\n\n".to_vec()), b"01\n".to_vec());
        assert_eq!(strip_newline(b"01".to_vec()), b"01".to_vec());
        assert_eq!(strip_newline(Vec::new()), Vec::<u8>::new());
    }

    #[test]
    fn enum_wire_names_are_kebab_case() {
        assert_eq!(kebab(&Verdict::ResourceViolation), "resource-violation");
        assert_eq!(kebab(&mrc_core::BoundKind::KeysPerInvocation), "keys-per-invocation");
    }

    #[test]
    fn fault_injection_rotates_a_rule_target() {
        let mut machine = MachineDoc::Dfa(crate::schema::DfaDoc {
            states: vec!["a".into(), "b".into()],
            alphabet: "0".into(),
            start: "a".into(),
            accepting: vec!["a".into()],
            rules: vec![
                crate::schema::DfaRule { from: "a".into(), on: "0".into(), to: "b".into() },
                crate::schema::DfaRule { from: "b".into(), on: "0".into(), to: "a".into() },
            ],
        });
        inject_fault(&mut machine).unwrap();
        let MachineDoc::Dfa(doc) = &machine else { unreachable!() };
        assert_eq!(doc.rules[0].to, "a");
        assert!(doc.to_machine().is_ok(), "the perturbed spec must stay valid");
    }
}
