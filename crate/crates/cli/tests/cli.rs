//! End-to-end tests of the `mrcsim` binary: exit codes, report files,
//! translations, and the verification harness, all through the real
//! command-line surface.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mrcsim"))
}

fn run_bin(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn write_file(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).expect("write test file");
    path
}

const PARITY_DFA: &str = r#"{"schema":"mrcsim/1","kind":"dfa","machine":{
  "states":["even","odd"],"alphabet":"01","start":"even","accepting":["even"],
  "rules":[{"from":"even","on":"0","to":"even"},{"from":"even","on":"1","to":"odd"},
           {"from":"odd","on":"0","to":"odd"},{"from":"odd","on":"1","to":"even"}]}}"#;

/// A spec path and input path for the parity DFA compiled to a round
/// program.
fn compiled_parity(dir: &Path) -> PathBuf {
    let dfa = write_file(dir, "parity.json", PARITY_DFA);
    let out = dir.join("parity-rounds.json");
    let compile = run_bin(&[
        "compile",
        "dfa2mrc",
        "--spec",
        dfa.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&compile), 0, "stderr: {}", stderr(&compile));
    out
}

#[test]
fn raw_dfa_specs_run_with_verdict_exit_codes() {
    let dir = TempDir::new().unwrap();
    let spec = write_file(dir.path(), "parity.json", PARITY_DFA);
    let even = write_file(dir.path(), "even.txt", "0110\n");
    let odd = write_file(dir.path(), "odd.txt", "0111");

    let accept = run_bin(&["run", spec.to_str().unwrap(), even.to_str().unwrap()]);
    assert_eq!(code(&accept), 0, "stderr: {}", stderr(&accept));
    assert!(stdout(&accept).contains("accept"), "{}", stdout(&accept));

    let reject = run_bin(&["run", spec.to_str().unwrap(), odd.to_str().unwrap()]);
    assert_eq!(code(&reject), 1);
    assert!(stdout(&reject).contains("reject"));
}

#[test]
fn compiled_regexes_accept_and_reject_through_the_round_engine() {
    let dir = TempDir::new().unwrap();
    let regex = write_file(dir.path(), "ends-in-zero.rx", "(0|1)*0");
    let spec = dir.path().join("rx.json");
    let compile = run_bin(&[
        "compile",
        "dfa2mrc",
        "--spec",
        regex.to_str().unwrap(),
        "--out",
        spec.to_str().unwrap(),
    ]);
    assert_eq!(code(&compile), 0, "stderr: {}", stderr(&compile));

    let yes = write_file(dir.path(), "yes.txt", "10110\n");
    let no = write_file(dir.path(), "no.txt", "10101");
    assert_eq!(code(&run_bin(&["run", spec.to_str().unwrap(), yes.to_str().unwrap()])), 0);
    assert_eq!(code(&run_bin(&["run", spec.to_str().unwrap(), no.to_str().unwrap()])), 1);
}

#[test]
fn round_reports_carry_engine_rounds_and_digests() {
    let dir = TempDir::new().unwrap();
    let spec = compiled_parity(dir.path());
    let input = write_file(dir.path(), "in.txt", "0110");
    let report = dir.path().join("report.json");

    let output = run_bin(&[
        "run",
        spec.to_str().unwrap(),
        input.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&output), 0, "stderr: {}", stderr(&output));

    let text = std::fs::read_to_string(&report).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["schema"], "mrcsim/1");
    assert_eq!(doc["engine"], "rounds");
    assert_eq!(doc["verdict"], "accept");
    assert_eq!(doc["resources"]["rounds_executed"], 2);
    assert_eq!(doc["spec_digest"].as_str().unwrap().len(), 64);
    assert_eq!(doc["input_digest"].as_str().unwrap().len(), 64);
    assert!(doc["limits"]["space_exponent"].is_string());
}

#[test]
fn reports_are_reproducible_except_for_the_wall_clock() {
    let dir = TempDir::new().unwrap();
    let spec = compiled_parity(dir.path());
    let input = write_file(dir.path(), "in.txt", "01101001");
    let strip = |path: &Path| -> String {
        std::fs::read_to_string(path)
            .unwrap()
            .lines()
            .filter(|l| !l.contains("wall_clock_micros"))
            .collect::<Vec<_>>()
            .join("\n")
    };

    let r1 = dir.path().join("r1.json");
    let r2 = dir.path().join("r2.json");
    for report in [&r1, &r2] {
        let output = run_bin(&[
            "run",
            spec.to_str().unwrap(),
            input.to_str().unwrap(),
            "--report",
            report.to_str().unwrap(),
        ]);
        assert_eq!(code(&output), 0);
    }
    assert_eq!(strip(&r1), strip(&r2));

    // A permuted intra-round schedule must not change the report either.
    let r3 = dir.path().join("r3.json");
    let output = run_bin(&[
        "run",
        spec.to_str().unwrap(),
        input.to_str().unwrap(),
        "--seed",
        "31337",
        "--report",
        r3.to_str().unwrap(),
    ]);
    assert_eq!(code(&output), 0);
    assert_eq!(strip(&r1), strip(&r3));
}

#[test]
fn undeclared_states_exit_three_and_are_named() {
    let dir = TempDir::new().unwrap();
    let broken = PARITY_DFA.replace(r#"{"from":"odd","on":"1","to":"even"}"#,
        r#"{"from":"odd","on":"1","to":"ghost"}"#);
    let spec = write_file(dir.path(), "broken.json", &broken);
    let input = write_file(dir.path(), "in.txt", "01");
    let output = run_bin(&["run", spec.to_str().unwrap(), input.to_str().unwrap()]);
    assert_eq!(code(&output), 3);
    assert!(stderr(&output).contains("ghost"), "{}", stderr(&output));
}

#[test]
fn malformed_documents_and_usage_errors_exit_three() {
    let dir = TempDir::new().unwrap();
    let spec = write_file(dir.path(), "bad.json", "{ this is not json");
    let input = write_file(dir.path(), "in.txt", "01");
    assert_eq!(code(&run_bin(&["run", spec.to_str().unwrap(), input.to_str().unwrap()])), 3);

    // Unknown subcommand and missing arguments are usage errors.
    assert_eq!(code(&run_bin(&["frobnicate"])), 3);
    assert_eq!(code(&run_bin(&["run"])), 3);
    // Help and version are successes.
    assert_eq!(code(&run_bin(&["--help"])), 0);
    assert_eq!(code(&run_bin(&["--version"])), 0);
}

#[test]
fn enforcement_exits_two_and_names_the_bound() {
    let dir = TempDir::new().unwrap();
    let spec = write_file(
        dir.path(),
        "flood.json",
        r#"{"schema":"mrcsim/1","kind":"mrc-pipeline","machine":{"builtin":"key-flood"}}"#,
    );
    let input = write_file(dir.path(), "in.txt", &"1".repeat(64));
    let output = run_bin(&[
        "run",
        spec.to_str().unwrap(),
        input.to_str().unwrap(),
        "--limits",
        "c=1/2,const=1,enforce",
    ]);
    assert_eq!(code(&output), 2, "stdout: {}", stdout(&output));
    let text = stdout(&output);
    assert!(text.contains("resource-violation"), "{text}");
    assert!(text.contains("keys-per-invocation"), "{text}");
    assert!(text.contains("round 1"), "{text}");

    // The same program under record-only limits completes and accepts.
    let recorded = run_bin(&["run", spec.to_str().unwrap(), input.to_str().unwrap()]);
    assert_eq!(code(&recorded), 0, "stdout: {}", stdout(&recorded));
}

#[test]
fn verify_passes_a_faithful_spec_and_catches_an_injected_fault() {
    let dir = TempDir::new().unwrap();
    let spec = write_file(dir.path(), "parity.json", PARITY_DFA);

    let clean = run_bin(&[
        "verify", spec.to_str().unwrap(),
        "--oracle", "dfa", "--trials", "40", "--max-n", "64",
    ]);
    assert_eq!(code(&clean), 0, "stdout: {}", stdout(&clean));
    assert!(stdout(&clean).contains("no disagreement"), "{}", stdout(&clean));

    let faulted = run_bin(&[
        "verify", spec.to_str().unwrap(),
        "--oracle", "dfa", "--trials", "40", "--max-n", "64", "--inject-fault",
    ]);
    assert_eq!(code(&faulted), 1, "stdout: {}", stdout(&faulted));
    let text = stdout(&faulted);
    assert!(text.contains("disagreement"), "{text}");
    assert!(text.contains("repro"), "{text}");
}

#[test]
fn verify_with_zero_trials_warns_and_exits_zero() {
    let dir = TempDir::new().unwrap();
    let spec = write_file(dir.path(), "parity.json", PARITY_DFA);
    let output = run_bin(&[
        "verify", spec.to_str().unwrap(), "--oracle", "dfa", "--trials", "0",
    ]);
    assert_eq!(code(&output), 0);
    assert!(stderr(&output).contains("verify nothing"), "{}", stderr(&output));
}

#[test]
fn verify_checks_schedule_determinism_and_the_barrier_twin() {
    let dir = TempDir::new().unwrap();
    let spec = compiled_parity(dir.path());

    let determinism = run_bin(&[
        "verify", spec.to_str().unwrap(),
        "--oracle", "mrc-engine", "--trials", "12", "--max-n", "48",
    ]);
    assert_eq!(code(&determinism), 0, "stdout: {}", stdout(&determinism));

    let barrier = run_bin(&[
        "verify", spec.to_str().unwrap(),
        "--oracle", "bsp-engine", "--trials", "8", "--max-n", "32",
    ]);
    assert_eq!(code(&barrier), 0, "stdout: {}", stdout(&barrier));
}

#[test]
fn wordcount_prints_sorted_tab_separated_counts() {
    let dir = TempDir::new().unwrap();
    let input = write_file(dir.path(), "words.txt", "the fox the\n");
    let output = run_bin(&["wordcount", input.to_str().unwrap()]);
    assert_eq!(code(&output), 0, "stderr: {}", stderr(&output));
    assert_eq!(stdout(&output), "fox\t1\nthe\t2\n");

    let empty = write_file(dir.path(), "empty.txt", "");
    let output = run_bin(&["wordcount", empty.to_str().unwrap()]);
    assert_eq!(code(&output), 0);
    assert_eq!(stdout(&output), "");
}

#[test]
fn wordcount_reads_standard_input_with_a_dash() {
    let mut child = bin()
        .args(["wordcount", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(b"b a b\nc a b\n")
        .unwrap();
    let output = child.wait_with_output().unwrap();
    assert_eq!(output.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&output.stdout), "a\t2\nb\t3\nc\t1\n");
}

#[test]
fn compilation_is_deterministic_and_round_trips_verdicts() {
    let dir = TempDir::new().unwrap();
    let dfa = write_file(dir.path(), "parity.json", PARITY_DFA);
    let out1 = dir.path().join("a.json");
    let out2 = dir.path().join("b.json");
    for out in [&out1, &out2] {
        let compile = run_bin(&[
            "compile", "dfa2mrc",
            "--spec", dfa.to_str().unwrap(),
            "--out", out.to_str().unwrap(),
        ]);
        assert_eq!(code(&compile), 0, "stderr: {}", stderr(&compile));
    }
    assert_eq!(std::fs::read(&out1).unwrap(), std::fs::read(&out2).unwrap());

    // rounds → barrier → rounds again; every layer must agree with the raw
    // machine on both an accepted and a rejected input.
    let bsp = dir.path().join("barrier.json");
    let compile = run_bin(&[
        "compile", "mrc2bsp",
        "--spec", out1.to_str().unwrap(),
        "--p", "3",
        "--out", bsp.to_str().unwrap(),
        "--check-n", "16",
    ]);
    assert_eq!(code(&compile), 0, "stderr: {}", stderr(&compile));
    let back = dir.path().join("back.json");
    let compile = run_bin(&[
        "compile", "bsp2mrc",
        "--spec", bsp.to_str().unwrap(),
        "--out", back.to_str().unwrap(),
    ]);
    assert_eq!(code(&compile), 0, "stderr: {}", stderr(&compile));

    let even = write_file(dir.path(), "even.txt", "1001");
    let odd = write_file(dir.path(), "odd.txt", "1011");
    for spec in [&dfa, &out1, &bsp, &back] {
        assert_eq!(
            code(&run_bin(&["run", spec.to_str().unwrap(), even.to_str().unwrap()])),
            0,
            "accepting input through {}",
            spec.display()
        );
        assert_eq!(
            code(&run_bin(&["run", spec.to_str().unwrap(), odd.to_str().unwrap()])),
            1,
            "rejecting input through {}",
            spec.display()
        );
    }
}

#[test]
fn barrier_runs_report_through_the_barrier_engine() {
    let dir = TempDir::new().unwrap();
    let rounds = compiled_parity(dir.path());
    let bsp = dir.path().join("barrier.json");
    let compile = run_bin(&[
        "compile", "mrc2bsp",
        "--spec", rounds.to_str().unwrap(),
        "--p", "4",
        "--out", bsp.to_str().unwrap(),
    ]);
    assert_eq!(code(&compile), 0, "stderr: {}", stderr(&compile));

    let input = write_file(dir.path(), "in.txt", "0110");
    let report = dir.path().join("report.json");
    let output = run_bin(&[
        "run", bsp.to_str().unwrap(), input.to_str().unwrap(),
        "--report", report.to_str().unwrap(),
    ]);
    assert_eq!(code(&output), 0, "stderr: {}", stderr(&output));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(doc["engine"], "barrier");
    // Two barrier steps per round: the parity program has 2 rounds.
    assert_eq!(doc["resources"]["rounds_executed"], 4);
}

#[test]
fn pad_decider_accepts_padded_palindromes_and_flags_malformed_inputs() {
    let dir = TempDir::new().unwrap();
    let spec = dir.path().join("pal.json");
    let compile = run_bin(&[
        "compile", "pad-decider", "--base", "palindrome",
        "--out", spec.to_str().unwrap(),
    ]);
    assert_eq!(code(&compile), 0, "stderr: {}", stderr(&compile));

    // "aba" padded with 3² zeros.
    let good = write_file(dir.path(), "good.txt", &format!("aba{}", "0".repeat(9)));
    assert_eq!(code(&run_bin(&["run", spec.to_str().unwrap(), good.to_str().unwrap()])), 0);

    // "ab" padded with 2² zeros is not a palindrome.
    let bad = write_file(dir.path(), "bad.txt", &format!("ab{}", "0".repeat(4)));
    assert_eq!(code(&run_bin(&["run", spec.to_str().unwrap(), bad.to_str().unwrap()])), 1);

    // Length 7 admits no n with n + n² = 7: outside the input contract,
    // which is a behaviour failure, not a verdict.
    let malformed = write_file(dir.path(), "malformed.txt", "aaaaaaa");
    let output = run_bin(&["run", spec.to_str().unwrap(), malformed.to_str().unwrap()]);
    assert_eq!(code(&output), 4, "stderr: {}", stderr(&output));
    assert!(!stderr(&output).is_empty());
}

#[test]
fn tm_and_tisp_specs_run_through_their_raw_engines() {
    let dir = TempDir::new().unwrap();
    // Walks to the right end marker, then accepts.
    let tm = write_file(
        dir.path(),
        "walker.json",
        r#"{"schema":"mrcsim/1","kind":"tm","machine":{
            "states":["go","yes","no"],"initial":"go","accept":"yes","reject":"no",
            "input_alphabet":"01","work_alphabet":"_","blank":"_","work_space":1,
            "rules":[
              {"state":"go","input":"<","work":"_","next":"go","write":"_","work_move":"S","input_move":"R"},
              {"state":"go","input":"0","work":"_","next":"go","write":"_","work_move":"S","input_move":"R"},
              {"state":"go","input":"1","work":"_","next":"go","write":"_","work_move":"S","input_move":"R"},
              {"state":"go","input":">","work":"_","next":"yes","write":"_","work_move":"S","input_move":"S"}
            ]}}"#,
    );
    let input = write_file(dir.path(), "in.txt", "0101");
    let report = dir.path().join("tm-report.json");
    let output = run_bin(&[
        "run", tm.to_str().unwrap(), input.to_str().unwrap(),
        "--report", report.to_str().unwrap(),
    ]);
    assert_eq!(code(&output), 0, "stderr: {}", stderr(&output));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(doc["engine"], "tm");
    assert!(doc["steps"].as_u64().unwrap() >= 4);

    // Scans right; accepts on the first blank (i.e. accepts everything that
    // fits the tape).
    let tisp = write_file(
        dir.path(),
        "scanner.json",
        r#"{"schema":"mrcsim/1","kind":"tisp","machine":{
            "states":["t","yes","no"],"initial":"t","accept":"yes","reject":"no",
            "alphabet":"01_","blank":"_",
            "rules":[
              {"state":"t","read":"0","next":"t","write":"0","move":"R"},
              {"state":"t","read":"1","next":"t","write":"1","move":"R"},
              {"state":"t","read":"_","next":"yes","write":"_","move":"S"}
            ],
            "time_budget":100,"space_budget":32}}"#,
    );
    let output = run_bin(&["run", tisp.to_str().unwrap(), input.to_str().unwrap()]);
    assert_eq!(code(&output), 0, "stderr: {}", stderr(&output));

    // An input longer than the tape budget is invalid, not a verdict.
    let long = write_file(dir.path(), "long.txt", &"0".repeat(64));
    assert_eq!(code(&run_bin(&["run", tisp.to_str().unwrap(), long.to_str().unwrap()])), 3);
}

#[test]
fn out_of_alphabet_inputs_exit_three_with_the_position() {
    let dir = TempDir::new().unwrap();
    let spec = compiled_parity(dir.path());
    let input = write_file(dir.path(), "in.txt", "01a1");
    let output = run_bin(&["run", spec.to_str().unwrap(), input.to_str().unwrap()]);
    assert_eq!(code(&output), 3);
    assert!(stderr(&output).contains("position 3"), "{}", stderr(&output));
}
