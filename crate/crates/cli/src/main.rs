//! `mrcsim` — run, translate, and cross-check machine specs.
//!
//! Exit codes: 0 accept (or success for non-deciding commands), 1 reject
//! (or a `verify` disagreement), 2 resource violation under enforcement,
//! 3 invalid spec/input/usage, 4 internal engine contract failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use mrcsim::commands::{cmd_compile, cmd_run, cmd_verify, cmd_wordcount};

#[derive(Parser)]
#[command(
    name = "mrcsim",
    version,
    about = "Round-based machine simulator: run specs, translate between models, cross-check engines"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a spec on an input file (`-` reads standard input)
    Run {
        /// Spec document (JSON, schema mrcsim/1)
        spec: PathBuf,
        /// Input bytes; one trailing newline is ignored
        input: PathBuf,
        /// Limits overlay: comma-separated `enforce`, `record-only`,
        /// `c=<rational>`, `const=<rational>`
        #[arg(long)]
        limits: Option<String>,
        /// Write a JSON run report here
        #[arg(long)]
        report: Option<PathBuf>,
        /// Permute intra-round execution order with this seed
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Translate a spec into another model and write the result
    Compile {
        /// One of: dfa2mrc, tm2mrc, tisp2mrc, pad-decider, mrc2bsp, bsp2mrc
        kind: String,
        /// Source spec (dfa2mrc also accepts a regex over 0/1 instead of JSON)
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Block exponent for dfa2mrc / tm2mrc, e.g. "1/2"
        #[arg(long)]
        epsilon: Option<String>,
        /// Processor count for mrc2bsp
        #[arg(long)]
        p: Option<usize>,
        /// Base language for pad-decider: palindrome, all-zeros, odd-ones
        #[arg(long)]
        base: Option<String>,
        /// Also check input-length-dependent feasibility at this n
        #[arg(long)]
        check_n: Option<usize>,
        /// Output path (`-` prints to standard output)
        #[arg(long)]
        out: PathBuf,
    },
    /// Cross-check a spec against a reference engine on random inputs
    Verify {
        /// Spec document to check
        spec: PathBuf,
        /// One of: dfa, tm, tisp (compiled program vs raw machine),
        /// mrc-engine (schedule determinism), bsp-engine (barrier twin)
        #[arg(long)]
        oracle: String,
        /// Number of random inputs to try
        #[arg(long, default_value_t = 100)]
        trials: u64,
        /// Largest input length to draw
        #[arg(long, default_value_t = 256)]
        max_n: usize,
        /// Seed for the input generator
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Perturb one rule of the artifact copy to prove disagreement is
        /// detectable (machine oracles only)
        #[arg(long)]
        inject_fault: bool,
    },
    /// Count whitespace-separated tokens and print `token<TAB>count` lines
    Wordcount {
        /// Input text (`-` reads standard input)
        input: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version are successes; anything else is a usage
            // error, which shares the "invalid invocation" exit code.
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };

    let result = match &cli.command {
        Command::Run { spec, input, limits, report, seed } => cmd_run(
            spec,
            input,
            limits.as_deref(),
            report.as_deref(),
            *seed,
        ),
        Command::Compile { kind, spec, epsilon, p, base, check_n, out } => cmd_compile(
            kind,
            spec.as_deref(),
            epsilon.as_deref(),
            *p,
            base.as_deref(),
            *check_n,
            out,
        )
        .map(|()| 0),
        Command::Verify { spec, oracle, trials, max_n, seed, inject_fault } => {
            cmd_verify(spec, oracle, *trials, *max_n, *seed, *inject_fault)
        }
        Command::Wordcount { input } => cmd_wordcount(input).map(|()| 0),
    };

    match result {
        Ok(code) => ExitCode::from(u8::try_from(code).unwrap_or(4)),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(u8::try_from(err.exit_code()).unwrap_or(4))
        }
    }
}
