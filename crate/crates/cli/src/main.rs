// SPDX-License-Identifier: Apache-2.0

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, ValueEnum};

use blastproof::interp::TraceMode;
use blastproof::Mode;
use blastproof_cli::{report_json, report_text, run_file, RunOptions, EXIT_USAGE};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Bdd,
    Aig,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TraceArg {
    Calls,
    Values,
}

/// Proves bit-vector theorems by symbolic execution and bit-blasting.
#[derive(Debug, Parser)]
#[command(name = "blastproof", version)]
struct Args {
    /// Theorem file to check.
    file: PathBuf,

    /// Boolean representation used unless a theorem chooses its own.
    #[arg(long, value_enum, default_value = "bdd")]
    mode: ModeArg,

    /// Seed for random counterexample search and preferred-definition checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Print each function call made during symbolic execution.
    #[arg(long, value_enum, num_args = 0..=1, require_equals = true, default_missing_value = "calls")]
    trace: Option<TraceArg>,

    /// Emit trace lines as JSON objects.
    #[arg(long)]
    trace_json: bool,

    /// Stop at the first unevaluated function application.
    #[arg(long = "break-on-g-apply")]
    break_on_apply: bool,

    /// Interpreter step limit per proof.
    #[arg(long)]
    max_steps: Option<u64>,

    /// Node limit for the Boolean engine.
    #[arg(long)]
    node_budget: Option<usize>,

    /// Conflict limit per SAT call in AIG mode.
    #[arg(long)]
    sat_conflicts: Option<u64>,

    /// Number of counterexamples to look for.
    #[arg(long)]
    counterexamples: Option<usize>,

    /// Write the report as JSON.
    #[arg(long)]
    json: bool,

    /// Continue after a failing event.
    #[arg(long)]
    keep_going: bool,

    /// Only check that the bindings cover the hypothesis.
    #[arg(long)]
    coverage_only: bool,

    /// Write the CNF of each AIG-mode validity check to this directory.
    #[arg(long, value_name = "DIR")]
    dimacs: Option<PathBuf>,
}

fn options(a: &Args) -> RunOptions {
    let d = RunOptions::default();
    RunOptions {
        mode: match a.mode {
            ModeArg::Bdd => Mode::Bdd,
            ModeArg::Aig => Mode::Aig,
        },
        seed: a.seed,
        trace: match a.trace {
            None => TraceMode::Off,
            Some(TraceArg::Calls) => TraceMode::Calls,
            Some(TraceArg::Values) => TraceMode::Values,
        },
        trace_json: a.trace_json,
        break_on_apply: a.break_on_apply,
        max_steps: a.max_steps.unwrap_or(d.max_steps),
        node_budget: a.node_budget.unwrap_or(d.node_budget),
        sat_conflicts: a.sat_conflicts.unwrap_or(d.sat_conflicts),
        counterexamples: a.counterexamples.unwrap_or(d.counterexamples),
        keep_going: a.keep_going,
        coverage_only: a.coverage_only,
        dimacs_dir: a.dimacs.clone(),
    }
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE as u8),
            };
        }
    };
    let opts = options(&args);
    if let Some(dir) = &opts.dimacs_dir {
        if let Err(e) = std::fs::create_dir_all(dir) {
            eprintln!("blastproof: cannot create {}: {e}", dir.display());
            return ExitCode::from(EXIT_USAGE as u8);
        }
    }
    let report = match run_file(&args.file, &opts) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("blastproof: cannot read {}: {e}", args.file.display());
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    let mut out = std::io::stdout().lock();
    let written = if args.json {
        serde_json::to_writer_pretty(&mut out, &report_json(&report))
            .map_err(std::io::Error::from)
            .and_then(|()| writeln!(out))
    } else {
        out.write_all(report_text(&report).as_bytes())
    };
    if let Err(e) = written {
        eprintln!("blastproof: {e}");
    }
    ExitCode::from(report.exit_code as u8)
}
