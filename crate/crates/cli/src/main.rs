//! `chern-fqh` — exact Chern characters, ranks, and Hall conductances of
//! multilayer quantum Hall bundles.
//!
//! Every subcommand reads one JSON job file (`--config`), prints either a
//! human summary or the structured record (`--format`), and can persist
//! the structured record to a file (`--out`).  Exit codes: 0 success,
//! 1 internal error, 2 invalid input, 3 a verification found a mismatch.

mod commands;
mod job;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::commands::Outcome;
use crate::job::{CliError, JobSpec, EXIT_INTERNAL};

#[derive(Parser)]
#[command(name = "chern-fqh", version, about = "Exact Chern characters, ranks, and Hall conductances of multilayer quantum Hall bundles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Chern character, rank, and conductance of one configuration
    Chern(JobArgs),
    /// Solve the zero-quasi-hole particle relation for n0
    Shift(JobArgs),
    /// Coupling-matrix diagnostics: determinant, inverse sums, maximization
    Analyze(JobArgs),
    /// One flux-pair Gaussian integral, closed form vs brute force
    Wick(JobArgs),
    /// Pipeline equivalence: one configuration, or a bounded sweep
    Verify(JobArgs),
    /// Exact vs asymptotic conductance over a range of degrees
    Sweep(JobArgs),
}

#[derive(clap::Args)]
struct JobArgs {
    /// Path to the JSON job file
    #[arg(long)]
    config: PathBuf,
    /// Also write the structured record to this file
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format on stdout
    #[arg(long, value_enum, default_value_t = Format::Human)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, args): (&str, &JobArgs) = match &cli.command {
        Command::Chern(a) => ("chern", a),
        Command::Shift(a) => ("shift", a),
        Command::Analyze(a) => ("analyze", a),
        Command::Wick(a) => ("wick", a),
        Command::Verify(a) => ("verify", a),
        Command::Sweep(a) => ("sweep", a),
    };
    let code = run(name, args);
    ExitCode::from(code as u8)
}

fn run(name: &str, args: &JobArgs) -> i32 {
    let text = match std::fs::read_to_string(&args.config) {
        Ok(text) => text,
        Err(err) => {
            let error = CliError::invalid(format!(
                "cannot read {}: {err}",
                args.config.display()
            ));
            return emit_error(name, Value::Null, &error, args);
        }
    };
    let echo: Value = match serde_json::from_str(&text) {
        Ok(value) => value,
        Err(err) => {
            let error = CliError::invalid(format!("job file is not valid JSON: {err}"));
            return emit_error(name, Value::Null, &error, args);
        }
    };
    let spec: JobSpec = match serde_json::from_value(echo.clone()) {
        Ok(spec) => spec,
        Err(err) => {
            let error = CliError::invalid(format!("job file is not a valid job: {err}"));
            return emit_error(name, echo, &error, args);
        }
    };
    let outcome = match name {
        "chern" => commands::chern(&spec),
        "shift" => commands::shift(&spec),
        "analyze" => commands::analyze(&spec),
        "wick" => commands::wick(&spec),
        "verify" => commands::verify(&spec),
        "sweep" => commands::sweep(&spec),
        _ => unreachable!("dispatch covers every subcommand"),
    };
    match outcome {
        Ok(outcome) => emit(name, echo, &outcome, args),
        Err(error) => emit_error(name, echo, &error, args),
    }
}

/// The structured record every invocation produces.
fn record(name: &str, input: Value, result: Value, validity: Value, errors: Value) -> Value {
    json!({
        "command": name,
        "input": input,
        "result": result,
        "validity": validity,
        "errors": errors,
    })
}

fn write_record(record: &Value, args: &JobArgs) -> Result<(), String> {
    let Some(path) = &args.out else {
        return Ok(());
    };
    let mut text = serde_json::to_string_pretty(record)
        .map_err(|err| format!("cannot serialize record: {err}"))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|err| format!("cannot write {}: {err}", path.display()))
}

fn emit(name: &str, input: Value, outcome: &Outcome, args: &JobArgs) -> i32 {
    let record = record(
        name,
        input,
        outcome.result.clone(),
        outcome.validity.clone().unwrap_or(Value::Null),
        json!([]),
    );
    if let Err(message) = write_record(&record, args) {
        eprintln!("error (internal): {message}");
        return EXIT_INTERNAL;
    }
    match args.format {
        Format::Human => print!("{}", outcome.human),
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&record).expect("record serializes")
        ),
    }
    outcome.exit
}

fn emit_error(name: &str, input: Value, error: &CliError, args: &JobArgs) -> i32 {
    let record = record(
        name,
        input,
        Value::Null,
        Value::Null,
        json!([{ "kind": error.kind, "message": error.message, "exit": error.exit }]),
    );
    if let Err(message) = write_record(&record, args) {
        eprintln!("error (internal): {message}");
        return EXIT_INTERNAL;
    }
    match args.format {
        Format::Human => eprintln!("error ({}): {}", error.kind, error.message),
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&record).expect("record serializes")
        ),
    }
    error.exit
}
