//! Command-line front end: `run`, `sweep` and `paper-check`.
//!
//! Exit codes: 0 success, 1 a reproduction check failed, 2 invalid input
//! (usage, scenario file, sweep values), 3 runtime failure.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::engine::{run_scenario, run_sweep_points, sweep_scenarios, Scenario, SweepParam};
use crate::paper_check::run_checks;
use crate::report::{summary, write_check_csv, write_run_csv, write_sweep_csv};
use crate::scenario::{load_scenario, LoadError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "qkd-timeshift", version, about = "Detector-mismatch attacks on BB84: simulation and analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one scenario and write a one-row CSV.
    Run(RunArgs),
    /// Simulate a scenario at several values of one parameter.
    Sweep(SweepArgs),
    /// Run the fixed-seed reference checks; exit 1 if any fails.
    PaperCheck(CheckArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Scenario JSON file, or the name of a canned scenario.
    pub scenario: String,
    /// Overrides the scenario's seed.
    #[arg(long, env = "QKD_TIMESHIFT_SEED")]
    pub seed: Option<u64>,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Suppress the summary on stderr.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    pub scenario: String,
    /// r, delta_t, dark_count_prob, n_pulses or block_fraction.
    #[arg(long)]
    pub param: String,
    /// Comma-separated values, e.g. `0,0.1,0.2`.
    #[arg(long, allow_hyphen_values = true)]
    pub values: String,
    #[arg(long, env = "QKD_TIMESHIFT_SEED")]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Runtime(String),
    #[error("{0} reproduction check(s) failed")]
    ChecksFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Load(_) | CliError::Invalid(_) => EXIT_INVALID,
            CliError::Runtime(_) => EXIT_RUNTIME,
            CliError::ChecksFailed(_) => EXIT_CHECK_FAILED,
        }
    }
}

fn runtime<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Runtime(e.to_string())
}

fn load(path: &str, seed: Option<u64>) -> Result<Scenario, CliError> {
    let mut s = load_scenario(path)?;
    if let Some(seed) = seed {
        s.seed = seed;
    }
    Ok(s)
}

/// Sends `body` to `out` if given, else to `stdout`.
fn emit(out: &Option<PathBuf>, stdout: &mut dyn Write, body: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => {
            let mut f = BufWriter::new(
                File::create(path).map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", path.display())))?,
            );
            f.write_all(body).and_then(|_| f.flush()).map_err(runtime)
        }
        None => stdout.write_all(body).map_err(runtime),
    }
}

pub fn parse_values(text: &str) -> Result<Vec<f64>, CliError> {
    let values = text
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| {
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| CliError::Invalid(format!("--values: `{v}` is not a finite number")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if values.is_empty() {
        return Err(CliError::Invalid("--values needs at least one value".into()));
    }
    Ok(values)
}

pub fn cmd_run(args: &RunArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let s = load(&args.scenario, args.seed)?;
    let result = run_scenario(&s).map_err(runtime)?;
    let mut body = Vec::new();
    write_run_csv(&mut body, &s, &result).map_err(runtime)?;
    emit(&args.out, stdout, &body)?;
    if !args.quiet {
        writeln!(stderr, "{}", summary(&s, &result)).map_err(runtime)?;
    }
    Ok(())
}

pub fn cmd_sweep(args: &SweepArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let base = load(&args.scenario, args.seed)?;
    let param: SweepParam = args.param.parse().map_err(|e: crate::Error| CliError::Invalid(e.to_string()))?;
    let values = parse_values(&args.values)?;
    let scenarios = sweep_scenarios(&base, param, &values).map_err(|e| CliError::Invalid(e.to_string()))?;
    let points = run_sweep_points(&scenarios, &values).map_err(runtime)?;
    let mut body = Vec::new();
    write_sweep_csv(&mut body, &scenarios, &points).map_err(runtime)?;
    emit(&args.out, stdout, &body)?;
    if !args.quiet {
        for (v, r) in &points {
            let q = r.qber.map(|q| q.to_string()).unwrap_or_else(|| "undefined".into());
            writeln!(stderr, "{} = {v}: QBER {q}, {} sifted", param.name(), r.sifted).map_err(runtime)?;
        }
    }
    Ok(())
}

pub fn cmd_paper_check(args: &CheckArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let rows = run_checks().map_err(runtime)?;
    let mut body = Vec::new();
    write_check_csv(&mut body, &rows).map_err(runtime)?;
    emit(&args.out, stdout, &body)?;
    if !args.quiet {
        for c in &rows {
            let verdict = if c.pass { "PASS" } else { "FAIL" };
            writeln!(
                stderr,
                "{verdict} {}: expected {} observed {} (tolerance {})",
                c.name, c.expected, c.observed, c.tolerance
            )
            .map_err(runtime)?;
        }
    }
    match rows.iter().filter(|c| !c.pass).count() {
        0 => Ok(()),
        n => Err(CliError::ChecksFailed(n)),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_INVALID
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_OK
            };
        }
    };
    let outcome = match &cli.command {
        Command::Run(a) => cmd_run(a, stdout, stderr),
        Command::Sweep(a) => cmd_sweep(a, stdout, stderr),
        Command::PaperCheck(a) => cmd_paper_check(a, stdout, stderr),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn main_from_env() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_cli(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
