//! `floquet-hill`: Floquet analysis of periodic field profiles from the command line.

mod commands;
mod table;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, ValueEnum};
use floquet_core::ode::Tolerances;
use floquet_core::{FieldProfile, FloquetError, Method};

use commands::ScanAxis;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Command {
    /// Monodromy, stability and normal form as JSON
    Analyze,
    /// Fundamental solutions and their polar form on a time grid
    Trace,
    /// Moments of a Gaussian packet under the Heisenberg maps
    Evolve,
    /// θ-matrix table (csv) or periodicity report (json)
    Theta,
    /// Discriminant over a grid of segment fields or durations
    Scan,
    /// Run the invariant suite and print one line per check
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    ClosedForm,
    Numeric,
}

#[derive(Parser, Debug)]
#[command(name = "floquet-hill", version, about)]
struct Cli {
    command: Command,

    /// Profile description (JSON)
    #[arg(long)]
    config: PathBuf,

    /// Output file; standard output when omitted
    #[arg(long)]
    out: Option<PathBuf>,

    #[arg(long, value_enum)]
    format: Option<Format>,

    /// Grid intervals per period
    #[arg(long, default_value_t = 64)]
    samples: usize,

    #[arg(long, default_value_t = 1)]
    periods: usize,

    #[arg(long, default_value_t = 1e-10)]
    rtol: f64,

    #[arg(long, default_value_t = 1e-12)]
    atol: f64,

    /// Solver for `trace`
    #[arg(long, value_enum, default_value_t = MethodArg::ClosedForm)]
    method: MethodArg,

    /// `field.K` or `duration.K` (zero-based segment index); repeat for a 2-D scan
    #[arg(long)]
    scan_param: Vec<String>,

    /// `A:B:STEPS`, one per `--scan-param`
    #[arg(long)]
    scan_range: Vec<String>,
}

const THREADS_ENV: &str = "FLOQUET_HILL_THREADS";

fn config_error(msg: impl Into<String>) -> anyhow::Error {
    FloquetError::Config(msg.into()).into()
}

fn check_args(cli: &Cli) -> anyhow::Result<()> {
    if cli.samples < 2 {
        return Err(config_error(format!("--samples must be at least 2, got {}", cli.samples)));
    }
    if cli.periods < 1 {
        return Err(config_error("--periods must be at least 1"));
    }
    if !(cli.rtol > 0.0) || !(cli.atol > 0.0) {
        return Err(config_error("--rtol and --atol must be positive"));
    }
    if cli.command == Command::Scan {
        let n = cli.scan_param.len();
        if n == 0 || n > 2 || cli.scan_range.len() != n {
            return Err(config_error(
                "scan needs one or two --scan-param flags, each with a matching --scan-range",
            ));
        }
    }
    Ok(())
}

fn threads_from_env() -> anyhow::Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(config_error(format!("{THREADS_ENV} must be a positive integer, got '{s}'"))),
        },
    }
}

/// Returns the rendered output and whether the command succeeded.
fn run(cli: &Cli) -> anyhow::Result<(String, bool)> {
    check_args(cli)?;
    let text = fs::read_to_string(&cli.config)
        .map_err(|e| config_error(format!("cannot read {}: {e}", cli.config.display())))?;
    let profile = FieldProfile::from_json(&text)?;
    let tol = Tolerances { rtol: cli.rtol, atol: cli.atol };
    let format = cli.format;
    let pretty = |v: serde_json::Value| {
        let mut s = serde_json::to_string_pretty(&v).expect("JSON values always serialize");
        s.push('\n');
        s
    };
    let table_out = |t: table::Table| match format.unwrap_or(Format::Csv) {
        Format::Csv => t.to_csv(),
        Format::Json => pretty(t.to_json()),
    };

    let out = match cli.command {
        Command::Analyze => {
            if format == Some(Format::Csv) {
                return Err(config_error("analyze writes JSON only"));
            }
            pretty(commands::analyze(&profile)?)
        }
        Command::Trace => {
            let method = match cli.method {
                MethodArg::ClosedForm => Method::ClosedForm,
                MethodArg::Numeric => Method::Numeric,
            };
            table_out(commands::trace(&profile, cli.samples, cli.periods, method, tol)?)
        }
        Command::Evolve => table_out(commands::evolve(&profile, cli.samples, cli.periods)?),
        Command::Theta => match format.unwrap_or(Format::Csv) {
            Format::Csv => commands::theta_table(&profile, cli.samples, cli.periods)?.to_csv(),
            Format::Json => pretty(commands::theta_report(&profile, cli.samples, cli.periods)?),
        },
        Command::Scan => {
            let axes = cli
                .scan_param
                .iter()
                .zip(&cli.scan_range)
                .map(|(p, r)| ScanAxis::parse(p, r))
                .collect::<Result<Vec<_>, _>>()?;
            table_out(commands::scan(&profile, &axes, threads_from_env()?)?)
        }
        Command::Validate => {
            let (text, ok) = commands::validate(&profile, tol)?;
            return Ok((text, ok));
        }
    };
    Ok((out, true))
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<FloquetError>()) {
        Some(FloquetError::Config(_)) => 2,
        Some(FloquetError::AssumptionViolation(_) | FloquetError::NotHyperbolic(_)) => 3,
        Some(FloquetError::NumericalFailure(_) | FloquetError::Unwrap { .. }) => 4,
        None => 1,
    }
}

fn emit(cli: &Cli, text: &str) -> anyhow::Result<()> {
    match &cli.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => std::io::stdout().write_all(text.as_bytes()).context("writing to stdout"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|(text, ok)| emit(&cli, &text).map(|_| ok));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("floquet-hill: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
