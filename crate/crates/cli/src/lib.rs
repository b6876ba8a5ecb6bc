//! Command-line front end for the `oqec` library.
//!
//! Exit codes: 0 pass, 1 semantic failure, 2 input error, 3 synthesis failure.

pub mod commands;
pub mod files;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};
use oqec::Tolerance;
use serde_json::Value;

pub use report::Format;

pub const ATOL_ENV: &str = "OQEC_ATOL";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Pass = 0,
    Fail = 1,
    Input = 2,
    Synthesis = 3,
}

impl Status {
    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Pass => "pass",
            Self::Fail => "fail",
            Self::Input => "input-error",
            Self::Synthesis => "synthesis-failure",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Unreadable, malformed or inconsistent input.
    #[error("{0}")]
    Input(String),
    /// Well-formed input that fails a required property.
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Synthesis(String),
}

impl CliError {
    pub fn status(&self) -> Status {
        match self {
            Self::Input(_) => Status::Input,
            Self::Invalid(_) => Status::Fail,
            Self::Synthesis(_) => Status::Synthesis,
        }
    }
}

/// A finished command: its verdict and the report to print.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub status: Status,
    pub report: Value,
}

#[derive(Debug, Parser)]
#[command(name = "oqec", version, about = "Noiseless and correctable subsystems of quantum channels")]
pub struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Absolute tolerance; overrides OQEC_ATOL.
    #[arg(long, global = true)]
    pub atol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check trace preservation and unitality of a channel file.
    Validate { channel: PathBuf },
    /// Interaction algebra, commutant, block table and fixed points.
    #[command(group(ArgGroup::new("input").required(true).args(["channel", "batch"])))]
    Analyze {
        channel: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory for discovered noiseless decompositions (and batch reports).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Analyze every channel file in a directory.
        #[arg(long)]
        batch: Option<PathBuf>,
    },
    /// Operator conditions for a noiseless subsystem.
    CheckNs { channel: PathBuf, decomposition: PathBuf },
    /// Correctability condition for a subsystem, with the lambda tensor.
    CheckOqec { channel: PathBuf, decomposition: PathBuf },
    /// Synthesize and verify a recovery channel.
    Recover {
        channel: PathBuf,
        decomposition: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Unitarily noiseless algebra of a unital channel for a given unitary.
    #[command(group(ArgGroup::new("target").required(true).args(["unitary", "scan"])))]
    Uns {
        channel: PathBuf,
        unitary: Option<PathBuf>,
        /// Try permutations and diagonal sign flips instead of a unitary file.
        #[arg(long)]
        scan: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory for the sector decompositions.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the files of a built-in example (example1, example2, oqec, uns).
    Example {
        name: String,
        /// Parameter as key=value, e.g. q=0.25.
        #[arg(long = "param", value_parser = parse_param)]
        params: Vec<(String, f64)>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got {s:?}"))?;
    let v: f64 = v.trim().parse().map_err(|e| format!("{k}: {e}"))?;
    Ok((k.trim().to_string(), v))
}

/// Tolerance from the flag, else the environment, else the default.
pub fn tolerance(flag: Option<f64>) -> Result<Tolerance, CliError> {
    let atol = match flag {
        Some(a) => Some(a),
        None => match std::env::var(ATOL_ENV) {
            Ok(s) => Some(
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| CliError::Input(format!("{ATOL_ENV}={s:?}: {e}")))?,
            ),
            Err(_) => None,
        },
    };
    let tol = Tolerance::default();
    match atol {
        Some(a) => tol.with_atol(a).map_err(|e| CliError::Input(e.to_string())),
        None => Ok(tol),
    }
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let tol = tolerance(cli.atol)?;
    match &cli.command {
        Command::Validate { channel } => commands::validate(channel, &tol),
        Command::Analyze {
            channel,
            seed,
            out,
            batch,
        } => match (channel, batch) {
            (_, Some(dir)) => commands::analyze_batch(dir, out.as_deref(), *seed, &tol),
            (Some(path), None) => commands::analyze(path, out.as_deref(), *seed, &tol),
            (None, None) => unreachable!("clap requires one input"),
        },
        Command::CheckNs { channel, decomposition } => commands::check_ns(channel, decomposition, &tol),
        Command::CheckOqec { channel, decomposition } => commands::check_oqec(channel, decomposition, &tol),
        Command::Recover {
            channel,
            decomposition,
            out,
        } => commands::recover(channel, decomposition, out, &tol),
        Command::Uns {
            channel,
            unitary,
            scan,
            seed,
            out,
        } => match unitary {
            Some(u) if !scan => commands::uns(channel, u, *seed, out.as_deref(), &tol),
            _ => commands::uns_scan(channel, *seed, &tol),
        },
        Command::Example { name, params, out } => commands::example(name, params, out),
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Validate { .. } => "validate",
        Command::Analyze { .. } => "analyze",
        Command::CheckNs { .. } => "check-ns",
        Command::CheckOqec { .. } => "check-oqec",
        Command::Recover { .. } => "recover",
        Command::Uns { .. } => "uns",
        Command::Example { .. } => "example",
    }
}

pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { Status::Input.code() } else { 0 });
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            print!("{}", report::render(&outcome.report, cli.format));
            ExitCode::from(outcome.status.code())
        }
        Err(e) => {
            let status = e.status();
            if cli.format == Format::Json {
                let mut r = report::Report::new(command_name(&cli.command));
                r.set("status", status.label()).set("error", e.to_string());
                print!("{}", report::render(&r.into_value(), Format::Json));
            }
            eprintln!("error: {e}");
            ExitCode::from(status.code())
        }
    }
}
