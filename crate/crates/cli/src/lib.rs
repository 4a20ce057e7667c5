//! Command-line front end: file formats, reports and the five subcommands.
//!
//! Exit codes: 0 when every check passes, 1 for invalid input, 2 for a numeric
//! integrity failure (including a failed check).

pub mod commands;
pub mod files;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use report::{Report, Status};

pub const SEED_ENV: &str = "RETRODICTOR_SEED";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Numeric(_) => 2,
        }
    }

    pub fn status(&self) -> Status {
        match self {
            CliError::Input(_) => Status::InputError,
            CliError::Numeric(_) => Status::NumericError,
        }
    }
}

impl From<retrodictor_core::Error> for CliError {
    fn from(e: retrodictor_core::Error) -> Self {
        if e.is_input_error() {
            CliError::Input(e.to_string())
        } else {
            CliError::Numeric(e.to_string())
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "retrodictor", version, about = "Symmetric quantum retrodiction toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write the JSON report to this path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print the JSON report to stdout instead of the text rendering.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct Angle {
    /// Half-angle between the two states, in radians, within (0, pi/4].
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Overlap <psi_1|psi_2> within [0, 1); converted via alpha = arccos(s)/2.
    #[arg(long, allow_negative_numbers = true)]
    pub overlap: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Retrodictive transform of an ensemble and a POVM read from JSON files.
    Transform {
        ensemble: PathBuf,
        povm: PathBuf,
        /// Invert the source function on its support only.
        #[arg(long)]
        support_restricted: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Optimal unambiguous discrimination of two pure qubit states and its retrodictive dual.
    Ud {
        /// Prior of the first state, strictly between 0 and 1.
        #[arg(long, allow_negative_numbers = true)]
        eta1: f64,
        #[command(flatten)]
        angle: Angle,
        /// Compare against a brute-force grid search with this step.
        #[arg(long)]
        grid_check: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Entangled channel: swap symmetry, reduced states and no-signaling.
    Channel {
        #[arg(long, allow_negative_numbers = true)]
        eta1: f64,
        #[command(flatten)]
        angle: Angle,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Monte Carlo sampling of the prepare-and-measure experiment.
    Simulate {
        ensemble: PathBuf,
        povm: PathBuf,
        /// Number of trials.
        #[arg(long, default_value_t = 1_000_000)]
        n: u64,
        /// RNG seed; falls back to the RETRODICTOR_SEED variable, then 0.
        #[arg(long, env = SEED_ENV)]
        seed: Option<u64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run property suites.
    Verify {
        /// One of linalg, retrodiction, ud, channel, sim, all.
        #[arg(long, default_value = "all")]
        suite: String,
        #[command(flatten)]
        output: OutputArgs,
    },
}

impl Command {
    fn output(&self) -> &OutputArgs {
        match self {
            Command::Transform { output, .. }
            | Command::Ud { output, .. }
            | Command::Channel { output, .. }
            | Command::Simulate { output, .. }
            | Command::Verify { output, .. } => output,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Command::Transform { .. } => "transform",
            Command::Ud { .. } => "ud",
            Command::Channel { .. } => "channel",
            Command::Simulate { .. } => "simulate",
            Command::Verify { .. } => "verify",
        }
    }
}

/// Runs the command and returns its report; errors become reports with an error status.
pub fn execute(command: &Command) -> Report {
    let result = match command {
        Command::Transform {
            ensemble,
            povm,
            support_restricted,
            ..
        } => commands::transform(ensemble, povm, *support_restricted),
        Command::Ud { eta1, angle, grid_check, .. } => commands::ud(*eta1, angle, *grid_check),
        Command::Channel { eta1, angle, .. } => commands::channel(*eta1, angle),
        Command::Simulate { ensemble, povm, n, seed, .. } => commands::simulate(ensemble, povm, *n, seed.unwrap_or(0)),
        Command::Verify { suite, .. } => commands::verify(suite),
    };
    match result {
        Ok(report) => report.finalize(),
        Err(e) => {
            let mut r = Report::new(command.name(), serde_json::Value::Null);
            r.status = e.status();
            r.error = Some(e.to_string());
            r
        }
    }
}

pub fn exit_code(report: &Report) -> i32 {
    match report.status {
        Status::Pass => 0,
        Status::InputError => 1,
        Status::Fail | Status::NumericError => 2,
    }
}

/// Parses arguments, runs the command, writes outputs and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let report = execute(&cli.command);
    let output = cli.command.output();
    if let Some(path) = &output.out {
        if let Err(e) = std::fs::write(path, report.to_json()) {
            eprintln!("error: cannot write report to {}: {e}", path.display());
            return 1;
        }
    }
    let mut stdout = std::io::stdout().lock();
    let rendered = if output.json { report.to_json() } else { report.render_text() };
    let _ = stdout.write_all(rendered.as_bytes());
    if let (Some(e), true) = (&report.error, output.json) {
        eprintln!("error: {e}");
    }
    exit_code(&report)
}
