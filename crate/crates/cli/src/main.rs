//! `ledlab` command-line front end.
//!
//! Every subcommand writes its tables and reports into the output directory
//! (`--out-dir`, else `LEDLAB_OUT_DIR`, else the working directory). `--csv`
//! additionally prints the main table and `--json` the main report on stdout.
//! Exit codes: 0 ok, 1 usage or malformed input, 2 domain error, 3 numerical
//! failure.

mod admissibility;
mod config;
mod error;
mod gyro;
mod output;
mod renorm;
mod selfcheck;
mod stationary;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(name = "ledlab", version, about = "Numerical laboratory for massive Lorentz electrodynamics")]
#[command(args_override_self = true)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

/// Options shared by all subcommands.
#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Directory for output files.
    #[arg(long, global = true, env = "LEDLAB_OUT_DIR", default_value = ".")]
    pub out_dir: PathBuf,
    /// Flat key=value file with defaults for any long option; flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Print the main report as JSON on stdout.
    #[arg(long, global = true)]
    pub json: bool,
    /// Print the main table as CSV on stdout.
    #[arg(long, global = true)]
    pub csv: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    RenormFlow(renorm::RenormArgs),
    Stationary(stationary::StationaryArgs),
    GyroSim(gyro::GyroArgs),
    Admissibility(admissibility::AdmissibilityArgs),
    Selfcheck(selfcheck::SelfcheckArgs),
}

fn run(cli: Cli) -> Result<(), CliError> {
    let common = cli.common;
    match cli.command {
        Command::RenormFlow(a) => renorm::run(&common, &a),
        Command::Stationary(a) => stationary::run(&common, &a),
        Command::GyroSim(a) => gyro::run(&common, &a),
        Command::Admissibility(a) => admissibility::run(&common, &a),
        Command::Selfcheck(a) => selfcheck::run(&common, &a),
    }
}

fn main() -> ExitCode {
    let args = match config::merged_args(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
