mod commands;
mod config;
mod report;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dirac_trace::error::Error;

#[derive(Parser)]
#[command(name = "dirac-trace", version, about = "Trace formula toolkit for Dirac operators on hyperbolic surfaces")]
struct Cli {
    /// Key-value configuration file
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Override one configuration key, e.g. --set cutoffs.length=10
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Print the JSON report instead of the table
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Subcommand)]
enum Command {
    /// Validate the presentation, relator, area and multiplier system
    GroupVerify,
    /// Enumerate (or load from cache) the length spectrum
    Geodesics,
    /// Evaluate the geometric side of the trace formula
    Trace,
    /// Scan peaked test functions for eigenvalue estimates
    Scan,
    /// Evaluate ln Z on a grid of points
    Zeta,
    /// Run every identity suite and print one pass/fail matrix
    VerifyAll,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::GroupVerify => "group-verify",
            Command::Geodesics => "geodesics",
            Command::Trace => "trace",
            Command::Scan => "scan",
            Command::Zeta => "zeta",
            Command::VerifyAll => "verify-all",
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) => 2,
        Error::Budget(_) => 3,
        _ => 1,
    }
}

fn run(cli: &Cli) -> Result<bool, Error> {
    let cfg = config::load(cli.config.as_deref(), &cli.set, std::env::var(config::CACHE_ENV).ok())?;
    let report = match cli.command {
        Command::GroupVerify => commands::group_verify(&cfg),
        Command::Geodesics => commands::geodesics(&cfg),
        Command::Trace => commands::trace(&cfg),
        Command::Scan => commands::scan(&cfg),
        Command::Zeta => commands::zeta(&cfg),
        Command::VerifyAll => verify::verify_all(&cfg),
    }?;
    if cli.json {
        print!("{}", report.to_json());
    } else {
        print!("{}", report.to_text());
    }
    if let Some(dir) = &cfg.output_dir {
        report.write(dir)?;
    }
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("dirac-trace {}: {e}", cli.command.name());
            if let Error::Budget(_) = e {
                eprintln!("hint: raise group.budget or lower cutoffs.length");
            }
            ExitCode::from(exit_code(&e))
        }
    }
}
