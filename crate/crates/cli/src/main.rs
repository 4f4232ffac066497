mod cli;
mod commands;
mod error;
mod io;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use crate::cli::{Cli, Command};
use crate::error::{CliError, CliResult};
use crate::io::{emit_report, Format};
use crate::settings::{pick, FileConfig};

fn run(cli: Cli) -> CliResult<()> {
    let cfg = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let format = pick(cli.format, cfg.format, Format::Csv);
    let jobs = pick(cli.jobs, cfg.jobs, 0);
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build_global()
        .map_err(|e| CliError::input(format!("cannot start {jobs} workers: {e}")))?;

    let outcome = match &cli.command {
        Command::Simulate(a) => commands::simulate(a, &cfg)?,
        Command::Estimate(a) => commands::estimate_cmd(a, &cfg)?,
        Command::Decompose(a) => commands::decompose(a, &cfg)?,
        Command::Frontier(a) => commands::frontier(a, &cfg)?,
        Command::Forecast(a) => commands::forecast(a, &cfg)?,
        Command::Study(a) => commands::study(a, &cfg)?,
        Command::Backtest(a) => commands::backtest(a, &cfg)?,
        Command::Reproduce => {
            let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("reproduce"));
            let outcome = commands::reproduce(&cfg, &dir, format)?;
            emit_report(&outcome.report, format, None)?;
            return Ok(());
        }
    };
    emit_report(&outcome.report, format, cli.out.as_deref())?;
    match outcome.after {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::input(e.render().to_string().trim_end().to_string());
            eprintln!("{}", err.record());
            return ExitCode::from(err.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
