//! `piecevalue` command-line tool.
//!
//! Stages hand off through files: `ingest` writes validated games,
//! `snapshot` writes feature tables, `fit`/`simex`/`bootstrap` write fits
//! and `report` turns fits into tables.

mod args;
mod error;
mod lab;
mod output;
mod pipeline;
mod selfplay;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, McCommand, SelfplayCommand};
use error::CliError;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        2 => log::LevelFilter::Debug,
        _ => log::LevelFilter::Trace,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("piecevalue: {e}");
            e.exit_code()
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Ingest(a) => pipeline::ingest(a),
        Command::Snapshot(a) => pipeline::snapshot(a),
        Command::Fit(a) => pipeline::fit(a),
        Command::Simex(a) => pipeline::simex(a),
        Command::Bootstrap(a) => pipeline::bootstrap(a),
        Command::Report(a) => pipeline::report(a),
        Command::Mc(McCommand::Knight(a)) => lab::knight(a),
        Command::Mc(McCommand::Calibration(a)) => lab::calibration(a),
        Command::Mc(McCommand::Archive(a)) => lab::archive(a),
        Command::EloNoise(a) => lab::elo_noise(a),
        Command::ImpliedK(a) => lab::implied_k(a),
        Command::Selfplay(SelfplayCommand::Run(a)) => selfplay::run(a),
        Command::Selfplay(SelfplayCommand::Fit(a)) => selfplay::fit(a),
        Command::MockEngine(a) => selfplay::mock_engine(a),
    }
}
