mod args;
mod commands;
mod output;
mod states;
mod svg;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use log::LevelFilter;

use args::{Cli, Command};

fn init_logging() {
    let level = match std::env::var("QPROD_LOG").as_deref() {
        Ok("info") => LevelFilter::Info,
        Ok("debug") => LevelFilter::Debug,
        _ => LevelFilter::Off,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();
}

fn main() -> ExitCode {
    init_logging();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let result = match &cli.command {
        Command::Spectrum(c) => commands::spectrum(c),
        Command::Product(a) => commands::product(a),
        Command::Table(a) => commands::table(a),
        Command::Figure(a) => commands::figure(a),
        Command::Regint(a) => commands::regint(a),
        Command::Verify(c) => commands::verify(c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("qprod: {f}");
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
