use std::process::ExitCode;

use clap::{Parser, Subcommand};
use zenofiber_cli::commands;
use zenofiber_cli::config::{Overrides, RunConfig};

#[derive(Parser)]
#[command(name = "zenofiber", version, about = "Zeno dynamics of the atom-cavity-fiber system")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Strong-Hamiltonian eigenvalues against the dark/bright prediction
    Spectrum(Overrides),
    /// Analytic dark states, numeric bright states and their residuals
    Darkstates(Overrides),
    /// Run one protocol and write its JSON record
    Protocol(Overrides),
    /// Run a protocol over a 1- or 2-axis parameter grid
    Sweep(Overrides),
    /// Effective vs exact evolution over time
    Compare(Overrides),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (flags, run): (&Overrides, fn(&RunConfig) -> zenofiber_cli::CliResult<String>) = match &cli.command {
        Command::Spectrum(f) => (f, commands::spectrum),
        Command::Darkstates(f) => (f, commands::darkstates),
        Command::Protocol(f) => (f, commands::protocol),
        Command::Sweep(f) => (f, commands::sweep),
        Command::Compare(f) => (f, commands::compare),
    };
    match RunConfig::resolve(flags).and_then(|cfg| run(&cfg)) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("zenofiber: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
