//! Command-line front end for the overdamping-transition library:
//! model runners, parameter sweeps, and figure-dataset emitters.

mod figures;
mod qbm_cmd;
mod ring_loop;
mod spin_boson;
mod spin_gorm;
mod support;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use support::{CliError, Settings};

/// Relaxation rates, exact reference dynamics, and figure datasets for
/// four open quantum systems crossing into overdamping at weak coupling.
#[derive(Parser)]
#[command(name = "overdamp", version)]
struct Cli {
    /// JSON file of default parameter values; explicit flags win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Omit the timestamp from provenance headers for reproducible
    /// output bytes.
    #[arg(long, global = true)]
    no_timestamp: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spin coupled to a thermal oscillator bath.
    #[command(subcommand)]
    SpinBoson(spin_boson::SpinBosonCmd),
    /// Spin coupled to a random-matrix bath.
    #[command(subcommand)]
    SpinGorm(spin_gorm::SpinGormCmd),
    /// Dephasing ring and its diffusive branch.
    #[command(subcommand)]
    Loop(ring_loop::LoopCmd),
    /// Damped oscillator in a discretizable bath.
    #[command(subcommand)]
    Qbm(qbm_cmd::QbmCmd),
    /// Datasets behind the three figures.
    #[command(subcommand)]
    Figures(figures::FiguresCmd),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let settings = Settings::load(cli.config.as_deref())?;
    let stamp = !cli.no_timestamp;
    match cli.command {
        Command::SpinBoson(cmd) => spin_boson::run(cmd, &settings, stamp),
        Command::SpinGorm(cmd) => spin_gorm::run(cmd, &settings, stamp),
        Command::Loop(cmd) => ring_loop::run(cmd, &settings, stamp),
        Command::Qbm(cmd) => qbm_cmd::run(cmd, &settings, stamp),
        Command::Figures(cmd) => figures::run(cmd, &settings, stamp),
    }
}
