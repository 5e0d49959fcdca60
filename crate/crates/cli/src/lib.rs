//! Command-line front end: configuration loading, command dispatch and
//! output writers.

pub mod commands;
pub mod config;
pub mod error;
pub mod format;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{OutputFormat, RunConfig};
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "cavity-raman",
    version,
    about = "Cavity Raman spectroscopy of a single 40Ca+ ion"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Raman line table, effective lines and sideband overlay.
    Lines(CommonArgs),
    /// Polarization-resolved detuning sweep.
    Spectrum(CommonArgs),
    /// Simulated standing-wave scan with sin² fit.
    StandingWave(CommonArgs),
    /// Wave-packet size and visibility conversions.
    Localization(CommonArgs),
    /// Observables of a single steady state.
    SteadyState(CommonArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// TOML configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Worker threads; 0 uses every available core.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Progress and diagnostics on standard error.
    #[arg(long)]
    pub verbose: bool,
}

impl CommonArgs {
    /// The configuration file with command-line flags applied on top.
    pub fn load(&self) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::load(&self.config)?;
        if let Some(output) = &self.output {
            cfg.output = Some(output.clone());
        }
        if let Some(format) = self.format {
            cfg.format = format;
        }
        if let Some(workers) = self.workers {
            cfg.workers = workers;
        }
        if cfg.plot_script.is_some() && (cfg.output.is_none() || cfg.format != OutputFormat::Csv) {
            return Err(CliError::Config(
                "plot_script needs a CSV output file".into(),
            ));
        }
        Ok(cfg)
    }
}

impl Command {
    pub fn args(&self) -> &CommonArgs {
        match self {
            Command::Lines(a)
            | Command::Spectrum(a)
            | Command::StandingWave(a)
            | Command::Localization(a)
            | Command::SteadyState(a) => a,
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let args = cli.command.args();
    let cfg = args.load()?;
    let verbose = args.verbose;
    let out = match &cli.command {
        Command::Lines(_) => commands::cmd_lines(&cfg)?,
        Command::Spectrum(_) => commands::cmd_spectrum(&cfg, verbose)?,
        Command::StandingWave(_) => commands::cmd_standing_wave(&cfg, verbose)?,
        Command::Localization(_) => commands::cmd_localization(&cfg)?,
        Command::SteadyState(_) => commands::cmd_steady_state(&cfg, verbose)?,
    };
    match &cfg.output {
        Some(path) => std::fs::write(path, &out.body)?,
        None => std::io::stdout().lock().write_all(out.body.as_bytes())?,
    }
    if let (Some(path), Some(script)) = (&cfg.plot_script, &out.plot) {
        std::fs::write(path, script)?;
    }
    Ok(())
}
