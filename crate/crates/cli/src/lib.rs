//! Command line front end of the `acoufem` solver.

use std::ffi::OsString;
use std::path::PathBuf;

use acoufem::driver::Overrides;
use clap::{Parser, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LogLevel {
    Error,
    Warn,
    Info,
    Debug,
}

impl LogLevel {
    pub fn filter(self) -> log::LevelFilter {
        match self {
            LogLevel::Error => log::LevelFilter::Error,
            LogLevel::Warn => log::LevelFilter::Warn,
            LogLevel::Info => log::LevelFilter::Info,
            LogLevel::Debug => log::LevelFilter::Debug,
        }
    }
}

/// Finite element solver for the scalar acoustic wave equation.
#[derive(Debug, Clone, PartialEq, Eq, Parser)]
#[command(name = "acoufem", version)]
pub struct Cli {
    /// Simulation file (XML)
    pub config: PathBuf,
    /// Directory for result files [default: the config file's directory]
    #[arg(long, value_name = "DIR")]
    pub output_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = LogLevel::Info)]
    pub log_level: LogLevel,
    /// Worker threads for assembly and frequency sweeps
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub threads: u32,
    /// Check configuration, materials and mesh without solving
    #[arg(long)]
    pub dry_run: bool,
}

impl Cli {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            output_dir: self.output_dir.clone(),
            threads: self.threads as usize,
            dry_run: self.dry_run,
        }
    }
}

/// Parses `argv` (including the program name).
pub fn parse_cli<I, T>(argv: I) -> Result<Cli, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    Cli::try_parse_from(argv)
}
