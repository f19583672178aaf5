//! Command-line grammar.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::config::{
    load_config, Command, Format, Grid, RunConfig, ScenarioArg, Settings, THREADS_ENV,
};
use crate::error::{CliError, Result, EXIT_DOMAIN};
use crate::run::{execute, Artifact};

/// Entanglement harvesting by pairs of Unruh–DeWitt detectors.
///
/// Rates are entered as aσ for accelerated pairs and as 2πTσ for the thermal
/// bath, so `--rate` means the same Unruh temperature for both.
#[derive(Debug, Parser)]
#[command(name = "udw", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// P, |X| and concurrence at one (rate, separation).
    Point,
    /// A row per grid value along separation (given --rate) or rate (given --sep).
    Sweep,
    /// The data and gnuplot script of figure 1 to 5.
    Figure {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=5))]
        id: u8,
    },
    /// Largest separation with concurrence above threshold.
    Lmax,
    /// Separation below which the accelerated pair beats the thermal one.
    Lcrit,
}

#[derive(Debug, Args, Default)]
pub struct Flags {
    #[arg(long, global = true, value_enum)]
    pub scenario: Option<ScenarioArg>,
    /// Energy gap Ωσ.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub gap: Option<f64>,
    /// Coupling λ.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub coupling: Option<f64>,
    /// aσ, or 2πTσ for the thermal bath.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub rate: Option<f64>,
    /// Separation L/σ.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub sep: Option<f64>,
    /// start:stop:step
    #[arg(long, global = true)]
    pub grid: Option<Grid>,
    /// Output file, or directory for `figure`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Relative quadrature tolerance, in (0, 1e-2].
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub tol: Option<f64>,
    /// Worker threads; falls back to UDW_THREADS, then to every core.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// `key = value` file; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

impl Flags {
    fn settings(&self) -> Settings {
        Settings {
            scenario: self.scenario,
            gap: self.gap,
            coupling: self.coupling,
            rate: self.rate,
            sep: self.sep,
            grid: self.grid.clone(),
            out: self.out.clone(),
            format: self.format,
            tol: self.tol,
            threads: self.threads,
        }
    }
}

impl Cmd {
    fn command(&self) -> Command {
        match self {
            Cmd::Point => Command::Point,
            Cmd::Sweep => Command::Sweep,
            Cmd::Figure { id } => Command::Figure(*id),
            Cmd::Lmax => Command::Lmax,
            Cmd::Lcrit => Command::Lcrit,
        }
    }
}

/// Merges the config file, the flags and the environment.
pub fn resolve(cli: &Cli, env_threads: Option<&str>) -> Result<RunConfig> {
    let file = match &cli.flags.config {
        Some(p) => load_config(p)?,
        None => Settings::default(),
    };
    let settings = file.overlay(cli.flags.settings());
    RunConfig::resolve(cli.command.command(), settings, env_threads)
}

/// Everything `args` would produce, without writing it.
pub fn plan<I, T>(args: I) -> Result<Vec<Artifact>>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Usage(e.to_string()))?;
    let env = std::env::var(THREADS_ENV).ok();
    execute(&resolve(&cli, env.as_deref())?)
}

/// Runs the program and returns its exit status.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_DOMAIN,
            };
            let _ = e.print();
            return code;
        }
    };
    let env = std::env::var(THREADS_ENV).ok();
    let outcome = resolve(&cli, env.as_deref())
        .and_then(|cfg| execute(&cfg))
        .and_then(|artifacts| artifacts.iter().try_for_each(Artifact::write));
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("udw: {e}");
            e.exit_code()
        }
    }
}
