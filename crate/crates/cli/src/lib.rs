//! Command-line front end for the trend-following pricing and hedging
//! library: configuration resolution, pipeline orchestration, and
//! plot-ready CSV/JSON exports.

use std::path::PathBuf;

pub mod config;
pub mod output;
pub mod pipeline;

use config::{Cli, Command, RunConfig};

/// Errors surfaced by the front end.
#[derive(Debug)]
pub enum CliError {
    /// An error from the analysis library.
    Core(trendhedge::Error),
    /// A configuration problem (bad config file, inconsistent settings).
    Config(String),
    /// An I/O failure on an output path.
    Io {
        /// The file or directory involved.
        path: PathBuf,
        /// The underlying failure.
        source: std::io::Error,
    },
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Config(message) => write!(f, "{message}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

impl std::error::Error for CliError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            CliError::Core(e) => Some(e),
            CliError::Config(_) => None,
            CliError::Io { source, .. } => Some(source),
        }
    }
}

impl From<trendhedge::Error> for CliError {
    fn from(e: trendhedge::Error) -> Self {
        CliError::Core(e)
    }
}

/// Result alias for the front end.
pub type Result<T> = std::result::Result<T, CliError>;

/// The process exit code for an error: 2 flags numeric degeneracy (the
/// configured scenario has no well-defined answer), 1 everything else.
pub fn exit_code(error: &CliError) -> i32 {
    match error {
        CliError::Core(trendhedge::Error::DegenerateInputs)
        | CliError::Core(trendhedge::Error::DegenerateInitialization) => 2,
        _ => 1,
    }
}

/// Resolves the configuration and dispatches the subcommand.
pub fn run(cli: &Cli) -> Result<()> {
    let config = RunConfig::resolve(cli)?;
    match cli.command {
        Command::Simulate => pipeline::cmd_simulate(&config),
        Command::Trend => pipeline::cmd_trend(&config),
        Command::Vol => pipeline::cmd_vol(&config),
        Command::Price => pipeline::cmd_price(&config),
        Command::Hedge => pipeline::cmd_hedge(&config),
        Command::All => pipeline::cmd_all(&config),
    }
}
