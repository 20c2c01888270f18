//! Run configuration: defaults, the optional `key=value` config file, the
//! output-directory environment variable, and the command-line flags, with
//! precedence flags > environment > file > defaults.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::{CliError, Result};

/// Environment variable that overrides the output directory (still loses
/// to an explicit `--output-dir` flag).
pub const OUTPUT_DIR_ENV: &str = "TRENDHEDGE_OUTPUT_DIR";

/// Trend-following option pricing and tracking-control hedging pipeline.
#[derive(Debug, Parser)]
#[command(name = "trendhedge", version, about, disable_help_subcommand = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Optional config file, one `key=value` per line (keys match the
    /// long flag names in snake_case).
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Daily close CSV to analyze instead of a simulated path.
    #[arg(long, global = true, value_name = "FILE")]
    pub input: Option<PathBuf>,

    /// Sliding window of the trend estimator, in steps.
    #[arg(long, global = true)]
    pub window_trend: Option<usize>,

    /// Degree of the window polynomial.
    #[arg(long, global = true)]
    pub degree: Option<usize>,

    /// Sliding window of the volatility estimator, in steps.
    #[arg(long, global = true)]
    pub vol_window: Option<usize>,

    /// Low-pass smoothing coefficient in (0, 1].
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub alpha: Option<f64>,

    /// Change-point detector threshold.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub cpd_threshold: Option<f64>,

    /// Change-point detector drift.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub cpd_drift: Option<f64>,

    /// Enlarged volatility window applied after a change-point.
    #[arg(long, global = true)]
    pub augmented_window: Option<usize>,

    /// How many steps the enlarged window stays active.
    #[arg(long, global = true)]
    pub hold: Option<usize>,

    /// Annual risk-free rate.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub r: Option<f64>,

    /// Strike offset above the initial trend, in percent.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub k_pct: Option<f64>,

    /// Option maturity, in steps from the start index.
    #[arg(long, global = true)]
    pub maturity: Option<usize>,

    /// First step of the analysis window within the input series.
    #[arg(long, global = true)]
    pub start_index: Option<usize>,

    /// Rebalancing cadence of the hedge, in steps.
    #[arg(long, global = true)]
    pub rebalance_every: Option<usize>,

    /// Seed of the path simulator.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Initial price of the simulated path.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub s0: Option<f64>,

    /// Annual drift of the simulated path.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub mu: Option<f64>,

    /// Annual volatility of the simulated path.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub sigma: Option<f64>,

    /// Number of simulated steps (the path has n_steps + 1 samples).
    #[arg(long, global = true)]
    pub n_steps: Option<usize>,

    /// Persistent jump applied to the simulated path, in percent (e.g. -30
    /// scales every price from jump_index on by 0.7).
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub jump_pct: Option<f64>,

    /// First step affected by the jump.
    #[arg(long, global = true)]
    pub jump_index: Option<usize>,

    /// Directory receiving the output files.
    #[arg(long, global = true, value_name = "DIR")]
    pub output_dir: Option<PathBuf>,
}

/// Pipeline stage to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Write the (possibly jumped) simulated path to path.csv.
    Simulate,
    /// Write the trend decomposition to trend.csv.
    Trend,
    /// Write the volatility pipeline to vol.csv and changepoints.csv.
    Vol,
    /// Write the per-step call quotes to calls.csv.
    Price,
    /// Write the hedging backtests to hedge.csv and metrics.json.
    Hedge,
    /// Run every stage on one shared series.
    All,
}

/// Fully resolved configuration of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Input file; `None` simulates a path instead.
    pub input: Option<PathBuf>,
    /// Sliding window of the trend estimator.
    pub window_trend: usize,
    /// Degree of the window polynomial.
    pub degree: usize,
    /// Sliding window of the volatility estimator.
    pub vol_window: usize,
    /// Low-pass smoothing coefficient.
    pub alpha: f64,
    /// Change-point detector threshold.
    pub cpd_threshold: f64,
    /// Change-point detector drift.
    pub cpd_drift: f64,
    /// Enlarged volatility window after a change-point.
    pub augmented_window: usize,
    /// Steps the enlarged window stays active.
    pub hold: usize,
    /// Annual risk-free rate.
    pub r: f64,
    /// Strike offset above the initial trend, percent.
    pub k_pct: f64,
    /// Option maturity in steps.
    pub maturity: usize,
    /// First analyzed step of the input series.
    pub start_index: usize,
    /// Rebalancing cadence in steps.
    pub rebalance_every: usize,
    /// Simulator seed.
    pub seed: u64,
    /// Simulated initial price.
    pub s0: f64,
    /// Simulated annual drift.
    pub mu: f64,
    /// Simulated annual volatility.
    pub sigma: f64,
    /// Simulated step count.
    pub n_steps: usize,
    /// Persistent jump in percent (0 = none).
    pub jump_pct: f64,
    /// First step affected by the jump.
    pub jump_index: Option<usize>,
    /// Directory receiving output files.
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input: None,
            window_trend: 30,
            degree: 2,
            vol_window: 10,
            alpha: 0.2,
            cpd_threshold: 8.0,
            cpd_drift: 0.5,
            augmented_window: 50,
            hold: 50,
            r: 0.01,
            k_pct: 10.0,
            maturity: 200,
            start_index: 0,
            rebalance_every: 1,
            seed: 42,
            s0: 100.0,
            mu: 0.05,
            sigma: 0.2,
            n_steps: 3000,
            jump_pct: 0.0,
            jump_index: None,
            output_dir: PathBuf::from("."),
        }
    }
}

impl RunConfig {
    /// Resolves the configuration for a parsed command line: defaults,
    /// then the config file (if any), then the environment override, then
    /// the flags.
    pub fn resolve(cli: &Cli) -> Result<Self> {
        let mut config = RunConfig::default();
        if let Some(path) = &cli.config {
            config.apply_file(path)?;
        }
        if let Ok(dir) = std::env::var(OUTPUT_DIR_ENV) {
            if !dir.is_empty() {
                config.output_dir = PathBuf::from(dir);
            }
        }
        config.apply_flags(cli);
        Ok(config)
    }

    fn apply_flags(&mut self, cli: &Cli) {
        macro_rules! take {
            ($($field:ident),* $(,)?) => {
                $(if let Some(value) = cli.$field.clone() {
                    self.$field = value;
                })*
            };
        }
        take!(
            window_trend,
            degree,
            vol_window,
            alpha,
            cpd_threshold,
            cpd_drift,
            augmented_window,
            hold,
            r,
            k_pct,
            maturity,
            start_index,
            rebalance_every,
            seed,
            s0,
            mu,
            sigma,
            n_steps,
            jump_pct,
            output_dir,
        );
        if cli.input.is_some() {
            self.input = cli.input.clone();
        }
        if cli.jump_index.is_some() {
            self.jump_index = cli.jump_index;
        }
    }

    fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        for (line_no, raw_line) in text.lines().enumerate() {
            let line = raw_line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!(
                    "{}:{}: expected key=value, got {line:?}",
                    path.display(),
                    line_no + 1
                ))
            })?;
            self.apply_entry(key.trim(), value.trim())
                .map_err(|message| {
                    CliError::Config(format!("{}:{}: {message}", path.display(), line_no + 1))
                })?;
        }
        Ok(())
    }

    fn apply_entry(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        fn parse<T: std::str::FromStr>(key: &str, value: &str) -> std::result::Result<T, String> {
            value
                .parse()
                .map_err(|_| format!("invalid value {value:?} for key {key:?}"))
        }
        match key {
            "input" => self.input = Some(PathBuf::from(value)),
            "window_trend" => self.window_trend = parse(key, value)?,
            "degree" => self.degree = parse(key, value)?,
            "vol_window" => self.vol_window = parse(key, value)?,
            "alpha" => self.alpha = parse(key, value)?,
            "cpd_threshold" => self.cpd_threshold = parse(key, value)?,
            "cpd_drift" => self.cpd_drift = parse(key, value)?,
            "augmented_window" => self.augmented_window = parse(key, value)?,
            "hold" => self.hold = parse(key, value)?,
            "r" => self.r = parse(key, value)?,
            "k_pct" => self.k_pct = parse(key, value)?,
            "maturity" => self.maturity = parse(key, value)?,
            "start_index" => self.start_index = parse(key, value)?,
            "rebalance_every" => self.rebalance_every = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "s0" => self.s0 = parse(key, value)?,
            "mu" => self.mu = parse(key, value)?,
            "sigma" => self.sigma = parse(key, value)?,
            "n_steps" => self.n_steps = parse(key, value)?,
            "jump_pct" => self.jump_pct = parse(key, value)?,
            "jump_index" => self.jump_index = Some(parse(key, value)?),
            "output_dir" => self.output_dir = PathBuf::from(value),
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }
}
