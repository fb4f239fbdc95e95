//! Command-line grammar. Positional numbers and `--config` are interchangeable.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::{CliError, Command, FigureKind, Format, RunConfig};
use dmbc_core::channel::ChannelDistribution;

#[derive(Debug, Parser)]
#[command(name = "dmbc", version, about = "DoF bounds, schemes and verification for the two-user MIMO broadcast channel")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Outer bound, its vertices and the achievable hull for M N1 N2 k.
    Region { values: Vec<usize> },
    /// Sum-DoF bounds for k = 0..=M at fixed M N1 N2.
    SweepK { values: Vec<usize> },
    /// Sum-DoF bounds over N2 with N1 = M - N2, at fixed M k.
    SweepN2 { values: Vec<usize> },
    /// Build the selected scheme for M N1 N2 k, certify it and check CSIT compliance.
    Simulate { values: Vec<usize> },
    /// Write figure datasets as CSV into the --out directory.
    Figure { which: FigureArg },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FigureArg {
    Fig2,
    Fig3,
    Fig4,
    All,
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
pub enum FormatArg {
    Csv,
    #[default]
    Json,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Comma-separated configuration, e.g. 4,1,3,2.
    #[arg(long, global = true)]
    pub config: Option<String>,
    /// Output file (directory for `figure`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Json, global = true)]
    pub format: FormatArg,
    #[arg(long, default_value_t = 1, global = true)]
    pub seed: u64,
    #[arg(long, default_value_t = 50, global = true)]
    pub trials: usize,
    /// Comma-separated SNR points in dB; enables the rate slope fit.
    #[arg(long, global = true)]
    pub snr: Option<String>,
    /// Use the (6,3,3,1) construction where it applies.
    #[arg(long, global = true)]
    pub special_cases: bool,
    /// Run the verifier on every row of sweeps and figures.
    #[arg(long, global = true)]
    pub certify: bool,
    #[arg(long, default_value_t = 0.1, global = true)]
    pub delta_min: f64,
    #[arg(long, default_value_t = 1.0, global = true)]
    pub delta_max: f64,
}

pub fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(|p| p.trim().parse::<T>().map_err(|_| CliError::Invalid(format!("bad {what} entry {p:?}"))))
        .collect()
}

impl Cli {
    pub fn into_run_config(self) -> Result<RunConfig, CliError> {
        let c = self.common;
        let (command, positional) = match self.command {
            Sub::Region { values } => (Command::Region, values),
            Sub::SweepK { values } => (Command::SweepK, values),
            Sub::SweepN2 { values } => (Command::SweepN2, values),
            Sub::Simulate { values } => (Command::Simulate, values),
            Sub::Figure { which } => {
                let kind = match which {
                    FigureArg::Fig2 => FigureKind::Fig2,
                    FigureArg::Fig3 => FigureKind::Fig3,
                    FigureArg::Fig4 => FigureKind::Fig4,
                    FigureArg::All => FigureKind::All,
                };
                (Command::Figure(kind), Vec::new())
            }
        };
        let values = match (&c.config, positional.is_empty()) {
            (Some(_), false) => return Err(CliError::Invalid("give the configuration either positionally or via --config".into())),
            (Some(s), true) => parse_list(s, "config")?,
            (None, _) => positional,
        };
        let snr_db = c.snr.as_deref().map(|s| parse_list::<f64>(s, "snr")).transpose()?;
        let distribution = ChannelDistribution::new(c.delta_min, c.delta_max)?;
        let rc = RunConfig {
            command,
            values,
            format: match c.format {
                FormatArg::Csv => Format::Csv,
                FormatArg::Json => Format::Json,
            },
            seed: c.seed,
            trials: c.trials,
            snr_db,
            special_cases: c.special_cases,
            certify: c.certify,
            distribution,
            out: c.out,
        };
        rc.validate()?;
        Ok(rc)
    }
}
