//! Command-line front end: `verify`, `trajectory` and `channel`.
//!
//! Exit codes: 0 success, 1 a verification suite failed, 2 usage or
//! configuration error, 3 a channel solve diverged or did not converge.

mod commands;
pub mod config;
pub mod output;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::barycentric::Corner;
use crate::perturbation::EvMode;
use crate::tensor::SymTensor3;
use crate::trajectory::CSV_STEPS;

pub use commands::{run_channel, run_trajectory, run_verify};
pub use config::{CampaignChoice, RunConfig};

/// Overrides `--seed` when set.
pub const SEED_ENV: &str = "EPFKIT_SEED";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
    #[error("verification failed: {}", .0.join(", "))]
    VerifyFailed(Vec<String>),
    #[error("{0}")]
    Solver(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    pub fn csv(path: &Path, source: csv::Error) -> Self {
        CliError::Csv { path: path.to_path_buf(), source }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::VerifyFailed(_) => 1,
            CliError::Solver(_) => 3,
            _ => 2,
        }
    }
}

impl From<crate::error::EpfError> for CliError {
    fn from(e: crate::error::EpfError) -> Self {
        CliError::Config(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "epfkit", version, about = "Reynolds-stress eigenspace perturbation toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the randomized property suites and the tensor fixtures.
    Verify(VerifyArgs),
    /// Write barycentric trajectories of blended or perturbed stresses.
    Trajectory(TrajectoryArgs),
    /// Solve the channel baseline and optional perturbation campaigns.
    Channel(ChannelArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random instances per suite.
    #[arg(long, default_value_t = 10_000)]
    pub instances: usize,
    #[arg(long)]
    pub sequential: bool,
    /// Collapse the 3C corner onto the 1C-2C edge (negative control).
    #[arg(long, hide = true)]
    pub broken_corners: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Pair {
    #[value(name = "AB")]
    Ab,
    #[value(name = "AC")]
    Ac,
    #[value(name = "custom")]
    Custom,
}

#[derive(Debug, Args)]
pub struct TrajectoryArgs {
    #[arg(long, value_enum)]
    pub pair: Pair,
    #[arg(long, default_value_t = CSV_STEPS)]
    pub steps: usize,
    /// Corner to perturb towards (custom pairs only).
    #[arg(long)]
    pub target: Option<Corner>,
    #[arg(long, default_value = "max")]
    pub ev_mode: EvMode,
    /// Source stress `xx,yy,zz,xy,xz,yz` (custom pairs; repeatable). Defaults to plane-strain shear states.
    #[arg(long = "from", value_parser = parse_tensor)]
    pub from: Vec<SymTensor3>,
    /// End stress for a plain blend from a single `--from`.
    #[arg(long, value_parser = parse_tensor)]
    pub to: Option<SymTensor3>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Args)]
pub struct ChannelArgs {
    /// Run configuration (TOML).
    pub config: PathBuf,
    /// Campaign family; overrides `[campaign] kind`.
    #[arg(long, value_enum)]
    pub campaign: Option<CampaignChoice>,
    /// Reference profile with `y_plus,u_plus` columns, copied next to the results.
    #[arg(long)]
    pub dns_overlay: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long)]
    pub sequential: bool,
}

fn parse_tensor(s: &str) -> Result<SymTensor3, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}")))
        .collect::<Result<_, _>>()?;
    let [xx, yy, zz, xy, xz, yz] = v[..] else {
        return Err(format!("expected 6 components xx,yy,zz,xy,xz,yz, got {}", v.len()));
    };
    Ok(SymTensor3::new(xx, yy, zz, xy, xz, yz))
}

/// Runs a parsed command line and reports what it did on stdout.
pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Verify(a) => run_verify(&a),
        Command::Trajectory(a) => run_trajectory(&a),
        Command::Channel(a) => run_channel(&a),
    }
}
