//! The `dii` command-line front end.
//!
//! Every data-driven subcommand reads a CSV, resolves its settings
//! (flags, then `--config`, then defaults), validates all inputs, and only
//! then creates the output directory. `manifest.json` is written first and
//! rewritten when the run ends.
//!
//! Exit codes: 0 success, 1 failed check, 2 usage or input error,
//! 3 numerical abort.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

pub use config::{Resolved, Settings};
pub use output::{InputDigest, Manifest};

use crate::DiiError;

/// Largest componentwise relative error `gradcheck` accepts.
pub const GRADCHECK_TOLERANCE: f64 = 1e-5;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Lib(#[from] DiiError),
    #[error("check failed: {0}")]
    Check(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Check(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Lib(e) if e.is_numerical() => 3,
            CliError::Lib(_) => 2,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "dii", version, about = "Feature weighting and selection with the Differentiable Information Imbalance")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Learn feature weights by gradient descent
    Optimize(OptimizeArgs),
    /// Screen a grid of L1 strengths
    Lasso(LassoArgs),
    /// Backward elimination of the smallest weight
    Greedy(PathArgs),
    /// Optimize every feature subset (small inputs only)
    Exhaustive(ExhaustiveArgs),
    /// DII and classic imbalance of given weights
    Eval(EvalArgs),
    /// Train on one block, validate on the others
    Crossval(CrossvalArgs),
    /// Write a synthetic benchmark dataset
    Generate(GenerateArgs),
    /// Compare the analytic gradient with finite differences
    Gradcheck(GradcheckArgs),
}

#[derive(Args, Debug)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub settings: Settings,
}

#[derive(Args, Debug)]
pub struct PathArgs {
    #[command(flatten)]
    pub settings: Settings,
}

#[derive(Args, Debug)]
pub struct LassoArgs {
    #[command(flatten)]
    pub settings: Settings,
    /// Comma-separated L1 strengths (default: 24 values from 1e-6 to 1e-1)
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
}

#[derive(Args, Debug)]
pub struct ExhaustiveArgs {
    #[command(flatten)]
    pub settings: Settings,
    /// Refuse inputs with more features than this
    #[arg(long, default_value_t = crate::sparsify::EXHAUSTIVE_MAX_FEATURES)]
    pub max_features: usize,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[command(flatten)]
    pub settings: Settings,
    /// Comma-separated weights, or a CSV (`feature,best` columns as written
    /// by `optimize`, or one row under feature-name headers)
    #[arg(long)]
    pub weights: Option<String>,
}

#[derive(Args, Debug)]
pub struct CrossvalArgs {
    #[command(flatten)]
    pub settings: Settings,
    #[arg(long, default_value_t = 4)]
    pub blocks: usize,
    /// Keep every `stride`-th point of each block
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[arg(long, value_parser = ["gaussian", "monomial"])]
    pub benchmark: String,
    #[arg(long, default_value_t = 1500)]
    pub n: usize,
    /// Gaussian: ground-truth weights, one per feature
    #[arg(long, value_delimiter = ',')]
    pub gt_weights: Option<Vec<f64>>,
    /// Monomial: number of base Gaussian variables
    #[arg(long, default_value_t = 10)]
    pub base_features: usize,
    /// Monomial: highest total degree
    #[arg(long, default_value_t = 3)]
    pub order: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct GradcheckArgs {
    #[arg(long, default_value_t = 20)]
    pub instances: usize,
    #[arg(long, default_value_t = 100)]
    pub points: usize,
    #[arg(long, default_value_t = 10)]
    pub features: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Check a deliberately broken gradient instead (diagnostic)
    #[arg(long, hide = true, value_parser = ["sign-flip"])]
    pub mutate: Option<String>,
}

fn init_logging() {
    let env = env_logger::Env::new().filter_or("DII_LOG", "warn");
    let _ = env_logger::Builder::from_env(env)
        .format_timestamp(None)
        .try_init();
}

/// Parses `args` and runs the command. Returns the exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    init_logging();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match commands::dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os()))
}
