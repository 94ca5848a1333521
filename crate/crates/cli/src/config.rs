use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use tbsg_core::verify::Check;
use tbsg_core::{Algorithm, DEFAULT_EPS};

/// Environment variable overriding the default tolerance.
pub const EPS_ENV: &str = "TBSG_EPS";

#[derive(Debug, Parser)]
#[command(name = "tbsg", version, about = "Equilibria of discounted two-player turn-based stochastic games")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a game and print its equilibrium.
    Solve(SolveArgs),
    /// Generate a random game.
    Gen(GenArgs),
    /// Write the equivalent game with exactly two actions per state.
    Transform(TransformArgs),
    /// Run the invariant suite on a game.
    Verify(VerifyArgs),
    /// Iteration-count sweep over generated games, as CSV.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct Tolerances {
    /// Reduced-cost tolerance before scaling by 1 + max|r| [env: TBSG_EPS] [default: 1e-9]
    #[arg(long)]
    pub eps: Option<f64>,
    /// Maximum number of outer iterations.
    #[arg(long, default_value_t = 100_000)]
    pub max_iters: usize,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "simplex")]
    pub algorithm: Algorithm,
    /// Solution file; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Per-iteration CSV trace.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Start from a seeded random strategy instead of lowest-index actions.
    #[arg(long)]
    pub start_seed: Option<u64>,
    #[command(flatten)]
    pub tol: Tolerances,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub states: usize,
    #[arg(long, default_value_t = 2)]
    pub min_actions: usize,
    #[arg(long, default_value_t = 3)]
    pub max_actions: usize,
    #[arg(long, default_value_t = 0.9)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// One-hot transition rows.
    #[arg(long)]
    pub deterministic: bool,
    /// Give every state to player 1.
    #[arg(long)]
    pub mdp: bool,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub reward_min: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub reward_max: f64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Transformed game; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Sidecar file mapping constructed states to original ones.
    #[arg(long)]
    pub map: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Game file; a generated game is used when omitted.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Checks to run (repeatable); all when omitted.
    #[arg(long = "check")]
    pub checks: Vec<Check>,
    #[arg(long, default_value_t = 4)]
    pub states: usize,
    #[arg(long, default_value_t = 0.9)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub eps: Option<f64>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [3, 5, 8])]
    pub sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 0.9, 0.99])]
    pub gammas: Vec<f64>,
    /// Number of seeds per (size, gamma) cell, starting at 0.
    #[arg(long, default_value_t = 5)]
    pub seeds: u64,
    #[arg(long, value_delimiter = ',', default_values_t = Algorithm::ALL)]
    pub algorithms: Vec<Algorithm>,
    #[arg(long, default_value_t = 2)]
    pub min_actions: usize,
    #[arg(long, default_value_t = 3)]
    pub max_actions: usize,
    /// Write 0 in the wall_ns column so output is reproducible.
    #[arg(long)]
    pub no_timing: bool,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub tol: Tolerances,
}

/// Settings shared by the solving subcommands after flag/env resolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub eps: f64,
    pub max_iters: usize,
}

impl RunConfig {
    /// Flag beats `TBSG_EPS` beats the default.
    pub fn resolve(eps_flag: Option<f64>, max_iters: usize) -> Result<Self, String> {
        let eps = match eps_flag {
            Some(e) => e,
            None => match std::env::var(EPS_ENV) {
                Ok(raw) => raw
                    .trim()
                    .parse()
                    .map_err(|_| format!("{EPS_ENV}=`{raw}` is not a number"))?,
                Err(_) => DEFAULT_EPS,
            },
        };
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(format!("tolerance must be positive, got {eps}"));
        }
        if max_iters == 0 {
            return Err("--max-iters must be at least 1".into());
        }
        Ok(Self { eps, max_iters })
    }
}
