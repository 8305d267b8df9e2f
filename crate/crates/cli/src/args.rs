use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ncdegree::bounds::OptimizerConfig;
use ncdegree::Direction;
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "ncdegree", version, about = "Bounds on the degree of nonclassicality of quantum states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimal variance of x(0)² over r-term cat-like superpositions, r = 1..max-r.
    Table1(Table1Args),
    /// Maximal fidelity of a pure state with r-term coherent superpositions.
    PureBound(PureBoundArgs),
    /// Compare a measured expectation value against a bound family.
    Certify(CertifyArgs),
    /// Single bound for an observable spec.
    Bound(BoundArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    Inf,
    Sup,
}

impl From<DirectionArg> for Direction {
    fn from(d: DirectionArg) -> Self {
        match d {
            DirectionArg::Inf => Direction::Inf,
            DirectionArg::Sup => Direction::Sup,
        }
    }
}

/// Overrides applied on top of the per-rank optimizer defaults.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize)]
pub struct OptimizerArgs {
    /// Base seed for the multi-start optimizer.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of random starts per rank (default 16 for r ≤ 4, 48 above).
    #[arg(long)]
    pub starts: Option<usize>,
    #[arg(long)]
    pub max_iterations: Option<usize>,
    #[arg(long)]
    pub init_radius: Option<f64>,
    /// Add starts with amplitudes spread along a line in phase space.
    #[arg(long)]
    pub line_init: bool,
}

impl OptimizerArgs {
    pub fn config_for_rank(&self, r: usize) -> OptimizerConfig {
        let mut config = OptimizerConfig::for_rank(r);
        self.apply(&mut config);
        config
    }

    pub fn base_config(&self) -> OptimizerConfig {
        let mut config = OptimizerConfig::default();
        self.apply(&mut config);
        config
    }

    fn apply(&self, config: &mut OptimizerConfig) {
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(n) = self.starts {
            config.n_starts = n;
        }
        if let Some(n) = self.max_iterations {
            config.max_iterations = n;
        }
        if let Some(radius) = self.init_radius {
            config.init_radius = radius;
        }
        config.heuristic_line_init |= self.line_init;
    }

    pub fn seed(&self) -> u64 {
        self.base_config().seed
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Args)]
pub struct Table1Args {
    #[arg(long, default_value_t = 5)]
    pub max_r: usize,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct PureBoundArgs {
    /// State spec file (JSON).
    #[arg(long, conflicts_with = "state")]
    pub spec: Option<PathBuf>,
    /// Inline state spec (JSON).
    #[arg(long)]
    pub state: Option<String>,
    /// Comma-separated list of ranks.
    #[arg(long, default_value = "1", value_delimiter = ',')]
    pub r: Vec<usize>,
    /// Sweep of beta (compass/cat) or |xi| (squeezed): `start:stop:count` or a comma list.
    #[arg(long)]
    pub sweep: Option<String>,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CertifyArgs {
    /// Observable spec file; defaults to x(0)².
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "inf")]
    pub direction: DirectionArg,
    /// Measured expectation value.
    #[arg(long, conflicts_with = "db", required_unless_present = "db")]
    pub value: Option<f64>,
    /// Measured squeezing in dB below vacuum; converted to variance 10^(−dB/10).
    #[arg(long, allow_negative_numbers = true)]
    pub db: Option<f64>,
    #[arg(long)]
    pub std_error: Option<f64>,
    #[arg(long, default_value_t = 9)]
    pub max_r: usize,
    /// Fail instead of optimizing when the cache lacks bounds.
    #[arg(long)]
    pub no_recompute: bool,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BoundArgs {
    /// Observable spec file.
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long)]
    pub r: usize,
    #[arg(long, value_enum, default_value = "inf")]
    pub direction: DirectionArg,
    /// Number of modes; must match the spec when given.
    #[arg(long)]
    pub modes: Option<usize>,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}
