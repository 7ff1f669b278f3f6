//! The `didpr` command-line interface.
//!
//! Every subcommand prints one JSON object to standard output and reports
//! failures on standard error. Exit codes: 0 success, 1 runtime failure,
//! 2 invalid usage or configuration, 3 unattainable targets or conditioning.

mod commands;
pub mod config;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::assort::{AssortProfile, TypePair};
use crate::eta::EtaMethod;
use config::{IntervalSpec, RewiringArgs, SweepSpec};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    /// Targets or conditioning outside the attainable region, with optional
    /// guidance (computed bounds) as JSON.
    Unattainable {
        message: String,
        guidance: Option<serde_json::Value>,
    },
    Lib(crate::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(crate::Error::InvalidParam(_)) | CliError::Config(_) => 2,
            CliError::Lib(crate::Error::ConditioningUnattainable) | CliError::Unattainable { .. } => 3,
            CliError::Io(_) | CliError::Lib(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Unattainable { message, .. } => write!(f, "unattainable: {message}"),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        CliError::Lib(e)
    }
}

#[derive(Debug, Parser)]
#[command(name = "didpr", version, about = "Directed assortativity, attainability bounds and degree-preserving rewiring")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate ER or DPA graphs as edge lists.
    Generate(GenerateArgs),
    /// Print the four assortativity coefficients of a graph.
    Assort(AssortArgs),
    /// Attainable range of each coefficient, optionally conditioned.
    Bounds(BoundsArgs),
    /// Solve for a target edge mix matrix.
    SolveEta(SolveEtaArgs),
    /// Rewire graphs toward target assortativity.
    Rewire(RewireArgs),
    /// Fit DPA parameters to a graph.
    Fit(FitArgs),
    /// Attribute assortativity change during rewiring of DPA graphs to edge scenarios.
    ScenarioGains(ScenarioGainsArgs),
    /// Average rewiring traces across replicates.
    Aggregate(AggregateArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(subcommand)]
    pub model: Option<ModelArgs>,
    /// JSON configuration; flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Base seed (falls back to DIDPR_SEED, then 0); replicate k uses seed + k.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub replicates: Option<usize>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum ModelArgs {
    /// Erdős–Rényi with self-loops: every ordered pair independently with probability p.
    Er {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        p: Option<f64>,
    },
    /// Directed preferential attachment. Omitted probabilities share the remainder equally.
    Dpa(DpaArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct DpaArgs {
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Sets both offsets.
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub delta_in: Option<f64>,
    #[arg(long)]
    pub delta_out: Option<f64>,
    /// Edges added after the seed self-loop.
    #[arg(long)]
    pub edges: Option<usize>,
    /// Take α, β, γ and the offsets from a `fit` result.
    #[arg(long, conflicts_with_all = ["alpha", "beta", "gamma", "delta", "delta_in", "delta_out"])]
    pub from_fit: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AssortArgs {
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Edge-list file; repeat for replicate graphs.
    #[arg(long = "graph")]
    pub graphs: Vec<PathBuf>,
    /// Conditioning order, e.g. 11,12,21,22.
    #[arg(long, value_delimiter = ',', value_parser = config::parse_pair)]
    pub order: Vec<TypePair>,
    /// Fixed interval PAIR=L:U (or PAIR=V); repeatable.
    #[arg(long = "interval", value_parser = config::parse_interval, allow_hyphen_values = true)]
    pub intervals: Vec<IntervalSpec>,
    /// Singleton conditioning sweep: PAIR=V1,V2,... or PAIR=START:STOP:STEP.
    #[arg(long, value_parser = config::parse_sweep, allow_hyphen_values = true)]
    pub sweep: Option<SweepSpec>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveEtaArgs {
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// r11,r12,r21,r22
    #[arg(long, value_parser = config::parse_targets, allow_hyphen_values = true)]
    pub targets: Option<AssortProfile>,
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RewireArgs {
    /// Edge-list file; repeat for replicate graphs.
    #[arg(long = "graph")]
    pub graphs: Vec<PathBuf>,
    /// r11,r12,r21,r22
    #[arg(long, value_parser = config::parse_targets, allow_hyphen_values = true)]
    pub targets: Option<AssortProfile>,
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    #[command(flatten)]
    pub rewiring: RewiringArgs,
    /// Independent chains per graph.
    #[arg(long)]
    pub replicates: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Number of largest polar radii used for the tail angles.
    #[arg(long)]
    pub n_tail: Option<usize>,
    /// Intervals of the α grid on [0, 1 - β̂].
    #[arg(long)]
    pub alpha_grid: Option<usize>,
    #[arg(long)]
    pub sims_per_alpha: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScenarioGainsArgs {
    #[command(flatten)]
    pub dpa: DpaArgs,
    /// r11,r12,r21,r22
    #[arg(long, value_parser = config::parse_targets, allow_hyphen_values = true)]
    pub targets: Option<AssortProfile>,
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    #[command(flatten)]
    pub rewiring: RewiringArgs,
    #[arg(long)]
    pub replicates: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AggregateArgs {
    /// Trace CSV files.
    #[arg(long = "input")]
    pub inputs: Vec<PathBuf>,
    /// Output CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum MethodArg {
    MaxEntropy,
    AnalyticCenter,
    Vertex,
}

impl From<MethodArg> for EtaMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::MaxEntropy => EtaMethod::MaxEntropy,
            MethodArg::AnalyticCenter => EtaMethod::AnalyticCenter,
            MethodArg::Vertex => EtaMethod::Vertex,
        }
    }
}

/// Runs one parsed command, returning its JSON summary.
pub fn run(cli: Cli) -> Result<serde_json::Value, CliError> {
    match cli.command {
        Command::Generate(a) => commands::generate(a),
        Command::Assort(a) => commands::assort(a),
        Command::Bounds(a) => commands::bounds(a),
        Command::SolveEta(a) => commands::solve_eta(a),
        Command::Rewire(a) => commands::rewire(a),
        Command::Fit(a) => commands::fit(a),
        Command::ScenarioGains(a) => commands::scenario_gains(a),
        Command::Aggregate(a) => commands::aggregate(a),
    }
}

/// Entry point of the `didpr` binary.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(summary) => {
            println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("didpr: {e}");
            if let CliError::Unattainable { guidance: Some(g), .. } = &e {
                eprintln!("{}", serde_json::to_string_pretty(g).expect("guidance serializes"));
            }
            ExitCode::from(e.exit_code())
        }
    }
}
