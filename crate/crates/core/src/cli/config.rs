//! Effective run configurations. Each subcommand's configuration can be read
//! from a JSON file (`--config`), overridden by flags, and is echoed into the
//! output directory so the run can be repeated from the echo alone.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::assort::{AssortProfile, TypePair};
use crate::eta::EtaMethod;
use crate::fit::FitOptions;
use crate::rewire::RewiringConfig;

use super::CliError;

pub const SEED_ENV: &str = "DIDPR_SEED";

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn echo<T: Serialize>(cfg: &T, out_dir: &Path, command: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::Io(format!("{}: {e}", out_dir.display())))?;
    let path = out_dir.join(format!("{command}.config.json"));
    let text = serde_json::to_string_pretty(cfg).expect("configs serialize");
    std::fs::write(&path, text + "\n").map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(path)
}

/// Flag, then config file, then `DIDPR_SEED`, then 0.
pub fn resolve_seed(flag: Option<u64>, file: Option<u64>) -> Result<u64, CliError> {
    if let Some(s) = flag.or(file) {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

pub fn parse_targets(s: &str) -> Result<AssortProfile, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("bad target value {t:?}")))
        .collect::<Result<_, _>>()?;
    match v.as_slice() {
        &[a, b, c, d] => Ok(AssortProfile::new(a, b, c, d)),
        _ => Err(format!("expected four comma-separated values r11,r12,r21,r22, got {}", v.len())),
    }
}

pub fn parse_pair(s: &str) -> Result<TypePair, String> {
    s.parse::<TypePair>().map_err(|e| e.to_string())
}

/// `PAIR=L:U`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntervalSpec {
    pub pair: TypePair,
    pub lower: f64,
    pub upper: f64,
}

pub fn parse_interval(s: &str) -> Result<IntervalSpec, String> {
    let (pair, range) = s.split_once('=').ok_or_else(|| format!("expected PAIR=L:U, got {s:?}"))?;
    let pair: TypePair = pair.parse().map_err(|e: crate::Error| e.to_string())?;
    let (lo, hi) = range.split_once(':').unwrap_or((range, range));
    let lower = lo.trim().parse::<f64>().map_err(|_| format!("bad lower bound {lo:?}"))?;
    let upper = hi.trim().parse::<f64>().map_err(|_| format!("bad upper bound {hi:?}"))?;
    if lower > upper {
        return Err(format!("interval lower {lower} exceeds upper {upper}"));
    }
    Ok(IntervalSpec { pair, lower, upper })
}

/// `PAIR=V1,V2,...` or `PAIR=START:STOP:STEP`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub pair: TypePair,
    pub values: Vec<f64>,
}

pub fn parse_sweep(s: &str) -> Result<SweepSpec, String> {
    let (pair, rest) = s.split_once('=').ok_or_else(|| format!("expected PAIR=VALUES, got {s:?}"))?;
    let pair: TypePair = pair.parse().map_err(|e: crate::Error| e.to_string())?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("bad number {t:?}"));
    let parts: Vec<&str> = rest.split(':').collect();
    let values = match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
            if !(step > 0.0) || stop < start {
                return Err(format!("bad range {rest:?}"));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize;
            // Rounded so that e.g. -0.9:0.9:0.1 yields 0 exactly.
            (0..=count)
                .map(|k| ((start + k as f64 * step) * 1e12).round() / 1e12)
                .collect()
        }
        [list] => list.split(',').map(num).collect::<Result<_, _>>()?,
        _ => return Err(format!("expected comma list or START:STOP:STEP, got {rest:?}")),
    };
    Ok(SweepSpec { pair, values })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum GraphModel {
    Er {
        n: usize,
        p: f64,
    },
    Dpa {
        alpha: f64,
        beta: f64,
        gamma: f64,
        delta_in: f64,
        delta_out: f64,
        edges: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateConfig {
    pub model: GraphModel,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "one")]
    pub replicates: usize,
    #[serde(default = "here")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssortConfig {
    pub graph: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsConfig {
    pub graphs: Vec<PathBuf>,
    #[serde(default = "all_pairs")]
    pub order: Vec<TypePair>,
    #[serde(default)]
    pub intervals: Vec<IntervalSpec>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default = "here")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveEtaConfig {
    pub graph: PathBuf,
    pub targets: AssortProfile,
    #[serde(default)]
    pub method: EtaMethod,
    #[serde(default = "here")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RewireConfig {
    pub graphs: Vec<PathBuf>,
    pub targets: AssortProfile,
    #[serde(default)]
    pub method: EtaMethod,
    #[serde(default)]
    pub rewiring: RewiringConfig,
    /// Independent chains per input graph.
    #[serde(default = "one")]
    pub replicates: usize,
    /// Base seed; replicate `k` uses `seed + k`.
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "here")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    pub graph: PathBuf,
    pub n_tail: usize,
    #[serde(default)]
    pub options: FitOptions,
    /// Seed for the simulations behind the α search.
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "here")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioGainsConfig {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta_in: f64,
    pub delta_out: f64,
    pub edges: usize,
    pub targets: AssortProfile,
    #[serde(default)]
    pub method: EtaMethod,
    #[serde(default)]
    pub rewiring: RewiringConfig,
    #[serde(default = "one")]
    pub replicates: usize,
    /// Base seed; replicate `k` uses `seed + k`.
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "here")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AggregateConfig {
    pub inputs: Vec<PathBuf>,
    pub out: PathBuf,
}

fn one() -> usize {
    1
}

fn here() -> PathBuf {
    PathBuf::from(".")
}

fn all_pairs() -> Vec<TypePair> {
    TypePair::ALL.to_vec()
}

/// Missing probabilities share what the given ones leave, so `--beta 0.1`
/// alone means `α = γ = 0.45`.
pub fn complete_probabilities(alpha: Option<f64>, beta: Option<f64>, gamma: Option<f64>) -> Result<[f64; 3], CliError> {
    let given = [alpha, beta, gamma];
    let known: f64 = given.iter().flatten().sum();
    let missing = given.iter().filter(|p| p.is_none()).count();
    if missing == 3 {
        return Err(CliError::Config("give at least one of --alpha, --beta, --gamma".into()));
    }
    let share = if missing > 0 { (1.0 - known) / missing as f64 } else { 0.0 };
    Ok(given.map(|p| p.unwrap_or(share)))
}

/// Rewiring flags that override a base configuration.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct RewiringArgs {
    /// Number of proposed swaps.
    #[arg(long)]
    pub steps: Option<u64>,
    /// Steps between trace checkpoints.
    #[arg(long)]
    pub checkpoint_every: Option<u64>,
    /// Per-coefficient tolerance for early stopping and reporting.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Stop at the first checkpoint within tolerance of every target.
    #[arg(long)]
    pub stop_early: bool,
}

impl RewiringArgs {
    pub fn apply(&self, cfg: &mut RewiringConfig) {
        if let Some(v) = self.steps {
            cfg.max_steps = v;
        }
        if let Some(v) = self.checkpoint_every {
            cfg.checkpoint_every = v;
        }
        if let Some(v) = self.tolerance {
            cfg.tolerance = v;
        }
        if self.stop_early {
            cfg.stop_early = true;
        }
    }
}
