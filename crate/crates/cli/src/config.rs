//! Run configuration: defaults, `--config` JSON file, then command-line flags,
//! in increasing order of precedence.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use treepolymer::cascade::DEFAULT_MAX_DEPTH;
use treepolymer::{critical_beta, Character, DisorderSpec};

use crate::CliError;

pub const DEFAULT_DEPTH: usize = 12;
pub const DEFAULT_REPLICATES: usize = 100;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_PATHS: usize = 100_000;
pub const DEFAULT_R_MIN: f64 = -2.0;
pub const DEFAULT_R_MAX: f64 = 2.0;
pub const DEFAULT_STEPS: usize = 201;
pub const DEFAULT_BIG_N: usize = 20;
pub const DEFAULT_M: usize = 2;
pub const DEFAULT_CHARACTER: &str = "1,2";
pub const DEFAULT_OUT: &str = "treepolymer-out";

/// `beta` values this close to `beta_c` are read as `beta_c` itself, so that
/// decimal renderings such as 1.1774100226 (off by 8.5e-11) select the
/// critical case. Library calls are not snapped.
pub const CRITICAL_SNAP: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Dist {
    Lognormal,
    Twopoint,
    Deterministic,
}

/// Flags shared by every subcommand. All optional so that presence can be
/// told apart from defaults when merging with `--config`.
#[derive(Args, Clone, Debug, Default)]
pub struct Flags {
    /// JSON config file; flags given on the command line override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Weight law as a JSON object, e.g. '{"kind":"lognormal","beta":1.5}'.
    #[arg(long, global = true)]
    pub spec: Option<String>,
    /// Weight family [default: lognormal].
    #[arg(long, value_enum, global = true)]
    pub dist: Option<Dist>,
    /// Lognormal inverse temperature [default: beta_c].
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    /// Two-point small atom a in (0, 1).
    #[arg(long, global = true)]
    pub a: Option<f64>,
    /// Two-point probability P(X = a) in (0, 1).
    #[arg(long, global = true)]
    pub p: Option<f64>,
    /// Tree depth n [default: 12].
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Independent environments [default: 100].
    #[arg(long, global = true)]
    pub replicates: Option<usize>,
    /// Base seed; environment i uses replicate_seed(seed, i) [default: 1].
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Polymer paths sampled per environment [default: 100000].
    #[arg(long, global = true)]
    pub paths: Option<usize>,
    /// Left end of the r grid [default: -2].
    #[arg(long = "r-min", global = true, allow_negative_numbers = true)]
    pub r_min: Option<f64>,
    /// Right end of the r grid [default: 2].
    #[arg(long = "r-max", global = true, allow_negative_numbers = true)]
    pub r_max: Option<f64>,
    /// Number of grid points [default: 201].
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    /// Depth N of the infinite-volume estimate [default: 20].
    #[arg(long = "big-n", global = true)]
    pub big_n: Option<usize>,
    /// Rectangle depth m for `measure` [default: 2].
    #[arg(long, global = true)]
    pub m: Option<usize>,
    /// Character levels for `measure`, e.g. "1,2" [default: 1,2].
    #[arg(long, global = true)]
    pub character: Option<String>,
    /// Comma-separated beta values for `plot` [default: beta_c, 1.5 beta_c, 2 beta_c].
    #[arg(long, global = true, value_delimiter = ',')]
    pub betas: Option<Vec<f64>>,
    /// Overlay ln cosh r on SVG plots.
    #[arg(long = "overlay-weak", global = true)]
    pub overlay_weak: Option<bool>,
    /// Output directory [default: treepolymer-out].
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format [default: csv].
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// Worker threads; 0 means available parallelism [default: 0].
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

/// Contents of a `--config` file. Accepts everything [`RunConfig`]
/// serializes to, plus the flag-style spec fields and `out`/`jobs`.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub command: Option<String>,
    pub spec: Option<DisorderSpec>,
    pub dist: Option<Dist>,
    pub beta: Option<f64>,
    pub a: Option<f64>,
    pub p: Option<f64>,
    pub depth: Option<usize>,
    pub max_depth: Option<usize>,
    pub replicates: Option<usize>,
    pub seed: Option<u64>,
    pub paths: Option<usize>,
    pub r_min: Option<f64>,
    pub r_max: Option<f64>,
    pub steps: Option<usize>,
    pub big_n: Option<usize>,
    pub m: Option<usize>,
    pub character: Option<String>,
    pub betas: Option<Vec<f64>>,
    pub overlay_weak: Option<bool>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::config(format!("bad config {}: {e}", path.display())))
    }
}

/// Fully resolved configuration. This is what output headers embed; it
/// leaves out `out` and `jobs`, which must not change file contents.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub spec: DisorderSpec,
    pub depth: usize,
    pub max_depth: usize,
    pub replicates: usize,
    pub seed: u64,
    pub paths: usize,
    pub r_min: f64,
    pub r_max: f64,
    pub steps: usize,
    pub big_n: usize,
    pub m: usize,
    pub character: String,
    pub betas: Vec<f64>,
    pub overlay_weak: bool,
    pub format: Format,
}

/// Where and how to run; not part of the embedded config.
#[derive(Clone, Debug)]
pub struct Runtime {
    pub out: PathBuf,
    pub jobs: usize,
}

fn snap(spec: DisorderSpec) -> DisorderSpec {
    match spec {
        DisorderSpec::Lognormal { beta } if (beta - critical_beta()).abs() <= CRITICAL_SNAP => DisorderSpec::Lognormal {
            beta: critical_beta(),
        },
        other => other,
    }
}

fn build_spec(dist: Dist, beta: Option<f64>, a: Option<f64>, p: Option<f64>) -> Result<DisorderSpec, CliError> {
    let spec = match dist {
        Dist::Lognormal => DisorderSpec::lognormal(beta.unwrap_or_else(critical_beta)),
        Dist::Twopoint => match (a, p) {
            (Some(a), Some(p)) => DisorderSpec::two_point(a, p),
            _ => return Err(CliError::config("--dist twopoint needs --a and --p")),
        },
        Dist::Deterministic => Ok(DisorderSpec::Deterministic),
    };
    spec.map_err(CliError::from)
}

fn family(spec: DisorderSpec) -> Dist {
    match spec {
        DisorderSpec::Lognormal { .. } => Dist::Lognormal,
        DisorderSpec::TwoPoint { .. } => Dist::Twopoint,
        DisorderSpec::Deterministic => Dist::Deterministic,
    }
}

/// `--spec` wins outright. Otherwise the family comes from `--dist`, the
/// config file, or defaults to lognormal (two-point if only `--a`/`--p` are
/// given), and each parameter flag overrides the file value.
fn resolve_spec(flags: &Flags, file: &FileConfig) -> Result<DisorderSpec, CliError> {
    if let Some(json) = &flags.spec {
        return DisorderSpec::from_json(json).map_err(CliError::from);
    }
    let file_spec = match (file.spec, file.dist) {
        (Some(spec), _) => Some(spec),
        (None, Some(dist)) => Some(build_spec(dist, file.beta, file.a, file.p)?),
        (None, None) => None,
    };
    let implied = if flags.a.is_some() || flags.p.is_some() {
        Dist::Twopoint
    } else {
        Dist::Lognormal
    };
    let dist = flags.dist.or(file_spec.map(family)).unwrap_or(implied);
    let (beta, a, p) = match file_spec {
        Some(DisorderSpec::Lognormal { beta }) => (Some(beta), file.a, file.p),
        Some(DisorderSpec::TwoPoint { a, p }) => (file.beta, Some(a), Some(p)),
        _ => (file.beta, file.a, file.p),
    };
    build_spec(dist, flags.beta.or(beta), flags.a.or(a), flags.p.or(p))
}

pub fn resolve(command: &str, flags: &Flags) -> Result<(RunConfig, Runtime), CliError> {
    let file = match &flags.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    if let Some(c) = &file.command {
        if c != command {
            return Err(CliError::config(format!(
                "config file was written for `{c}`, not `{command}`"
            )));
        }
    }
    let spec = snap(resolve_spec(flags, &file)?);
    let character = flags
        .character
        .clone()
        .or(file.character)
        .unwrap_or_else(|| DEFAULT_CHARACTER.into());
    let character: Character = character.parse().map_err(CliError::from)?;
    let bc = critical_beta();
    let config = RunConfig {
        command: command.to_string(),
        spec,
        depth: flags.depth.or(file.depth).unwrap_or(DEFAULT_DEPTH),
        max_depth: file.max_depth.unwrap_or(DEFAULT_MAX_DEPTH),
        replicates: flags.replicates.or(file.replicates).unwrap_or(DEFAULT_REPLICATES),
        seed: flags.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
        paths: flags.paths.or(file.paths).unwrap_or(DEFAULT_PATHS),
        r_min: flags.r_min.or(file.r_min).unwrap_or(DEFAULT_R_MIN),
        r_max: flags.r_max.or(file.r_max).unwrap_or(DEFAULT_R_MAX),
        steps: flags.steps.or(file.steps).unwrap_or(DEFAULT_STEPS),
        big_n: flags.big_n.or(file.big_n).unwrap_or(DEFAULT_BIG_N),
        m: flags.m.or(file.m).unwrap_or(DEFAULT_M),
        character: character.to_string(),
        betas: flags
            .betas
            .clone()
            .or(file.betas)
            .unwrap_or_else(|| vec![bc, 1.5 * bc, 2.0 * bc]),
        overlay_weak: flags.overlay_weak.or(file.overlay_weak).unwrap_or(true),
        format: flags.format.or(file.format).unwrap_or(Format::Csv),
    };
    if config.depth == 0 {
        return Err(CliError::config("--depth must be >= 1"));
    }
    let runtime = Runtime {
        out: flags.out.clone().or(file.out).unwrap_or_else(|| DEFAULT_OUT.into()),
        jobs: flags.jobs.or(file.jobs).unwrap_or(0),
    };
    Ok((config, runtime))
}

impl RunConfig {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn character(&self) -> Character {
        self.character.parse().expect("validated on resolve")
    }
}
