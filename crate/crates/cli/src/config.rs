//! Run configuration: a TOML file with `[params]`, `[protocol]`, `[sweep]`,
//! `[compare]` and `[output]` sections, overridden field by field by flags.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use serde::Deserialize;
use zenofiber::model::{Branch, UniformParams};
use zenofiber::protocols::{Engine, Interpretation, ProtocolKind, ProtocolSpec};

use crate::sweep::Axis;
use crate::{CliError, CliResult};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    params: ParamsSection,
    #[serde(default)]
    protocol: ProtocolSection,
    #[serde(default)]
    sweep: SweepSection,
    #[serde(default)]
    compare: CompareSection,
    #[serde(default)]
    output: OutputSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsSection {
    g: Option<f64>,
    lambda: Option<f64>,
    omega1: Option<f64>,
    omega2: Option<f64>,
    omega3: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProtocolSection {
    name: Option<String>,
    branch: Option<String>,
    k: Option<u32>,
    engine: Option<String>,
    interpretation: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepSection {
    axes: Option<Vec<String>>,
    workers: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CompareSection {
    points: Option<usize>,
    span: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    path: Option<PathBuf>,
    format: Option<String>,
}

/// Flags shared by every subcommand. Each one overrides the matching config
/// file entry.
#[derive(Debug, Default, Clone, Args)]
pub struct Overrides {
    /// TOML config file
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub g: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub omega1: Option<f64>,
    #[arg(long)]
    pub omega2: Option<f64>,
    #[arg(long)]
    pub omega3: Option<f64>,
    /// left, right or combined
    #[arg(long)]
    pub branch: Option<String>,
    /// state_transfer, three_dim_entangle, bell_state, swap, ghz, six_dim
    #[arg(long)]
    pub protocol: Option<String>,
    #[arg(long)]
    pub k: Option<u32>,
    /// effective or full_restricted
    #[arg(long)]
    pub engine: Option<String>,
    /// trace, post_select_0 or post_select_1
    #[arg(long)]
    pub interpretation: Option<String>,
    /// Sweep axis `name=start:stop:count[:log]`; repeat for a second axis
    #[arg(long = "axis")]
    pub axes: Vec<String>,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Number of evolution times for `compare`
    #[arg(long)]
    pub points: Option<usize>,
    /// Last evolution time for `compare`, in units of the protocol time
    #[arg(long)]
    pub span: Option<f64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// csv or json
    #[arg(long)]
    pub format: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(CliError::Usage(format!("unknown output format {s:?} (csv or json)"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub spec: ProtocolSpec,
    pub axes: Vec<Axis>,
    pub workers: usize,
    pub compare_points: usize,
    pub compare_span: f64,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

pub fn parse_branch(s: &str) -> CliResult<Branch> {
    match s.trim().to_ascii_lowercase().as_str() {
        "left" | "l" => Ok(Branch::Left),
        "right" | "r" => Ok(Branch::Right),
        "combined" | "both" => Ok(Branch::Combined),
        _ => Err(CliError::Usage(format!("unknown branch {s:?} (left, right, combined)"))),
    }
}

fn usage<T, E: std::fmt::Display>(r: Result<T, E>) -> CliResult<T> {
    r.map_err(|e| CliError::Usage(e.to_string()))
}

fn read_file(path: &Path) -> CliResult<ConfigFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
}

impl RunConfig {
    pub fn resolve(flags: &Overrides) -> CliResult<Self> {
        let file = match &flags.config {
            Some(path) => read_file(path)?,
            None => ConfigFile::default(),
        };
        let pick = |flag: Option<f64>, file: Option<f64>, default: f64| flag.or(file).unwrap_or(default);
        let params = UniformParams::new(
            pick(flags.g, file.params.g, 1.0),
            pick(flags.lambda, file.params.lambda, 1.0),
            pick(flags.omega1, file.params.omega1, 0.01),
            pick(flags.omega2, file.params.omega2, 0.0),
            pick(flags.omega3, file.params.omega3, 0.0),
        );
        usage(params.validate())?;

        let text = |flag: &Option<String>, file: &Option<String>| flag.clone().or_else(|| file.clone());
        let kind = match text(&flags.protocol, &file.protocol.name) {
            Some(s) => usage(s.parse::<ProtocolKind>())?,
            None => ProtocolKind::StateTransfer,
        };
        let branch = match text(&flags.branch, &file.protocol.branch) {
            Some(s) => parse_branch(&s)?,
            None => match kind {
                ProtocolKind::Ghz | ProtocolKind::SixDim => Branch::Combined,
                _ => Branch::Left,
            },
        };
        let engine = match text(&flags.engine, &file.protocol.engine) {
            Some(s) => usage(s.parse::<Engine>())?,
            None => Engine::Effective,
        };
        let interpretation = match text(&flags.interpretation, &file.protocol.interpretation) {
            Some(s) => usage(s.parse::<Interpretation>())?,
            None => Interpretation::default(),
        };
        let k = flags.k.or(file.protocol.k).unwrap_or(1);
        let spec = ProtocolSpec::new(kind, branch, params)
            .with_k(k)
            .with_engine(engine)
            .with_interpretation(interpretation);
        usage(spec.validate())?;

        let axis_text = if flags.axes.is_empty() { file.sweep.axes.unwrap_or_default() } else { flags.axes.clone() };
        let axes = axis_text.iter().map(|s| s.parse::<Axis>()).collect::<CliResult<Vec<_>>>()?;
        if axes.len() > 2 {
            return Err(CliError::Usage(format!("at most two sweep axes, got {}", axes.len())));
        }
        let workers = flags.workers.or(file.sweep.workers).unwrap_or(1);
        if workers == 0 {
            return Err(CliError::Usage("workers must be at least 1".into()));
        }
        let compare_points = flags.points.or(file.compare.points).unwrap_or(11);
        if compare_points < 2 {
            return Err(CliError::Usage("compare needs at least 2 points".into()));
        }
        let compare_span = pick(flags.span, file.compare.span, 1.0);
        if !(compare_span > 0.0) || !compare_span.is_finite() {
            return Err(CliError::Usage(format!("span must be positive, got {compare_span}")));
        }
        let format = match text(&flags.format, &file.output.format) {
            Some(s) => Some(s.parse::<Format>()?),
            None => None,
        };
        Ok(RunConfig {
            spec,
            axes,
            workers,
            compare_points,
            compare_span,
            output: flags.output.clone().or(file.output.path),
            format,
        })
    }
}
