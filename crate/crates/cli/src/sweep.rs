//! Parameter grids and the parallel sweep runner.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use zenofiber::model::{BranchSystem, UniformParams};
use zenofiber::protocols::{run_on, Engine, ProtocolSpec};

use crate::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AxisName {
    G,
    Lambda,
    Omega1,
    Omega2,
    Omega3,
    /// Sets `lambda = g / value` at the current `g`.
    GOverLambda,
    /// Rescales all drives so that `omega1 = value * g`, keeping their ratios.
    OmegaOverG,
}

impl AxisName {
    const ALL: [AxisName; 7] = [
        AxisName::G,
        AxisName::Lambda,
        AxisName::Omega1,
        AxisName::Omega2,
        AxisName::Omega3,
        AxisName::GOverLambda,
        AxisName::OmegaOverG,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AxisName::G => "g",
            AxisName::Lambda => "lambda",
            AxisName::Omega1 => "omega1",
            AxisName::Omega2 => "omega2",
            AxisName::Omega3 => "omega3",
            AxisName::GOverLambda => "g_over_lambda",
            AxisName::OmegaOverG => "omega_over_g",
        }
    }

    fn apply(self, p: &mut UniformParams, value: f64) -> CliResult<()> {
        match self {
            AxisName::G => p.g = value,
            AxisName::Lambda => p.lambda = value,
            AxisName::Omega1 => p.omega1 = value,
            AxisName::Omega2 => p.omega2 = value,
            AxisName::Omega3 => p.omega3 = value,
            AxisName::GOverLambda => p.lambda = p.g / value,
            AxisName::OmegaOverG => {
                if p.omega1 == 0.0 {
                    return Err(CliError::Usage("omega_over_g needs a nonzero base omega1".into()));
                }
                let scale = value * p.g / p.omega1;
                p.omega1 *= scale;
                p.omega2 *= scale;
                p.omega3 *= scale;
            }
        }
        Ok(())
    }
}

impl fmt::Display for AxisName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One sweep dimension: `count >= 2` points from `start` to `stop`,
/// linearly or geometrically spaced.
#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    pub name: AxisName,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub log: bool,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    return self.stop;
                }
                let t = i as f64 / (n - 1) as f64;
                if self.log {
                    (self.start.ln() + t * (self.stop.ln() - self.start.ln())).exp()
                } else {
                    self.start + t * (self.stop - self.start)
                }
            })
            .collect()
    }
}

impl FromStr for Axis {
    type Err = CliError;

    /// `name=start:stop:count[:log|:lin]`
    fn from_str(s: &str) -> CliResult<Self> {
        let bad = |why: &str| CliError::Usage(format!("axis {s:?}: {why} (expected name=start:stop:count[:log])"));
        let (name, range) = s.split_once('=').ok_or_else(|| bad("missing '='"))?;
        let name = AxisName::ALL
            .into_iter()
            .find(|a| a.as_str() == name.trim())
            .ok_or_else(|| bad("unknown parameter"))?;
        let parts: Vec<&str> = range.split(':').map(str::trim).collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(bad("wrong number of fields"));
        }
        let start: f64 = parts[0].parse().map_err(|_| bad("bad start"))?;
        let stop: f64 = parts[1].parse().map_err(|_| bad("bad stop"))?;
        let count: usize = parts[2].parse().map_err(|_| bad("bad count"))?;
        let log = match parts.get(3) {
            None | Some(&"lin") => false,
            Some(&"log") => true,
            Some(_) => return Err(bad("spacing must be lin or log")),
        };
        if !start.is_finite() || !stop.is_finite() {
            return Err(bad("endpoints must be finite"));
        }
        if count < 2 {
            return Err(bad("count must be at least 2"));
        }
        if log && (start <= 0.0 || stop <= 0.0) {
            return Err(bad("log spacing needs positive endpoints"));
        }
        Ok(Axis { name, start, stop, count, log })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub values: Vec<f64>,
    pub fidelity: f64,
    pub negativity: Option<f64>,
    pub tau: f64,
    /// `|F_effective - F_full|`
    pub engine_gap: f64,
}

/// Grid points in row-major order over `axes` (first axis outermost).
pub fn grid(axes: &[Axis]) -> Vec<Vec<f64>> {
    let mut points: Vec<Vec<f64>> = vec![vec![]];
    for axis in axes {
        let values = axis.values();
        points = points
            .into_iter()
            .flat_map(|p| values.iter().map(move |&v| {
                let mut q = p.clone();
                q.push(v);
                q
            }))
            .collect();
    }
    points
}

fn spec_at(base: &ProtocolSpec, axes: &[Axis], values: &[f64]) -> CliResult<ProtocolSpec> {
    let mut spec = *base;
    for (axis, &v) in axes.iter().zip(values) {
        axis.name.apply(&mut spec.params, v)?;
    }
    spec.validate()
        .map_err(|e| CliError::Usage(format!("grid point {values:?}: {e}")))?;
    Ok(spec)
}

fn evaluate(spec: &ProtocolSpec, values: Vec<f64>) -> CliResult<SweepRow> {
    let sys = BranchSystem::new(spec.params, spec.branch)?;
    let effective = run_on(&spec.with_engine(Engine::Effective), &sys)?;
    let full = run_on(&spec.with_engine(Engine::FullRestricted), &sys)?;
    let chosen = match spec.engine {
        Engine::Effective => &effective,
        Engine::FullRestricted => &full,
    };
    Ok(SweepRow {
        values,
        fidelity: chosen.fidelity,
        negativity: chosen.negativity,
        tau: chosen.tau,
        engine_gap: (effective.fidelity - full.fidelity).abs(),
    })
}

/// Runs every grid point on a pool of `workers` threads. Rows come back in
/// grid order whatever the worker count.
pub fn run_sweep(base: &ProtocolSpec, axes: &[Axis], workers: usize) -> CliResult<Vec<SweepRow>> {
    if axes.is_empty() {
        return Err(CliError::Usage("sweep needs at least one --axis".into()));
    }
    let jobs = grid(axes)
        .into_iter()
        .map(|values| Ok((spec_at(base, axes, &values)?, values)))
        .collect::<CliResult<Vec<_>>>()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {workers} workers: {e}")))?;
    pool.install(|| jobs.into_par_iter().map(|(spec, values)| evaluate(&spec, values)).collect())
}
