//! The five subcommands. Each returns the text for standard output and
//! writes its data file when an output path is configured.

use serde::{Deserialize, Serialize};
use zenofiber::dynamics::{compare_full_vs_effective, solve_timing, ComparisonReport};
use zenofiber::linalg::Spectrum;
use zenofiber::model::{Branch, BranchSystem, UniformParams};
use zenofiber::protocols::{run_on, Engine, Interpretation, ProtocolKind, ProtocolResult, ProtocolSpec};
use zenofiber::statespace::{StateVector, SPECTRAL_TOL};
use zenofiber::zeno::{analytic_dark_bright, compare_formula_bright, decompose, max_principal_angle};

use crate::config::{Format, RunConfig};
use crate::output::{csv, num, opt_num, sweep_csv, write_atomic};
use crate::sweep::run_sweep;
use crate::{CliError, CliResult};

fn system(cfg: &RunConfig) -> CliResult<BranchSystem> {
    Ok(BranchSystem::new(cfg.spec.params, cfg.spec.branch)?)
}

fn emit(cfg: &RunConfig, default: Format, csv_text: impl FnOnce() -> String, json: impl FnOnce() -> CliResult<String>) -> CliResult<Option<String>> {
    let text = match cfg.format.unwrap_or(default) {
        Format::Csv => csv_text(),
        Format::Json => json()?,
    };
    match &cfg.output {
        Some(path) => {
            write_atomic(path, text.as_bytes())?;
            Ok(None)
        }
        None => Ok(Some(text)),
    }
}

fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Usage(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub index: usize,
    pub numeric: f64,
    pub predicted: f64,
    pub residual: f64,
}

/// Sorted eigenvalues of the strong Hamiltonian on the branch space next to
/// `{0, 0, 0, +-g, +-g chi}` (twice over for the combined branch).
pub fn spectrum_rows(sys: &BranchSystem) -> CliResult<Vec<SpectrumRow>> {
    let p = sys.params();
    let numeric = Spectrum::hermitian(sys.parts().strong.entries(), 1e-12)?.values;
    let gc = p.g * p.chi();
    let mut predicted: Vec<f64> = sys
        .branch()
        .sides()
        .iter()
        .flat_map(|_| [0.0, 0.0, 0.0, p.g, -p.g, gc, -gc])
        .collect();
    predicted.sort_by(f64::total_cmp);
    if predicted.len() != numeric.len() {
        return Err(CliError::Numerical(zenofiber::Error::Dimension(format!(
            "{} eigenvalues for {} predictions",
            numeric.len(),
            predicted.len()
        ))));
    }
    Ok(numeric
        .iter()
        .zip(&predicted)
        .enumerate()
        .map(|(index, (&n, &e))| SpectrumRow { index, numeric: n, predicted: e, residual: (n - e).abs() })
        .collect())
}

pub fn spectrum(cfg: &RunConfig) -> CliResult<String> {
    let sys = system(cfg)?;
    let rows = spectrum_rows(&sys)?;
    let header = ["index", "numeric", "predicted", "residual"].map(String::from);
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| vec![r.index.to_string(), num(r.numeric), num(r.predicted), num(r.residual)])
        .collect();
    let table = csv(&header, &body);
    let worst = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    let mut out = match emit(cfg, Format::Csv, || table.clone(), || to_json(&rows))? {
        Some(text) => text,
        None => table,
    };
    out.push_str(&format!("chi = {}\nmax residual = {}\n", num(sys.params().chi()), num(worst)));
    Ok(out)
}

fn describe(state: &StateVector) -> String {
    let space = state.space();
    state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm() > 1e-15)
        .map(|(i, z)| format!("({:+.6}{:+.6}i) {}", z.re, z.im, space.label(space.state(i))))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn darkstates(cfg: &RunConfig) -> CliResult<String> {
    let sys = system(cfg)?;
    let basis = analytic_dark_bright(&sys)?;
    let strong = &sys.parts().strong;
    let mut out = format!("branch {:?}, chi = {}\n\ndark states (analytic):\n", sys.branch(), num(basis.chi));
    for (i, d) in basis.dark.iter().enumerate() {
        let residual = strong.apply(d)?.norm();
        out.push_str(&format!("  D{i}: |H_strong D| = {}\n      {}\n", num(residual), describe(d)));
    }
    let dec = decompose(strong, None)?;
    let numeric: Vec<_> = dec.zero_cluster().map(|c| c.vectors.clone()).unwrap_or_default();
    let analytic: Vec<_> = basis.dark.iter().map(|d| d.amplitudes().clone()).collect();
    out.push_str(&format!(
        "numeric zero cluster: dimension {}, largest principal angle to analytic span = {}\n\nbright states (numeric):\n",
        numeric.len(),
        num(max_principal_angle(&analytic, &numeric))
    ));
    for b in &basis.bright {
        let residual = strong.apply(&b.state)?.add(&b.state.scaled((-b.eigenvalue).into()))?.norm();
        out.push_str(&format!(
            "  {:?} {:?}: E = {} (predicted {}), eigen-residual {}\n      {}\n",
            b.label,
            b.parity,
            num(b.eigenvalue),
            num(b.label.predicted(sys.params())),
            num(residual),
            describe(&b.state)
        ));
    }
    out.push_str("\nclosed-form bright states vs numeric eigenvectors:\n");
    for row in compare_formula_bright(&sys, &basis)? {
        out.push_str(&format!(
            "  {:?} {:?}: formula norm {}, residual {}, overlap {}\n",
            row.side,
            row.label,
            num(row.formula_norm),
            num(row.residual),
            num(row.overlap)
        ));
    }
    Ok(out)
}

/// JSON record of one protocol run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolRecord {
    pub name: ProtocolKind,
    pub branch: Branch,
    pub params: UniformParams,
    pub k: u32,
    pub engine: Engine,
    pub interpretation: Interpretation,
    pub tau: f64,
    pub fidelity: f64,
    pub negativity: Option<f64>,
    pub success_probability: Option<f64>,
    pub flags: Vec<String>,
    pub zeno_ratio: f64,
}

impl ProtocolRecord {
    pub fn from_result(r: &ProtocolResult) -> Self {
        ProtocolRecord {
            name: r.spec.kind,
            branch: r.spec.branch,
            params: r.spec.params,
            k: r.spec.k,
            engine: r.spec.engine,
            interpretation: r.spec.interpretation,
            tau: r.tau,
            fidelity: r.fidelity,
            negativity: r.negativity,
            success_probability: r.success_probability,
            flags: r.flags.clone(),
            zeno_ratio: r.zeno_ratio,
        }
    }

    pub fn spec(&self) -> ProtocolSpec {
        ProtocolSpec::new(self.name, self.branch, self.params)
            .with_k(self.k)
            .with_engine(self.engine)
            .with_interpretation(self.interpretation)
    }
}

pub fn protocol(cfg: &RunConfig) -> CliResult<String> {
    let sys = system(cfg)?;
    let result = run_on(&cfg.spec, &sys)?;
    let record = ProtocolRecord::from_result(&result);
    let json = to_json(&record)?;
    let mut out = format!(
        "{} on {:?} branch, {} engine, k = {}\n  tau = {}\n  fidelity = {}\n  negativity = {}\n",
        record.name,
        record.branch,
        record.engine,
        record.k,
        num(record.tau),
        num(record.fidelity),
        opt_num(record.negativity)
    );
    if let Some(p) = record.success_probability {
        out.push_str(&format!("  success probability ({}) = {}\n", record.interpretation, num(p)));
    }
    out.push_str(&format!("  zeno ratio = {}\n", num(record.zeno_ratio)));
    for flag in &record.flags {
        out.push_str(&format!("  warning: {flag}\n"));
    }
    match &cfg.output {
        Some(path) => write_atomic(path, json.as_bytes())?,
        None => out.push_str(&json),
    }
    Ok(out)
}

pub fn sweep(cfg: &RunConfig) -> CliResult<String> {
    let rows = run_sweep(&cfg.spec, &cfg.axes, cfg.workers)?;
    #[derive(Serialize)]
    struct Doc<'a> {
        axes: Vec<&'static str>,
        rows: &'a [crate::sweep::SweepRow],
    }
    let doc = Doc { axes: cfg.axes.iter().map(|a| a.name.as_str()).collect(), rows: &rows };
    Ok(emit(cfg, Format::Csv, || sweep_csv(&cfg.axes, &rows), || to_json(&doc))?
        .unwrap_or_else(|| format!("{} rows written\n", rows.len())))
}

/// Effective vs exact evolution on `points` times from zero to `span` times
/// the protocol duration.
pub fn compare_report(cfg: &RunConfig) -> CliResult<ComparisonReport> {
    let sys = system(cfg)?;
    let tau = solve_timing(cfg.spec.kind.timing(cfg.spec.k), &cfg.spec.params, cfg.spec.branch)?;
    let n = cfg.compare_points;
    let taus: Vec<f64> = (0..n).map(|i| cfg.compare_span * tau * i as f64 / (n - 1) as f64).collect();
    Ok(compare_full_vs_effective(&sys, &taus)?)
}

pub fn compare(cfg: &RunConfig) -> CliResult<String> {
    let report = compare_report(cfg)?;
    let table = || {
        let body: Vec<Vec<String>> = report.points.iter().map(|p| vec![num(p.tau), num(p.fidelity)]).collect();
        csv(&["tau".into(), "fidelity".into()], &body)
    };
    let text = emit(cfg, Format::Csv, table, || to_json(&report))?;
    let mut out = text.unwrap_or_default();
    let worst = report.points.iter().map(|p| p.fidelity).fold(1.0, f64::min);
    out.push_str(&format!("zeno ratio = {}\nminimum fidelity = {}\n", num(report.zeno_ratio), num(worst)));
    if worst < 1.0 - SPECTRAL_TOL && report.zeno_ratio > 0.1 {
        out.push_str("warning: drive is not small against min(g, lambda)\n");
    }
    Ok(out)
}
