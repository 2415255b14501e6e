//! Number formatting and atomic file output.

use std::io::Write;
use std::path::Path;

use crate::sweep::{Axis, SweepRow};
use crate::CliResult;

/// Twelve significant digits in scientific notation, independent of locale.
pub fn num(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Writes through a temporary file in the destination directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn csv(header: &[String], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn sweep_csv(axes: &[Axis], rows: &[SweepRow]) -> String {
    let mut header: Vec<String> = axes.iter().map(|a| a.name.to_string()).collect();
    header.extend(["fidelity", "negativity", "tau", "engine_gap"].map(String::from));
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut cells: Vec<String> = r.values.iter().map(|&v| num(v)).collect();
            cells.extend([num(r.fidelity), opt_num(r.negativity), num(r.tau), num(r.engine_gap)]);
            cells
        })
        .collect();
    csv(&header, &body)
}
