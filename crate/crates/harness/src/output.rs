//! CSV time series and atomic file writes.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use cnls_core::diagnostics::DiagnosticRecord;
use tempfile::NamedTempFile;

use crate::error::{HarnessError, Result};

/// Column names for `m` components.
pub fn csv_header(m: usize) -> String {
    let mut cols = vec!["t".to_string()];
    cols.extend((1..=m).map(|j| format!("mass_{j}")));
    cols.extend(
        [
            "energy",
            "xi",
            "lr_norm",
            "linf_norm",
            "morawetz",
            "morawetz_cum",
            "scatter_resid",
            "gn_ratio",
        ]
        .map(String::from),
    );
    cols.join(",")
}

fn optional(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

/// One header line and one row per record, `\n`-terminated. Numbers use the
/// shortest round-trip scientific form; absent optional values are empty.
pub fn csv_string(records: &[DiagnosticRecord], m: usize) -> String {
    let mut out = csv_header(m);
    out.push('\n');
    for r in records {
        write!(out, "{:e}", r.time).unwrap();
        for mass in &r.masses {
            write!(out, ",{mass:e}").unwrap();
        }
        writeln!(
            out,
            ",{:e},{:e},{:e},{:e},{:e},{:e},{},{}",
            r.energy,
            r.xi,
            r.lr_norm,
            r.linf_norm,
            r.morawetz,
            r.morawetz_cum,
            optional(r.scatter_resid),
            optional(r.gn_ratio)
        )
        .unwrap();
    }
    out
}

pub fn write_csv(records: &[DiagnosticRecord], m: usize, path: &Path) -> Result<()> {
    atomic_write(path, csv_string(records, m).as_bytes())
}

/// Writes to a temporary file in the target directory, then renames it over `path`.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir).map_err(|e| HarnessError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| HarnessError::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| HarnessError::io(path, e))?;
    tmp.persist(path).map_err(|e| HarnessError::io(path, e.error))?;
    Ok(())
}
