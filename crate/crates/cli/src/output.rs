//! CSV assembly and atomic file output.

use std::io::Write;
use std::path::Path;

use hybrid_qme::dynamics::series::format_float;
use hybrid_qme::dynamics::TimeSeries;
use hybrid_qme::experiment::BranchResult;
use hybrid_qme::metrics::WignerGrid;

use crate::CliError;

/// Write `contents` next to `path` under a temporary name, then rename over it.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Interleave the named columns of a coherent and a squeezed branch as
/// `<name>_cscs`, `<name>_sscs`.
pub fn paired_series(cscs: &BranchResult, sscs: &BranchResult, names: &[&str]) -> TimeSeries {
    assert_eq!(cscs.series.times(), sscs.series.times(), "branches sampled on different grids");
    let mut cols = Vec::new();
    for name in names {
        for (tag, branch) in [("cscs", cscs), ("sscs", sscs)] {
            let col = branch.series.column(name).expect("branch column").to_vec();
            cols.push((format!("{name}_{tag}"), col));
        }
    }
    TimeSeries::from_columns(cscs.series.times().to_vec(), cols)
}

/// One-line health summary of a branch for the metadata block.
pub fn diagnostics_line(b: &BranchResult) -> String {
    let d = &b.diagnostics;
    format!(
        "max_trace_deviation={} max_hermiticity_drift={} min_eigenvalue={} eigen_checks={}",
        format_float(d.max_trace_deviation()),
        format_float(d.max_hermiticity_drift()),
        format_float(d.lowest_eigenvalue()),
        d.min_eigenvalue.len()
    )
}

/// `x,p,<labels...>` rows for grids sampled on identical axes.
pub fn wigner_table(meta: &[(String, String)], grids: &[(&str, &WignerGrid)]) -> String {
    let first = grids[0].1;
    for (_, g) in grids {
        assert!(g.xs == first.xs && g.ps == first.ps, "grids on different axes");
    }
    let mut out = String::new();
    for (k, v) in meta {
        out.push_str(&format!("# {k}: {v}\n"));
    }
    out.push_str("x,p");
    for (label, _) in grids {
        out.push(',');
        out.push_str(label);
    }
    out.push('\n');
    for (ix, x) in first.xs.iter().enumerate() {
        for (ip, p) in first.ps.iter().enumerate() {
            out.push_str(&format_float(*x));
            out.push(',');
            out.push_str(&format_float(*p));
            for (_, g) in grids {
                out.push(',');
                out.push_str(&format_float(g.values[[ix, ip]]));
            }
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        write_atomic(&path, b"first").unwrap();
        write_atomic(&path, b"second").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "second");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn atomic_write_reports_missing_directory() {
        let err = write_atomic(Path::new("/nonexistent-dir/x.csv"), b"x").unwrap_err();
        assert!(matches!(err, CliError::Io(_)));
    }
}
