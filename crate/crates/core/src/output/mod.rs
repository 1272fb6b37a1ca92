//! File output: CSV tables with lossless numbers, SVG line plots, and
//! atomic writes.

mod svg;

use std::io::{self, Write};
use std::path::Path;

use tempfile::NamedTempFile;

use crate::pde::{StateField, WkbField};
use crate::wave::{SpeedSample, WaveResult};

pub use svg::{LinePlot, Series};

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes `bytes` to a temporary file next to `path` and renames it into
/// place, so readers never see a partial file.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// A CSV table held in memory until written.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Self { header: header.iter().map(|s| s.as_ref().to_string()).collect(), rows: Vec::new() }
    }

    pub fn push_numbers(&mut self, row: &[f64]) {
        self.rows.push(row.iter().map(|&v| fmt_f64(v)).collect());
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> io::Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| e.into_error())
    }

    pub fn write(&self, path: &Path) -> io::Result<()> {
        atomic_write(path, &self.to_bytes()?)
    }
}

/// Columns `x, A, B, phi_A, phi_B, residual_A, residual_B`; the WKB columns
/// are empty when no transform is given.
pub fn state_table(state: &StateField, wkb: Option<&WkbField>) -> Table {
    let mut t = Table::new(&["x", "A", "B", "phi_A", "phi_B", "residual_A", "residual_B"]);
    for (i, x) in state.grid.nodes().enumerate() {
        let mut row = vec![fmt_f64(x), fmt_f64(state.a[i]), fmt_f64(state.b[i])];
        match wkb {
            Some(w) => row.extend(
                [w.phi_a[i], w.phi_b[i], w.eikonal_residual_a[i], w.eikonal_residual_b[i]].map(fmt_f64),
            ),
            None => row.extend(std::iter::repeat_n(String::new(), 4)),
        }
        t.push(row);
    }
    t
}

/// Columns `y, a, b`.
pub fn wave_table(result: &WaveResult) -> Table {
    let mut t = Table::new(&["y", "a", "b"]);
    for i in 0..result.len() {
        t.push_numbers(&[result.y(i), result.a[i], result.b[i]]);
    }
    t
}

/// Columns `x, c, converged` and `c_oracle` when oracle speeds are given.
pub fn speed_table(samples: &[SpeedSample], oracle: Option<&[f64]>) -> Table {
    let mut header = vec!["x", "c", "converged"];
    if oracle.is_some() {
        header.push("c_oracle");
    }
    let mut t = Table::new(&header);
    for (k, s) in samples.iter().enumerate() {
        let mut row = vec![fmt_f64(s.x), fmt_f64(s.c), s.converged.to_string()];
        if let Some(o) = oracle {
            row.push(fmt_f64(o[k]));
        }
        t.push(row);
    }
    t
}

/// `key = value` lines.
pub fn summary_text(pairs: &[(&str, String)]) -> String {
    let mut s = String::new();
    for (k, v) in pairs {
        s.push_str(k);
        s.push_str(" = ");
        s.push_str(v);
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pde::Grid1D;

    #[test]
    fn numbers_round_trip() {
        for v in [0.1, 1.0 / 3.0, 2.0f64.sqrt(), -1e-300, 6.02214076e23] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn state_csv_layout() {
        let s = StateField::from_fn(Grid1D::new(3).unwrap(), |x| (1.0 - x, x));
        let bytes = state_table(&s, None).to_bytes().unwrap();
        let text = String::from_utf8(bytes).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "x,A,B,phi_A,phi_B,residual_A,residual_B");
        assert_eq!(lines.next().unwrap(), "0.0000000000000000e0,1.0000000000000000e0,0.0000000000000000e0,,,,");
        assert_eq!(text.lines().count(), 4);
    }

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub").join("f.txt");
        atomic_write(&p, b"one").unwrap();
        atomic_write(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }

    #[test]
    fn summary_lines() {
        assert_eq!(summary_text(&[("eps", "1e-4".into()), ("gap", "0".into())]), "eps = 1e-4\ngap = 0\n");
    }
}
