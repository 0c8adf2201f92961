//! CSV tables, raw density grids and the run manifest.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use dirac4cfd::observables::SweepAxis;
use dirac4cfd::Quantity;
use serde::Serialize;

use crate::config::ExperimentSpec;
use crate::error::{io_err, Result};
use crate::sweep::SweepOutcome;

pub const MANIFEST_FILE: &str = "run-manifest.json";

/// Ten significant digits in scientific notation.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.9e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(io_err(dir))
}

pub const CONVERGENCE_HEADER: [&str; 11] = [
    "epsilon",
    "resolution",
    "e_phi",
    "e_rho",
    "e_J",
    "order_phi",
    "order_rho",
    "order_J",
    "diagonal",
    "grid_points",
    "tau",
];

/// One line per `(ε, resolution)` cell. The order in a row compares it with the previous,
/// coarser column of the same `ε`.
pub fn write_convergence_csv(path: &Path, outcome: &SweepOutcome) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(CONVERGENCE_HEADER)?;
    let t = &outcome.table;
    for (row, &eps) in t.epsilons.iter().enumerate() {
        let orders: Vec<Vec<Option<f64>>> = [Quantity::Phi, Quantity::Rho, Quantity::Current]
            .iter()
            .map(|&q| t.orders(row, q))
            .collect();
        for (col, &res) in t.resolutions.iter().enumerate() {
            let cell = t.cells[row][col];
            let run = &outcome.runs[row][col];
            let order = |q: usize| if col == 0 { None } else { orders[q][col - 1] };
            w.write_record([
                fmt_num(eps),
                fmt_num(res),
                fmt_opt(cell.map(|c| c.e_phi)),
                fmt_opt(cell.map(|c| c.e_rho)),
                fmt_opt(cell.map(|c| c.e_j)),
                fmt_opt(order(0)),
                fmt_opt(order(1)),
                fmt_opt(order(2)),
                u8::from(outcome.diagonal[row][col]).to_string(),
                run.grid_points.to_string(),
                fmt_num(run.tau),
            ])?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Text rendering of one quantity in the usual layout: an error row and an order row per `ε`,
/// diagonal cells starred.
pub fn render_table(outcome: &SweepOutcome, q: Quantity) -> String {
    let t = &outcome.table;
    let label = match t.axis {
        SweepAxis::Space => "h",
        SweepAxis::Time => "tau",
    };
    let mut s = String::new();
    let _ = write!(s, "e_{:<10}", q.name());
    for r in &t.resolutions {
        let _ = write!(s, " {:>12}", format!("{label}={r:.4e}"));
    }
    s.push('\n');
    for row in 0..t.epsilons.len() {
        let _ = write!(s, "eps={:<8.5}", t.epsilons[row]);
        for (col, c) in t.cells[row].iter().enumerate() {
            let star = if outcome.diagonal[row][col] { "*" } else { " " };
            match c {
                Some(e) => {
                    let _ = write!(s, " {:>11.3e}{star}", e.get(q));
                }
                None => {
                    let _ = write!(s, " {:>11}{star}", "-");
                }
            }
        }
        s.push('\n');
        let _ = write!(s, "{:<12}", "  order");
        let _ = write!(s, " {:>12}", "");
        for o in t.orders(row, q) {
            match o {
                Some(v) => {
                    let _ = write!(s, " {v:>12.2}");
                }
                None => {
                    let _ = write!(s, " {:>12}", "-");
                }
            }
        }
        s.push('\n');
    }
    s
}

#[derive(Serialize)]
struct Manifest<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    spec: &'a ExperimentSpec,
    outputs: Vec<String>,
    details: T,
}

/// Writes `run-manifest.json` into the output directory and returns its path.
pub fn write_manifest<T: Serialize>(spec: &ExperimentSpec, outputs: &[PathBuf], details: T) -> Result<PathBuf> {
    let path = spec.output_dir.join(MANIFEST_FILE);
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        spec,
        outputs: outputs
            .iter()
            .map(|p| {
                p.strip_prefix(&spec.output_dir)
                    .unwrap_or(p)
                    .display()
                    .to_string()
            })
            .collect(),
        details,
    };
    let text = serde_json::to_string_pretty(&manifest)?;
    fs::write(&path, text + "\n").map_err(io_err(&path))?;
    Ok(path)
}

/// Writes `values` as little-endian `f64`, in the order given.
pub fn write_f64_le(path: &Path, values: &[f64]) -> Result<()> {
    let mut bytes = Vec::with_capacity(values.len() * 8);
    for v in values {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, bytes).map_err(io_err(path))
}

pub fn read_f64_le(path: &Path) -> Result<Vec<f64>> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_keep_ten_digits() {
        assert_eq!(fmt_num(4.68e-3), "4.680000000e-3");
        assert_eq!(fmt_num(1.0), "1.000000000e0");
        let x = std::f64::consts::PI / 16.0;
        let back: f64 = fmt_num(x).parse().unwrap();
        assert!((back / x - 1.0).abs() < 1e-9);
    }

    #[test]
    fn raw_grid_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("g.f64");
        let v = vec![0.0, -1.5, 1e-300, f64::MAX];
        write_f64_le(&p, &v).unwrap();
        assert_eq!(read_f64_le(&p).unwrap(), v);
        assert_eq!(std::fs::metadata(&p).unwrap().len(), 32);
    }
}
