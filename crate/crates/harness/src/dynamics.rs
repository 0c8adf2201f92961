//! Two-dimensional density snapshots.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use dirac4cfd::observables::{mass_l2, total_density};
use dirac4cfd::{run, Grid, SchemeConfig};

use crate::config::ExperimentSpec;
use crate::error::{io_err, Result};
use crate::output::{fmt_num, write_f64_le};
use crate::parallel;

/// Density level that delimits the support of a wave packet.
pub const SUPPORT_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone)]
pub struct DensitySnapshot {
    pub epsilon: f64,
    pub t: f64,
    pub step: usize,
    pub mass: f64,
    pub max_rho: f64,
    /// Largest distance from the origin of a node with `ρ > SUPPORT_THRESHOLD`.
    pub support_radius: f64,
    pub rho: Vec<f64>,
}

/// Largest distance from `center` over nodes where `rho` exceeds `threshold`; zero if none.
pub fn support_radius(rho: &[f64], grid: &Grid, threshold: f64, center: &[f64]) -> f64 {
    rho.iter()
        .enumerate()
        .filter(|(_, &r)| r > threshold)
        .map(|(idx, _)| {
            grid.coords(idx)
                .iter()
                .zip(center)
                .map(|(x, c)| (x - c) * (x - c))
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max)
}

pub fn dynamics_one(spec: &ExperimentSpec, epsilon: f64) -> Result<Vec<DensitySnapshot>> {
    let grid = spec.grid(spec.grid_points[0])?;
    let phi0 = spec.preset.sample_initial(&grid)?;
    let dphi0 = spec.preset.sample_initial_derivative(&grid)?;
    let mut cfg = SchemeConfig::new(spec.scheme, epsilon, spec.tau_for(epsilon), spec.t_final);
    cfg.snapshot_times = spec.snapshot_times.clone();
    cfg.allow_unstable = spec.allow_unstable;
    cfg.linear_solver_tol = spec.linear_solver_tol;
    cfg.max_iterations = spec.max_iterations;
    let traj = run(&cfg, &grid, &phi0, Some(&dphi0), &spec.preset.potentials())?;
    let origin = vec![0.0; grid.dim()];
    Ok(traj
        .snapshots
        .iter()
        .map(|s| {
            let rho = total_density(&s.field);
            DensitySnapshot {
                epsilon,
                t: s.t,
                step: s.n,
                mass: mass_l2(&s.field),
                max_rho: rho.iter().copied().fold(0.0, f64::max),
                support_radius: support_radius(&rho, &grid, SUPPORT_THRESHOLD, &origin),
                rho,
            }
        })
        .collect())
}

pub fn dynamics(spec: &ExperimentSpec) -> Result<Vec<Vec<DensitySnapshot>>> {
    parallel::pool()?.install(|| spec.epsilons.par_iter().map(|&e| dynamics_one(spec, e)).collect())
}

#[derive(Serialize)]
struct Sidecar<'a> {
    preset: &'a str,
    epsilon: f64,
    t: f64,
    step: usize,
    tau: f64,
    dim: usize,
    shape: Vec<usize>,
    domain: [f64; 2],
    h: f64,
    dtype: &'static str,
    layout: &'static str,
    data_file: String,
    mass: f64,
}

pub fn snapshot_stem(epsilon: f64, t: f64) -> String {
    format!("rho_eps{epsilon}_t{t}")
}

/// Writes each density as raw `f64` (little endian, row-major with the first axis slowest)
/// next to a JSON sidecar, plus `dynamics_summary.csv`.
pub fn write_dynamics(spec: &ExperimentSpec, dir: &Path, runs: &[Vec<DensitySnapshot>]) -> Result<Vec<PathBuf>> {
    let grid = spec.grid(spec.grid_points[0])?;
    let mut written = Vec::new();
    for snap in runs.iter().flatten() {
        let stem = snapshot_stem(snap.epsilon, snap.t);
        let data = dir.join(format!("{stem}.f64"));
        write_f64_le(&data, &snap.rho)?;
        let meta = Sidecar {
            preset: spec.preset.name(),
            epsilon: snap.epsilon,
            t: snap.t,
            step: snap.step,
            tau: spec.tau_for(snap.epsilon),
            dim: grid.dim(),
            shape: vec![grid.n(); grid.dim()],
            domain: [grid.a(), grid.b()],
            h: grid.h(),
            dtype: "float64-le",
            layout: "row-major, first axis slowest",
            data_file: format!("{stem}.f64"),
            mass: snap.mass,
        };
        let side = dir.join(format!("{stem}.json"));
        std::fs::write(&side, serde_json::to_string_pretty(&meta)? + "\n").map_err(io_err(&side))?;
        written.push(data);
        written.push(side);
    }
    let summary = dir.join("dynamics_summary.csv");
    let mut w = csv::Writer::from_path(&summary)?;
    w.write_record(["epsilon", "t", "step", "mass", "max_rho", "support_radius"])?;
    for s in runs.iter().flatten() {
        w.write_record([
            fmt_num(s.epsilon),
            fmt_num(s.t),
            s.step.to_string(),
            fmt_num(s.mass),
            fmt_num(s.max_rho),
            fmt_num(s.support_radius),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    written.push(summary);
    Ok(written)
}
