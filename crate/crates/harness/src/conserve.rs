//! Mass and energy histories of full runs.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use dirac4cfd::stepper::StepDiagnostics;
use dirac4cfd::{run, SchemeConfig};

use crate::config::ExperimentSpec;
use crate::error::Result;
use crate::output::fmt_num;
use crate::parallel;

#[derive(Debug, Clone, Serialize)]
pub struct ConservationSummary {
    pub epsilon: f64,
    pub steps: usize,
    pub mass0: f64,
    pub energy0: Option<f64>,
    pub max_mass_drift: f64,
    pub max_energy_drift: Option<f64>,
    pub max_iterations: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct ConservationRun {
    pub summary: ConservationSummary,
    pub series: Vec<StepDiagnostics>,
}

pub fn conserve_one(spec: &ExperimentSpec, epsilon: f64) -> Result<ConservationRun> {
    let n = spec.grid_points[0];
    let grid = spec.grid(n)?;
    let phi0 = spec.preset.sample_initial(&grid)?;
    let dphi0 = spec.preset.sample_initial_derivative(&grid)?;
    let mut cfg = SchemeConfig::new(spec.scheme, epsilon, spec.tau_for(epsilon), spec.t_final);
    cfg.diagnostics = true;
    cfg.allow_unstable = spec.allow_unstable;
    cfg.linear_solver_tol = spec.linear_solver_tol;
    cfg.max_iterations = spec.max_iterations;
    let traj = run(&cfg, &grid, &phi0, Some(&dphi0), &spec.preset.potentials())?;
    let first = &traj.diagnostics[0];
    let summary = ConservationSummary {
        epsilon,
        steps: traj.diagnostics.len() - 1,
        mass0: first.mass,
        energy0: first.energy,
        max_mass_drift: traj.max_mass_drift().unwrap_or(0.0),
        max_energy_drift: traj.max_energy_drift(),
        max_iterations: traj.diagnostics.iter().filter_map(|d| d.iterations).max(),
    };
    Ok(ConservationRun {
        summary,
        series: traj.diagnostics,
    })
}

pub fn conserve(spec: &ExperimentSpec) -> Result<Vec<ConservationRun>> {
    parallel::pool()?.install(|| spec.epsilons.par_iter().map(|&e| conserve_one(spec, e)).collect())
}

/// Writes `conserve.csv` (one line per step and `ε`) and `conserve_summary.csv`.
pub fn write_conservation(dir: &Path, runs: &[ConservationRun]) -> Result<Vec<PathBuf>> {
    let series_path = dir.join("conserve.csv");
    let mut w = csv::Writer::from_path(&series_path)?;
    w.write_record(["epsilon", "step", "t", "mass", "energy", "iterations"])?;
    for r in runs {
        for d in &r.series {
            w.write_record([
                fmt_num(r.summary.epsilon),
                d.n.to_string(),
                fmt_num(d.t),
                fmt_num(d.mass),
                d.energy.map(fmt_num).unwrap_or_default(),
                d.iterations.map(|i| i.to_string()).unwrap_or_default(),
            ])?;
        }
    }
    w.flush().map_err(csv::Error::from)?;

    let summary_path = dir.join("conserve_summary.csv");
    let mut w = csv::Writer::from_path(&summary_path)?;
    w.write_record([
        "epsilon",
        "steps",
        "mass0",
        "energy0",
        "max_mass_drift",
        "max_energy_drift",
        "max_iterations",
    ])?;
    for r in runs {
        let s = &r.summary;
        w.write_record([
            fmt_num(s.epsilon),
            s.steps.to_string(),
            fmt_num(s.mass0),
            s.energy0.map(fmt_num).unwrap_or_default(),
            fmt_num(s.max_mass_drift),
            s.max_energy_drift.map(fmt_num).unwrap_or_default(),
            s.max_iterations.map(|i| i.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(vec![series_path, summary_path])
}
