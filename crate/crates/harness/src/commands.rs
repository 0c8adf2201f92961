//! One entry point per subcommand: run the experiment, write its files, report.

use std::path::PathBuf;

use serde::Serialize;
use serde_json::json;

use dirac4cfd::observables::SweepAxis;
use dirac4cfd::stepper::check_stability;
use dirac4cfd::{run, ErrorTriple, Quantity, SchemeConfig};

use crate::config::{Command, ExperimentSpec};
use crate::conserve::{conserve, write_conservation};
use crate::dynamics::{dynamics, write_dynamics};
use crate::error::{io_err, Result};
use crate::oracle::{run_oracles, OracleOptions, OracleReport};
use crate::output::{ensure_dir, fmt_num, render_table, write_convergence_csv, write_manifest};
use crate::reference::gated_reference;
use crate::sweep::{converge, SweepOutcome};

#[derive(Debug, Clone)]
pub struct CommandOutput {
    /// Human-readable summary for the terminal.
    pub text: String,
    pub files: Vec<PathBuf>,
    /// Oracle checks can fail without an error; the binary exits nonzero then.
    pub success: bool,
    pub warnings: Vec<String>,
}

/// Warning printed when a run proceeds past the stability bound.
pub fn unstable_warning(spec: &ExperimentSpec) -> Result<Option<String>> {
    if !spec.allow_unstable {
        return Ok(None);
    }
    let grid = spec.grid(spec.grid_points[0])?;
    let pots = spec.preset.potentials();
    let bounds = pots.estimate_bounds(&grid, &[0.0])?;
    let mut taus: Vec<f64> = match spec.command {
        Command::ConvergeTime => spec.resolutions.clone(),
        _ => spec.epsilons.iter().map(|&e| spec.tau_for(e)).collect(),
    };
    taus.sort_by(f64::total_cmp);
    let Some(&worst) = taus.last() else { return Ok(None) };
    let cfg = SchemeConfig::new(spec.scheme, 1.0, worst, spec.t_final);
    let report = check_stability(&cfg, &bounds);
    Ok((!report.ok).then(|| {
        format!(
            "warning: tau = {worst} exceeds the stability bound tau_max = {} of the {} scheme; running anyway because --allow-unstable was given",
            report.tau_max,
            spec.scheme.name()
        )
    }))
}

fn sweep_command(spec: &ExperimentSpec, axis: SweepAxis, stem: &str) -> Result<CommandOutput> {
    ensure_dir(&spec.output_dir)?;
    let outcome: SweepOutcome = converge(spec, axis)?;
    let csv_path = spec.output_dir.join(format!("{stem}.csv"));
    write_convergence_csv(&csv_path, &outcome)?;
    let mut text = String::new();
    for q in [Quantity::Phi, Quantity::Rho, Quantity::Current] {
        text.push_str(&render_table(&outcome, q));
        text.push('\n');
    }
    let warnings: Vec<String> = outcome
        .skipped_cells()
        .map(|(e, r, why)| format!("skipped epsilon = {e}, resolution = {r}: {why}"))
        .collect();
    let details = json!({
        "reference_gate_deviation": outcome.gate_deviations,
        "taus": outcome.runs.iter().map(|r| r.iter().map(|c| c.tau).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "skipped": warnings,
    });
    let manifest = write_manifest(spec, std::slice::from_ref(&csv_path), details)?;
    Ok(CommandOutput {
        text,
        files: vec![csv_path, manifest],
        success: true,
        warnings,
    })
}

pub fn cmd_converge_space(spec: &ExperimentSpec) -> Result<CommandOutput> {
    sweep_command(spec, SweepAxis::Space, "converge_space")
}

pub fn cmd_converge_time(spec: &ExperimentSpec) -> Result<CommandOutput> {
    sweep_command(spec, SweepAxis::Time, "converge_time")
}

pub fn cmd_conserve(spec: &ExperimentSpec) -> Result<CommandOutput> {
    ensure_dir(&spec.output_dir)?;
    let runs = conserve(spec)?;
    let files = write_conservation(&spec.output_dir, &runs)?;
    let mut text = String::from("epsilon        E0                max mass drift    max energy drift\n");
    for r in &runs {
        let s = &r.summary;
        text.push_str(&format!(
            "{:<14} {:<17} {:<17} {}\n",
            s.epsilon,
            s.energy0.map(fmt_num).unwrap_or_else(|| "-".into()),
            fmt_num(s.max_mass_drift),
            s.max_energy_drift.map(fmt_num).unwrap_or_else(|| "-".into()),
        ));
    }
    let summaries: Vec<_> = runs.iter().map(|r| &r.summary).collect();
    let manifest = write_manifest(spec, &files, json!({ "summary": summaries }))?;
    let mut all = files;
    all.push(manifest);
    Ok(CommandOutput {
        text,
        files: all,
        success: true,
        warnings: vec![],
    })
}

pub fn cmd_dynamics2d(spec: &ExperimentSpec) -> Result<CommandOutput> {
    ensure_dir(&spec.output_dir)?;
    let runs = dynamics(spec)?;
    let files = write_dynamics(spec, &spec.output_dir, &runs)?;
    let mut text = String::from("epsilon    t          mass              support radius (rho > 1e-3)\n");
    for s in runs.iter().flatten() {
        text.push_str(&format!(
            "{:<10} {:<10} {:<17} {:.4}\n",
            s.epsilon,
            s.t,
            fmt_num(s.mass),
            s.support_radius
        ));
    }
    let summary: Vec<_> = runs
        .iter()
        .flatten()
        .map(|s| json!({"epsilon": s.epsilon, "t": s.t, "mass": s.mass, "support_radius": s.support_radius}))
        .collect();
    let manifest = write_manifest(spec, &files, json!({ "snapshots": summary }))?;
    let mut all = files;
    all.push(manifest);
    Ok(CommandOutput {
        text,
        files: all,
        success: true,
        warnings: vec![],
    })
}

pub fn cmd_oracle_check(spec: &ExperimentSpec, opts: &OracleOptions) -> Result<CommandOutput> {
    ensure_dir(&spec.output_dir)?;
    let report: OracleReport = run_oracles(spec.seed, opts)?;
    let text = serde_json::to_string_pretty(&report)?;
    let path = spec.output_dir.join("oracle_report.json");
    std::fs::write(&path, text.clone() + "\n").map_err(io_err(&path))?;
    let manifest = write_manifest(spec, std::slice::from_ref(&path), json!({ "passed": report.passed }))?;
    Ok(CommandOutput {
        text,
        files: vec![path, manifest],
        success: report.passed,
        warnings: vec![],
    })
}

#[derive(Serialize)]
struct SolveDetails {
    epsilon: f64,
    tau: f64,
    steps: usize,
    tau_max: f64,
    stable: bool,
    max_mass_drift: Option<f64>,
    max_energy_drift: Option<f64>,
    errors: Option<[f64; 3]>,
    reference_gate_deviation: Option<f64>,
}

/// A single run. With `compare_reference` the final field is also measured against a gated
/// reference and the errors land in `errors.csv`.
pub fn cmd_solve(spec: &ExperimentSpec, compare_reference: bool) -> Result<CommandOutput> {
    ensure_dir(&spec.output_dir)?;
    let epsilon = spec.epsilons[0];
    let tau = spec.tau_for(epsilon);
    let grid = spec.grid(spec.grid_points[0])?;
    let phi0 = spec.preset.sample_initial(&grid)?;
    let dphi0 = spec.preset.sample_initial_derivative(&grid)?;
    let mut cfg = SchemeConfig::new(spec.scheme, epsilon, tau, spec.t_final);
    cfg.diagnostics = true;
    cfg.allow_unstable = spec.allow_unstable;
    cfg.linear_solver_tol = spec.linear_solver_tol;
    cfg.max_iterations = spec.max_iterations;
    let traj = run(&cfg, &grid, &phi0, Some(&dphi0), &spec.preset.potentials())?;

    let mut files = Vec::new();
    let sol_path = spec.output_dir.join("solution.csv");
    let mut w = csv::Writer::from_path(&sol_path)?;
    let mut header: Vec<String> = (1..=grid.dim()).map(|k| format!("x{k}")).collect();
    header.extend(["re_phi1", "im_phi1", "re_phi2", "im_phi2", "rho"].map(String::from));
    w.write_record(&header)?;
    for (idx, s) in traj.final_field.values().iter().enumerate() {
        let mut rec: Vec<String> = grid.coords(idx).into_iter().map(fmt_num).collect();
        rec.extend([s.c1.re, s.c1.im, s.c2.re, s.c2.im, s.norm_sqr()].map(fmt_num));
        w.write_record(&rec)?;
    }
    w.flush().map_err(csv::Error::from)?;
    files.push(sol_path);

    let diag_path = spec.output_dir.join("diagnostics.csv");
    let mut w = csv::Writer::from_path(&diag_path)?;
    w.write_record(["step", "t", "mass", "energy", "iterations"])?;
    for d in &traj.diagnostics {
        w.write_record([
            d.n.to_string(),
            fmt_num(d.t),
            fmt_num(d.mass),
            d.energy.map(fmt_num).unwrap_or_default(),
            d.iterations.map(|i| i.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    files.push(diag_path);

    let mut text = format!(
        "{} scheme, epsilon = {epsilon}, tau = {tau}, N = {}, T = {}\nmax mass drift {}\n",
        spec.scheme.name(),
        grid.n(),
        spec.t_final,
        traj.max_mass_drift().map(fmt_num).unwrap_or_default()
    );
    let (mut errors, mut gate) = (None, None);
    if compare_reference {
        let reference = gated_reference(spec.preset, epsilon, &[spec.t_final], &spec.reference)?;
        let exact = reference.solution.at(spec.t_final, &grid)?;
        let e = ErrorTriple::measure(&traj.final_field, &exact, epsilon)?;
        let err_path = spec.output_dir.join("errors.csv");
        let mut w = csv::Writer::from_path(&err_path)?;
        w.write_record(["epsilon", "h", "tau", "e_phi", "e_rho", "e_J"])?;
        w.write_record([epsilon, grid.h(), tau, e.e_phi, e.e_rho, e.e_j].map(fmt_num))?;
        w.flush().map_err(csv::Error::from)?;
        files.push(err_path);
        text.push_str(&format!("e_phi = {:.4e}, e_rho = {:.4e}, e_J = {:.4e}\n", e.e_phi, e.e_rho, e.e_j));
        errors = Some([e.e_phi, e.e_rho, e.e_j]);
        gate = reference.gate_deviation;
    }
    let details = SolveDetails {
        epsilon,
        tau,
        steps: cfg.n_steps()?,
        tau_max: traj.stability.tau_max,
        stable: traj.stability.ok,
        max_mass_drift: traj.max_mass_drift(),
        max_energy_drift: traj.max_energy_drift(),
        errors,
        reference_gate_deviation: gate,
    };
    let manifest = write_manifest(spec, &files, details)?;
    files.push(manifest);
    Ok(CommandOutput {
        text,
        files,
        success: true,
        warnings: vec![],
    })
}
