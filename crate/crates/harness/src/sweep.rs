//! Convergence sweeps over mesh size or time step.

use rayon::prelude::*;

use dirac4cfd::observables::SweepAxis;
use dirac4cfd::{run, ConvergenceTable, ErrorTriple, SchemeConfig, SolverError};

use crate::config::ExperimentSpec;
use crate::error::{HarnessError, Result};
use crate::parallel;
use crate::reference::{gated_reference, GatedReference};

/// Mesh size marked on the diagonal at `ε = 1`; it scales as `ε^{1/4}`.
pub const SPACE_DIAGONAL_ANCHOR: f64 = std::f64::consts::PI / 32.0;
/// Time step marked on the diagonal at `ε = 1`; it scales as `ε^{3/2}`.
pub const TIME_DIAGONAL_ANCHOR: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct CellRun {
    pub grid_points: usize,
    pub tau: f64,
    /// Why the cell has no errors, if it has none.
    pub skipped: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub table: ConvergenceTable,
    pub runs: Vec<Vec<CellRun>>,
    pub diagonal: Vec<Vec<bool>>,
    /// Gate deviation of each row's reference.
    pub gate_deviations: Vec<Option<f64>>,
}

/// Whether `resolution` sits on the `h ∼ ε^{1/4}` (space) or `τ ∼ ε^{3/2}` (time) diagonal.
pub fn is_diagonal(axis: SweepAxis, epsilon: f64, resolution: f64) -> bool {
    let target = match axis {
        SweepAxis::Space => SPACE_DIAGONAL_ANCHOR * epsilon.powf(0.25),
        SweepAxis::Time => TIME_DIAGONAL_ANCHOR * epsilon.powf(1.5),
    };
    (resolution / target).log2().abs() < 0.25
}

fn run_cell(
    spec: &ExperimentSpec,
    epsilon: f64,
    n: usize,
    tau: f64,
    reference: &GatedReference,
) -> Result<std::result::Result<ErrorTriple, String>> {
    let grid = spec.grid(n)?;
    let phi0 = spec.preset.sample_initial(&grid)?;
    let dphi0 = spec.preset.sample_initial_derivative(&grid)?;
    let mut cfg = SchemeConfig::new(spec.scheme, epsilon, tau, spec.t_final);
    cfg.allow_unstable = spec.allow_unstable;
    cfg.linear_solver_tol = spec.linear_solver_tol;
    cfg.max_iterations = spec.max_iterations;
    let traj = match run(&cfg, &grid, &phi0, Some(&dphi0), &spec.preset.potentials()) {
        Ok(t) => t,
        Err(e @ SolverError::Unstable { .. }) => return Ok(Err(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    let exact = reference.solution.at(spec.t_final, &grid)?;
    Ok(Ok(ErrorTriple::measure(&traj.final_field, &exact, epsilon)?))
}

/// Runs every `(ε, resolution)` cell of a sweep against gated references.
///
/// Cells refused by the stability gate are left empty and reported in [`CellRun::skipped`].
pub fn converge(spec: &ExperimentSpec, axis: SweepAxis) -> Result<SweepOutcome> {
    let pool = parallel::pool()?;
    pool.install(|| converge_in_pool(spec, axis))
}

fn converge_in_pool(spec: &ExperimentSpec, axis: SweepAxis) -> Result<SweepOutcome> {
    let references: Vec<GatedReference> = spec
        .epsilons
        .par_iter()
        .map(|&eps| gated_reference(spec.preset, eps, &[spec.t_final], &spec.reference))
        .collect::<Result<_>>()?;
    converge_with(spec, axis, &references)
}

/// As [`converge`], with one precomputed reference per entry of `spec.epsilons`; each must
/// hold a sample at `spec.t_final`. Runs on the current rayon pool.
pub fn converge_with(spec: &ExperimentSpec, axis: SweepAxis, references: &[GatedReference]) -> Result<SweepOutcome> {
    if references.len() != spec.epsilons.len() {
        return Err(HarnessError::Config("one reference per epsilon required".into()));
    }
    let cols = spec.resolutions.len();
    let mut plan = Vec::new();
    for (row, &eps) in spec.epsilons.iter().enumerate() {
        for (col, &res) in spec.resolutions.iter().enumerate() {
            let (n, tau) = match axis {
                SweepAxis::Space => (spec.grid_points[col], spec.tau_for(eps)),
                SweepAxis::Time => (spec.grid_points[0], res),
            };
            plan.push((row, col, n, tau));
        }
    }
    let results: Vec<_> = plan
        .par_iter()
        .map(|&(row, _, n, tau)| run_cell(spec, spec.epsilons[row], n, tau, &references[row]))
        .collect::<Result<_>>()?;

    let mut table = ConvergenceTable::new(axis, spec.epsilons.clone(), spec.resolutions.clone());
    let mut runs = vec![Vec::with_capacity(cols); spec.epsilons.len()];
    for (&(row, col, n, tau), outcome) in plan.iter().zip(results) {
        let skipped = match outcome {
            Ok(e) => {
                table.cells[row][col] = Some(e);
                None
            }
            Err(reason) => Some(reason),
        };
        runs[row].push(CellRun {
            grid_points: n,
            tau,
            skipped,
        });
    }
    let diagonal = spec
        .epsilons
        .iter()
        .map(|&e| spec.resolutions.iter().map(|&r| is_diagonal(axis, e, r)).collect())
        .collect();
    Ok(SweepOutcome {
        table,
        runs,
        diagonal,
        gate_deviations: references.iter().map(|r| r.gate_deviation).collect(),
    })
}

impl SweepOutcome {
    pub fn skipped_cells(&self) -> impl Iterator<Item = (f64, f64, &str)> + '_ {
        self.runs.iter().enumerate().flat_map(move |(row, cells)| {
            cells.iter().enumerate().filter_map(move |(col, c)| {
                c.skipped
                    .as_deref()
                    .map(|s| (self.table.epsilons[row], self.table.resolutions[col], s))
            })
        })
    }
}
