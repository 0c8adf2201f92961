use crate::config::{Scheme, SchemeConfig};
use crate::error::{Result, SolverError};
use crate::field::SpinorField;
use crate::grid::Grid;
use crate::observables::{discrete_energy, mass_l2};
use crate::potential::{PotentialSet, SampledPotentials};
use crate::spectral::spectral_derivative;
use crate::tssp::TsspSolver;

use super::{check_stability, first_step, ImplicitSolver, SemiImplicitSolver, StabilityReport};

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub n: usize,
    pub t: f64,
    pub field: SpinorField,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepDiagnostics {
    pub n: usize,
    pub t: f64,
    pub mass: f64,
    /// Present only for time-independent potentials.
    pub energy: Option<f64>,
    /// Fixed-point iterations of the implicit solve that produced this level.
    pub iterations: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub snapshots: Vec<Snapshot>,
    pub final_field: SpinorField,
    pub diagnostics: Vec<StepDiagnostics>,
    pub stability: StabilityReport,
}

impl Trajectory {
    /// Largest `|q_n − q_0| / |q_0|` over the recorded mass series.
    pub fn max_mass_drift(&self) -> Option<f64> {
        max_drift(self.diagnostics.iter().map(|d| d.mass))
    }

    pub fn max_energy_drift(&self) -> Option<f64> {
        let series: Option<Vec<f64>> = self.diagnostics.iter().map(|d| d.energy).collect();
        max_drift(series?.into_iter())
    }
}

fn max_drift(mut series: impl Iterator<Item = f64>) -> Option<f64> {
    let first = series.next()?;
    let scale = first.abs().max(f64::MIN_POSITIVE);
    Some(series.map(|q| (q - first).abs() / scale).fold(0.0, f64::max))
}

struct Recorder<'a> {
    cfg: &'a SchemeConfig,
    pots: &'a PotentialSet,
    energy_pots: Option<SampledPotentials>,
    snapshot_steps: Vec<(usize, f64)>,
    snapshots: Vec<Snapshot>,
    diagnostics: Vec<StepDiagnostics>,
}

impl Recorder<'_> {
    fn record(&mut self, n: usize, field: &SpinorField, iterations: Option<usize>) -> Result<()> {
        let t = n as f64 * self.cfg.tau;
        if !field.is_finite() {
            return Err(SolverError::NonFinite {
                what: format!("solution at step {n} (t = {t})"),
                node: vec![],
            });
        }
        for &(step, time) in &self.snapshot_steps {
            if step == n {
                self.snapshots.push(Snapshot {
                    n,
                    t: time,
                    field: field.clone(),
                });
            }
        }
        if self.cfg.diagnostics {
            let energy = match &self.energy_pots {
                Some(p) => Some(discrete_energy(field, p, self.cfg.epsilon)?),
                None => None,
            };
            self.diagnostics.push(StepDiagnostics {
                n,
                t,
                mass: mass_l2(field),
                energy,
                iterations,
            });
        }
        Ok(())
    }

    fn potentials_at(&self, grid: &Grid, t: f64, cache: &mut Option<SampledPotentials>) -> Result<SampledPotentials> {
        if self.pots.is_time_independent() {
            if cache.is_none() {
                *cache = Some(self.pots.sample(grid, 0.0)?);
            }
            return Ok(cache.clone().expect("filled above"));
        }
        self.pots.sample(grid, t)
    }
}

/// Integrates from `phi0` to `cfg.t_final`.
///
/// The semi-implicit scheme starts with [`first_step`]; `dphi0` supplies `∂_kΦ₀` per axis, and
/// when absent the spectral derivative of `phi0` is used. Potentials without stored bounds get
/// bounds estimated on `grid` before the stability gate is evaluated.
pub fn run(
    cfg: &SchemeConfig,
    grid: &Grid,
    phi0: &SpinorField,
    dphi0: Option<&[SpinorField]>,
    pots: &PotentialSet,
) -> Result<Trajectory> {
    cfg.validate()?;
    if phi0.grid() != grid {
        return Err(SolverError::GridMismatch("initial data sampled on another grid".into()));
    }
    let steps = cfg.n_steps()?;
    let bounds = match pots.bounds() {
        Some(b) => b.clone(),
        None => pots.estimate_bounds(grid, &pots.time_levels(cfg.t_final, cfg.tau))?,
    };
    let stability = check_stability(cfg, &bounds);
    if !stability.ok && !cfg.allow_unstable {
        return Err(SolverError::Unstable {
            tau: cfg.tau,
            tau_max: stability.tau_max,
        });
    }

    let snapshot_steps = cfg
        .snapshot_times
        .iter()
        .map(|&t| cfg.step_of_time(t).map(|n| (n, t)))
        .collect::<Result<Vec<_>>>()?;
    let energy_pots = if pots.is_time_independent() && cfg.diagnostics {
        Some(pots.sample(grid, 0.0)?)
    } else {
        None
    };
    let mut rec = Recorder {
        cfg,
        pots,
        energy_pots,
        snapshot_steps,
        snapshots: Vec::new(),
        diagnostics: Vec::new(),
    };
    let mut cache = None;
    rec.record(0, phi0, None)?;

    let final_field = match cfg.scheme {
        Scheme::SemiImplicit4cfd => {
            let derivs: Vec<SpinorField> = match dphi0 {
                Some(d) => d.to_vec(),
                None => (1..=grid.dim()).map(|axis| spectral_derivative(phi0, axis)).collect(),
            };
            let pots0 = rec.potentials_at(grid, 0.0, &mut cache)?;
            let solver = SemiImplicitSolver::new(grid, cfg.epsilon, cfg.tau)?;
            let mut prev = phi0.clone();
            let mut curr = first_step(phi0, &derivs, &pots0, cfg)?;
            rec.record(1, &curr, None)?;
            for n in 1..steps {
                let p = rec.potentials_at(grid, n as f64 * cfg.tau, &mut cache)?;
                let next = solver.step(&prev, &curr, &p)?;
                prev = std::mem::replace(&mut curr, next);
                rec.record(n + 1, &curr, None)?;
            }
            curr
        }
        Scheme::Implicit4cfd => {
            let solver = ImplicitSolver::from_config(grid, cfg)?;
            let mut curr = phi0.clone();
            for n in 0..steps {
                let p = rec.potentials_at(grid, (n as f64 + 0.5) * cfg.tau, &mut cache)?;
                let (next, info) = solver.step(&curr, &p)?;
                curr = next;
                rec.record(n + 1, &curr, Some(info.iterations))?;
            }
            curr
        }
        Scheme::TsspReference => {
            let solver = TsspSolver::new(grid, pots, cfg.epsilon, cfg.tau)?;
            let mut curr = phi0.clone();
            for n in 0..steps {
                curr = solver.step(&curr, n as f64 * cfg.tau)?;
                rec.record(n + 1, &curr, None)?;
            }
            curr
        }
    };

    Ok(Trajectory {
        snapshots: rec.snapshots,
        final_field,
        diagnostics: rec.diagnostics,
        stability,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::Preset;

    #[test]
    fn single_step_run() {
        let g = Preset::Standard1d.grid(16).unwrap();
        let phi0 = Preset::Standard1d.sample_initial(&g).unwrap();
        let pots = Preset::Standard1d.potentials();
        for scheme in [Scheme::SemiImplicit4cfd, Scheme::Implicit4cfd, Scheme::TsspReference] {
            let mut cfg = SchemeConfig::new(scheme, 1.0, 0.01, 0.01);
            cfg.diagnostics = true;
            cfg.snapshot_times = vec![0.0, 0.01];
            let tr = run(&cfg, &g, &phi0, None, &pots).unwrap();
            assert_eq!(tr.diagnostics.len(), 2);
            assert_eq!(tr.snapshots.len(), 2);
            assert_eq!(tr.snapshots[0].field, phi0);
            assert_eq!(tr.snapshots[1].field, tr.final_field);
        }
    }

    #[test]
    fn stability_gate_is_enforced() {
        let g = Preset::Standard1d.grid(16).unwrap();
        let phi0 = Preset::Standard1d.sample_initial(&g).unwrap();
        let pots = Preset::Standard1d.potentials();
        let mut cfg = SchemeConfig::new(Scheme::SemiImplicit4cfd, 1.0, 0.6, 1.8);
        assert!(matches!(
            run(&cfg, &g, &phi0, None, &pots),
            Err(SolverError::Unstable { .. })
        ));
        cfg.allow_unstable = true;
        let tr = run(&cfg, &g, &phi0, None, &pots).unwrap();
        assert!(!tr.stability.ok);
        assert_eq!(tr.stability.tau_max, 0.5);
    }
}
