//! Reference solutions from the splitting solver, guarded by a self-convergence check.

use dirac4cfd::observables::{relative_error, Quantity};
use dirac4cfd::tssp::{compute_reference, ReferenceSolution};
use dirac4cfd::Preset;

use crate::config::ReferenceSettings;
use crate::error::{HarnessError, Result};

#[derive(Debug, Clone)]
pub struct GatedReference {
    pub solution: ReferenceSolution,
    /// Relative `l²` distance to the doubly refined reference, when the gate ran.
    pub gate_deviation: Option<f64>,
}

fn single_reference(preset: Preset, epsilon: f64, n: usize, tau: f64, times: &[f64]) -> Result<ReferenceSolution> {
    let grid = preset.grid(n)?;
    let phi0 = preset.sample_initial(&grid)?;
    Ok(compute_reference(&grid, epsilon, tau, &phi0, &preset.potentials(), times)?)
}

/// Reference at `times` on `settings.n` points with step `settings.tau`.
///
/// With the gate enabled a second reference on `2n` points with step `tau/2` is computed
/// alongside, and the largest relative deviation over `times` must stay within
/// `settings.gate_tol`.
pub fn gated_reference(
    preset: Preset,
    epsilon: f64,
    times: &[f64],
    settings: &ReferenceSettings,
) -> Result<GatedReference> {
    if !settings.gate {
        return Ok(GatedReference {
            solution: single_reference(preset, epsilon, settings.n, settings.tau, times)?,
            gate_deviation: None,
        });
    }
    let (base, fine) = rayon::join(
        || single_reference(preset, epsilon, settings.n, settings.tau, times),
        || single_reference(preset, epsilon, 2 * settings.n, settings.tau / 2.0, times),
    );
    let (base, fine) = (base?, fine?);
    let mut deviation = 0.0f64;
    for &t in times {
        let b = base.at(t, &base.grid)?;
        let f = fine.at(t, &base.grid)?;
        deviation = deviation.max(relative_error(&b, &f, Quantity::Phi, epsilon)?);
    }
    if !(deviation <= settings.gate_tol) {
        return Err(HarnessError::ReferenceGate {
            epsilon,
            deviation,
            tolerance: settings.gate_tol,
        });
    }
    Ok(GatedReference {
        solution: base,
        gate_deviation: Some(deviation),
    })
}
