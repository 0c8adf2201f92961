//! Densities, conserved quantities, error metrics and convergence orders.

use num_complex::Complex64;

use crate::error::{Result, SolverError};
use crate::field::SpinorField;
use crate::pauli::{quadratic_form, sigma, Mat2};
use crate::potential::SampledPotentials;
use crate::spectral::{compact_derivative, Transform};

/// Largest imaginary residue tolerated in a Hermitian quadratic form before it is discarded.
const HERMITIAN_RESIDUE: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct ObservableFields {
    pub rho: Vec<f64>,
    /// One array per spatial axis.
    pub current: Vec<Vec<f64>>,
}

pub fn observables(field: &SpinorField, epsilon: f64) -> ObservableFields {
    ObservableFields {
        rho: total_density(field),
        current: current_density(field, epsilon),
    }
}

/// `ρ = |φ₁|² + |φ₂|²` per node.
pub fn total_density(field: &SpinorField) -> Vec<f64> {
    field.values().iter().map(|s| s.norm_sqr()).collect()
}

/// `J_k = (1/ε) Φ* σ_k Φ` per node and axis.
pub fn current_density(field: &SpinorField, epsilon: f64) -> Vec<Vec<f64>> {
    (1..=field.grid().dim())
        .map(|axis| {
            let s = sigma(axis);
            field
                .values()
                .iter()
                .map(|v| {
                    let q = quadratic_form(&s, v);
                    debug_assert!(q.im.abs() <= HERMITIAN_RESIDUE * v.norm_sqr().max(1.0));
                    q.re / epsilon
                })
                .collect()
        })
        .collect()
}

/// `‖Φ‖²_{l²} = h^d Σ_j |Φ_j|²`.
pub fn mass_l2(field: &SpinorField) -> f64 {
    field.grid().cell_volume() * total_density(field).iter().sum::<f64>()
}

/// Discrete energy
/// `h^d Σ_j [ −(i/ε) Φ_j* Σ_k σ_k (𝒜_h⁻¹δ_k Φ)_j + (1/ε) Φ_j* σ₃ Φ_j + V_j |Φ_j|² − Σ_k A_{k,j} Φ_j* σ_k Φ_j ]`.
///
/// The sum is real for periodic fields; the imaginary residue is checked and dropped.
pub fn discrete_energy(field: &SpinorField, pots: &SampledPotentials, epsilon: f64) -> Result<f64> {
    let grid = *field.grid();
    let transform = Transform::new(&grid);
    let mut total = Complex64::default();
    let minus_i_over_eps = Complex64::new(0.0, -1.0 / epsilon);
    for axis in 1..=grid.dim() {
        let d = compact_derivative(&transform, field, axis);
        let s = sigma(axis);
        let kinetic: Complex64 = field
            .values()
            .iter()
            .zip(d.values())
            .map(|(p, dp)| p.dot(&s.apply(dp)))
            .sum();
        total += minus_i_over_eps * kinetic;
    }
    for (j, p) in field.values().iter().enumerate() {
        let mut local = quadratic_form(&Mat2::SIGMA3, p) / epsilon + pots.v[j] * p.norm_sqr();
        for (k, a) in pots.a.iter().enumerate() {
            local -= quadratic_form(&sigma(k + 1), p) * a[j];
        }
        total += local;
    }
    let total = total * grid.cell_volume();
    let scale = field.norm_sqr_l2().max(f64::MIN_POSITIVE) / grid.h().min(epsilon);
    if total.im.abs() > 1e-12 * scale.max(1.0) {
        return Err(SolverError::NonFinite {
            what: format!("energy has imaginary part {}", total.im),
            node: vec![],
        });
    }
    Ok(total.re)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    Phi,
    Rho,
    Current,
}

impl Quantity {
    pub fn name(&self) -> &'static str {
        match self {
            Quantity::Phi => "phi",
            Quantity::Rho => "rho",
            Quantity::Current => "J",
        }
    }
}

/// `‖num − ref‖_{l²} / ‖ref‖_{l²}` for the wave function, the density, or the current.
pub fn relative_error(
    num: &SpinorField,
    reference: &SpinorField,
    which: Quantity,
    epsilon: f64,
) -> Result<f64> {
    num.same_grid(reference)?;
    let (diff_sq, ref_sq) = match which {
        Quantity::Phi => (num.diff(reference)?.norm_sqr_l2(), reference.norm_sqr_l2()),
        Quantity::Rho => {
            let a = total_density(num);
            let b = total_density(reference);
            sq_pair(&[a], &[b])
        }
        Quantity::Current => sq_pair(&current_density(num, epsilon), &current_density(reference, epsilon)),
    };
    if ref_sq == 0.0 {
        return Err(SolverError::ZeroReference);
    }
    // the h^d weights cancel in the ratio for Rho and Current
    Ok((diff_sq / ref_sq).sqrt())
}

fn sq_pair(num: &[Vec<f64>], reference: &[Vec<f64>]) -> (f64, f64) {
    let mut diff = 0.0;
    let mut norm = 0.0;
    for (a, b) in num.iter().zip(reference) {
        for (x, y) in a.iter().zip(b) {
            diff += (x - y) * (x - y);
            norm += y * y;
        }
    }
    (diff, norm)
}

/// `log₂(e_k / e_{k+1})` for successive entries; `None` where an error is not positive.
pub fn convergence_order(errors: &[f64]) -> Vec<Option<f64>> {
    errors
        .windows(2)
        .map(|w| {
            if w[0] > 0.0 && w[1] > 0.0 && w[0].is_finite() && w[1].is_finite() {
                Some((w[0] / w[1]).log2())
            } else {
                None
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorTriple {
    pub e_phi: f64,
    pub e_rho: f64,
    pub e_j: f64,
}

impl ErrorTriple {
    pub fn measure(num: &SpinorField, reference: &SpinorField, epsilon: f64) -> Result<Self> {
        Ok(Self {
            e_phi: relative_error(num, reference, Quantity::Phi, epsilon)?,
            e_rho: relative_error(num, reference, Quantity::Rho, epsilon)?,
            e_j: relative_error(num, reference, Quantity::Current, epsilon)?,
        })
    }

    pub fn get(&self, q: Quantity) -> f64 {
        match q {
            Quantity::Phi => self.e_phi,
            Quantity::Rho => self.e_rho,
            Quantity::Current => self.e_j,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Space,
    Time,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::Space => "h",
            SweepAxis::Time => "tau",
        }
    }
}

/// Errors over an `(ε, resolution)` grid, one row per `ε`, resolutions halving left to right.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub axis: SweepAxis,
    pub epsilons: Vec<f64>,
    pub resolutions: Vec<f64>,
    /// `cells[row][col]`; `None` where a run was skipped or failed.
    pub cells: Vec<Vec<Option<ErrorTriple>>>,
}

impl ConvergenceTable {
    pub fn new(axis: SweepAxis, epsilons: Vec<f64>, resolutions: Vec<f64>) -> Self {
        let cells = vec![vec![None; resolutions.len()]; epsilons.len()];
        Self {
            axis,
            epsilons,
            resolutions,
            cells,
        }
    }

    pub fn errors(&self, row: usize, q: Quantity) -> Vec<f64> {
        self.cells[row]
            .iter()
            .map(|c| c.map_or(f64::NAN, |e| e.get(q)))
            .collect()
    }

    /// Orders between adjacent columns; entry `k` sits under column `k + 1`.
    pub fn orders(&self, row: usize, q: Quantity) -> Vec<Option<f64>> {
        convergence_order(&self.errors(row, q))
    }
}
