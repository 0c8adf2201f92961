use num_complex::Complex64;

use crate::config::SchemeConfig;
use crate::error::{Result, SolverError};
use crate::field::SpinorField;
use crate::grid::Grid;
use crate::pauli::{Mat2, Spinor};
use crate::potential::SampledPotentials;
use crate::spectral::{AxisSymbols, Transform};

use super::{apply_potential, TwoLevelState};

/// Mode-decoupled solver for the three-level scheme
///
/// `i δ_t Φ^n = (1/ε)(−i Σ_k σ_k 𝒜_h⁻¹ δ_k + σ₃)(Φ^{n+1} + Φ^{n−1})/2 + G^n Φ^n`.
///
/// Multiplying through by the tensor-product symbol `γ = Π_k γ_{l_k}` of `𝒜_h` gives, per mode,
/// `(iγ − (τ/ε)M) Φ̃^{n+1} = (iγ + (τ/ε)M) Φ̃^{n−1} + 2τγ (G^nΦ^n)~` with
/// `M = Σ_k (sin(μ_{l_k} h)/h) (Π_{m≠k} γ_{l_m}) σ_k + γ σ₃`.
#[derive(Debug, Clone)]
pub struct SemiImplicitSolver {
    transform: Transform,
    lhs_inv: Vec<Mat2>,
    rhs_prev: Vec<Mat2>,
    source_weight: Vec<f64>,
}

impl SemiImplicitSolver {
    pub fn new(grid: &Grid, epsilon: f64, tau: f64) -> Result<Self> {
        let axis = AxisSymbols::new(grid);
        let axes = vec![axis; grid.dim()];
        Self::with_symbols(grid, epsilon, tau, &axes)
    }

    /// Builds the solver from explicit per-axis symbols. [`SemiImplicitSolver::new`] is the
    /// normal entry point; this one exists so oracle checks can feed perturbed symbols.
    pub fn with_symbols(grid: &Grid, epsilon: f64, tau: f64, axes: &[AxisSymbols]) -> Result<Self> {
        if axes.len() != grid.dim() {
            return Err(SolverError::InvalidConfig("one symbol set per axis required".into()));
        }
        let n = grid.n();
        let k = tau / epsilon;
        let i = Complex64::new(0.0, 1.0);
        let mut lhs_inv = Vec::with_capacity(grid.len());
        let mut rhs_prev = Vec::with_capacity(grid.len());
        let mut source_weight = Vec::with_capacity(grid.len());
        for idx in 0..grid.len() {
            let slots: Vec<usize> = match grid.dim() {
                1 => vec![idx],
                _ => vec![idx / n, idx % n],
            };
            let gammas: Vec<f64> = slots.iter().zip(axes).map(|(&s, a)| a.gamma[s]).collect();
            let gamma: f64 = gammas.iter().product();
            let mut c = [0.0f64; 2];
            for (ax, (&s, a)) in slots.iter().zip(axes).enumerate() {
                let others: f64 = gammas
                    .iter()
                    .enumerate()
                    .filter(|(m, _)| *m != ax)
                    .map(|(_, g)| g)
                    .product();
                c[ax] = a.sin_over_h[s] * others;
            }
            let m = Mat2::pauli(
                Complex64::default(),
                Complex64::new(c[0], 0.0),
                Complex64::new(c[1], 0.0),
                Complex64::new(gamma, 0.0),
            );
            let diag = Mat2::IDENTITY.scale(i * gamma);
            let lhs = diag - m * k;
            let det = lhs.det().norm();
            if !(det >= gamma * gamma * (1.0 - 1e-12)) {
                return Err(SolverError::SingularMode {
                    mode: slots.iter().map(|&s| grid.mode_of_slot(s)).collect(),
                    det,
                });
            }
            lhs_inv.push(lhs.inverse().ok_or(SolverError::SingularMode {
                mode: slots.iter().map(|&s| grid.mode_of_slot(s)).collect(),
                det,
            })?);
            rhs_prev.push(diag + m * k);
            source_weight.push(2.0 * tau * gamma);
        }
        Ok(Self {
            transform: Transform::new(grid),
            lhs_inv,
            rhs_prev,
            source_weight,
        })
    }

    pub fn grid(&self) -> &Grid {
        self.transform.grid()
    }

    /// `Φ^{n+1}` from `Φ^{n−1}`, `Φ^n` and the potentials sampled at `t_n`.
    pub fn step(
        &self,
        phi_prev: &SpinorField,
        phi_curr: &SpinorField,
        pots: &SampledPotentials,
    ) -> Result<SpinorField> {
        phi_prev.same_grid(phi_curr)?;
        if phi_curr.grid() != self.grid() {
            return Err(SolverError::GridMismatch("solver built for another grid".into()));
        }
        let prev_hat = self.transform.forward(phi_prev);
        let source = SpinorField::from_values(*self.grid(), apply_potential(pots, phi_curr.values()))?;
        let source_hat = self.transform.forward(&source);
        let mut next_hat = prev_hat;
        for (idx, c) in next_hat.coeffs_mut().iter_mut().enumerate() {
            let rhs: Spinor =
                self.rhs_prev[idx].apply(c) + source_hat.coeffs()[idx] * self.source_weight[idx];
            *c = self.lhs_inv[idx].apply(&rhs);
        }
        Ok(self.transform.inverse(&next_hat))
    }
}

/// One step of the semi-implicit scheme from `state`, with potentials sampled at `t_n`.
pub fn semi_implicit_step(
    state: &TwoLevelState,
    pots: &SampledPotentials,
    cfg: &SchemeConfig,
) -> Result<SpinorField> {
    if state.n < 1 {
        return Err(SolverError::InvalidConfig(
            "the three-level step needs n >= 1; use first_step for n = 0".into(),
        ));
    }
    SemiImplicitSolver::new(state.phi_curr.grid(), cfg.epsilon, cfg.tau)?.step(
        &state.phi_prev,
        &state.phi_curr,
        pots,
    )
}
