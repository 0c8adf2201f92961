use num_complex::Complex64;

use crate::config::SchemeConfig;
use crate::error::{Result, SolverError};
use crate::field::SpinorField;
use crate::grid::Grid;
use crate::pauli::{Mat2, Spinor};
use crate::potential::SampledPotentials;
use crate::spectral::{AxisSymbols, Transform};

use super::apply_potential;

/// Crank–Nicolson step with compact fourth-order space discretization, 1D:
///
/// `i(Φ^{n+1} − Φ^n)/τ = (1/ε)(−iσ₁𝒜_h⁻¹δ_x + σ₃)Φ^{n+½} + G^{n+½}Φ^{n+½}`.
///
/// The constant-coefficient operator is diagonal in Fourier space, with symbol
/// `D_l = (sin(μ_l h)/(hγ_l))σ₁ + σ₃`, so the solve iterates
/// `P Φ^{(k+1)} = Q Φ^n + (τ/2) G (Φ^{(k)} + Φ^n)` with `P = i − (τ/2ε)D`, `Q = i + (τ/2ε)D`.
/// `P` has eigenvalues of modulus at least 1, so the map contracts when `τ |G| < 2`.
#[derive(Debug, Clone)]
pub struct ImplicitSolver {
    transform: Transform,
    p_inv: Vec<Mat2>,
    q: Vec<Mat2>,
    tau: f64,
    tol: f64,
    max_iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImplicitStepInfo {
    pub iterations: usize,
    /// Relative residual after each iteration.
    pub residuals: Vec<f64>,
}

impl ImplicitSolver {
    pub fn new(grid: &Grid, epsilon: f64, tau: f64, tol: f64, max_iterations: usize) -> Result<Self> {
        if grid.dim() != 1 {
            return Err(SolverError::Unsupported(
                "the implicit scheme is implemented in 1D only".into(),
            ));
        }
        let sym = AxisSymbols::new(grid);
        let c = tau / (2.0 * epsilon);
        let i = Mat2::IDENTITY.scale(Complex64::new(0.0, 1.0));
        let mut p_inv = Vec::with_capacity(grid.n());
        let mut q = Vec::with_capacity(grid.n());
        for slot in 0..grid.n() {
            let d = Mat2::SIGMA1 * sym.compact_derivative(slot) + Mat2::SIGMA3;
            let p = i - d * c;
            p_inv.push(p.inverse().ok_or(SolverError::SingularMode {
                mode: vec![grid.mode_of_slot(slot)],
                det: p.det().norm(),
            })?);
            q.push(i + d * c);
        }
        Ok(Self {
            transform: Transform::new(grid),
            p_inv,
            q,
            tau,
            tol,
            max_iterations,
        })
    }

    pub fn from_config(grid: &Grid, cfg: &SchemeConfig) -> Result<Self> {
        Self::new(grid, cfg.epsilon, cfg.tau, cfg.linear_solver_tol, cfg.max_iterations)
    }

    pub fn grid(&self) -> &Grid {
        self.transform.grid()
    }

    /// `Φ^{n+1}` from `Φ^n` with potentials sampled at `t_n + τ/2`.
    pub fn step(&self, phi: &SpinorField, pots: &SampledPotentials) -> Result<(SpinorField, ImplicitStepInfo)> {
        if phi.grid() != self.grid() {
            return Err(SolverError::GridMismatch("solver built for another grid".into()));
        }
        let grid = *self.grid();
        let half_tau = 0.5 * self.tau;
        let phi_hat = self.transform.forward(phi);
        let known: Vec<Spinor> = phi_hat
            .coeffs()
            .iter()
            .zip(&self.q)
            .map(|(c, q)| q.apply(c))
            .collect();
        // Parseval: ‖known‖² = (b − a) Σ |c|²
        let rhs_norm = (grid.length() * known.iter().map(Spinor::norm_sqr).sum::<f64>()).sqrt();
        if rhs_norm == 0.0 {
            return Ok((
                SpinorField::zeros(grid),
                ImplicitStepInfo {
                    iterations: 0,
                    residuals: vec![],
                },
            ));
        }

        let mut iterate = phi.clone();
        let mut g_iter = apply_potential(pots, iterate.values());
        let g_phi = apply_potential(pots, phi.values());
        let mut residuals = Vec::new();
        for it in 1..=self.max_iterations {
            let source: Vec<Spinor> = g_iter
                .iter()
                .zip(&g_phi)
                .map(|(a, b)| (*a + *b) * half_tau)
                .collect();
            let mut spec = self.transform.forward(&SpinorField::from_values(grid, source)?);
            for (slot, c) in spec.coeffs_mut().iter_mut().enumerate() {
                *c = self.p_inv[slot].apply(&(known[slot] + *c));
            }
            let next = self.transform.inverse(&spec);
            let g_next = apply_potential(pots, next.values());
            // residual of the full equation at `next`: (τ/2) G (Φ^{(k)} − Φ^{(k+1)})
            let res_sq: f64 = g_iter
                .iter()
                .zip(&g_next)
                .map(|(a, b)| ((*a - *b) * half_tau).norm_sqr())
                .sum::<f64>()
                * grid.h();
            let rel = res_sq.sqrt() / rhs_norm;
            residuals.push(rel);
            iterate = next;
            g_iter = g_next;
            if rel <= self.tol {
                return Ok((
                    iterate,
                    ImplicitStepInfo {
                        iterations: it,
                        residuals,
                    },
                ));
            }
            if !rel.is_finite() {
                break;
            }
        }
        Err(SolverError::NoConvergence {
            iterations: residuals.len(),
            residuals,
        })
    }
}

/// One implicit step; `pots` must be sampled at `t_n + τ/2`.
pub fn implicit_step_1d(
    phi_n: &SpinorField,
    pots: &SampledPotentials,
    cfg: &SchemeConfig,
) -> Result<SpinorField> {
    Ok(ImplicitSolver::from_config(phi_n.grid(), cfg)?.step(phi_n, pots)?.0)
}
