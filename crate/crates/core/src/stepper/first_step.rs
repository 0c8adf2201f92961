use num_complex::Complex64;

use crate::config::SchemeConfig;
use crate::error::{Result, SolverError};
use crate::field::SpinorField;
use crate::pauli::{sigma, Mat2};
use crate::potential::SampledPotentials;

use super::potential_matrix;

/// Second-order start value for the three-level scheme:
///
/// `Φ¹ = Φ₀ − sin(τ/ε) Σ_k σ_k ∂_kΦ₀ − i [sin(τ/ε) σ₃ + τ G⁰] Φ₀`, with `G⁰ = V⁰ I − Σ_k A⁰_k σ_k`.
///
/// `dphi0[k]` holds `∂_{k+1} Φ₀` at the nodes.
pub fn first_step(
    phi0: &SpinorField,
    dphi0: &[SpinorField],
    pots0: &SampledPotentials,
    cfg: &SchemeConfig,
) -> Result<SpinorField> {
    let grid = *phi0.grid();
    if dphi0.len() != grid.dim() {
        return Err(SolverError::InvalidConfig(format!(
            "expected {} derivative fields, got {}",
            grid.dim(),
            dphi0.len()
        )));
    }
    for d in dphi0 {
        phi0.same_grid(d)?;
    }
    let s = (cfg.tau / cfg.epsilon).sin();
    let minus_i = Complex64::new(0.0, -1.0);
    let values = phi0
        .values()
        .iter()
        .enumerate()
        .map(|(j, p)| {
            let mut out = *p;
            for (axis, d) in dphi0.iter().enumerate() {
                out -= sigma(axis + 1).apply(&d.values()[j]) * s;
            }
            let m: Mat2 = Mat2::SIGMA3 * s + potential_matrix(pots0, j) * cfg.tau;
            out + m.apply(p).scale(minus_i)
        })
        .collect();
    SpinorField::from_values(grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Scheme;
    use crate::field::sample_field;
    use crate::grid::Grid;
    use crate::pauli::Spinor;
    use std::f64::consts::PI;

    #[test]
    fn zero_in_zero_out() {
        let g = Grid::new(0.0, 2.0 * PI, 8, 1).unwrap();
        let cfg = SchemeConfig::new(Scheme::SemiImplicit4cfd, 1.0, 0.01, 1.0);
        let z = SpinorField::zeros(g);
        let mut pots = SampledPotentials::zeros(&g);
        pots.v.iter_mut().for_each(|v| *v = 2.0);
        let out = first_step(&z, std::slice::from_ref(&z), &pots, &cfg).unwrap();
        assert_eq!(out.norm_max(), 0.0);
    }

    #[test]
    fn constant_data_free_potential() {
        let g = Grid::new(0.0, 2.0 * PI, 8, 2).unwrap();
        let cfg = SchemeConfig::new(Scheme::SemiImplicit4cfd, 0.25, 0.1, 1.0);
        let c = Spinor::new(Complex64::new(0.5, 0.2), Complex64::new(-1.0, 0.3));
        let phi0 = sample_field(|_| c, &g).unwrap();
        let z = SpinorField::zeros(g);
        let out = first_step(&phi0, &[z.clone(), z], &SampledPotentials::zeros(&g), &cfg).unwrap();
        let s = (0.1f64 / 0.25).sin();
        let want = c - Mat2::SIGMA3.apply(&c).scale(Complex64::new(0.0, s));
        for v in out.values() {
            assert!((*v - want).norm_sqr() < 1e-30);
        }
    }

    #[test]
    fn wrong_derivative_count() {
        let g = Grid::new(0.0, 1.0, 8, 2).unwrap();
        let cfg = SchemeConfig::new(Scheme::SemiImplicit4cfd, 1.0, 0.1, 1.0);
        let z = SpinorField::zeros(g);
        assert!(first_step(&z, std::slice::from_ref(&z), &SampledPotentials::zeros(&g), &cfg).is_err());
    }
}
