//! Strang-split Fourier pseudospectral solver, used to manufacture reference solutions.
//!
//! The free part `(1/ε)(−iΣ_k σ_k∂_k + σ₃)` is propagated exactly per Fourier mode, the potential
//! part `V − Σ_k A_kσ_k` exactly per node. Each step applies half a potential flow, a full free
//! flow and another half potential flow.

use num_complex::Complex64;

use crate::error::{Result, SolverError};
use crate::field::SpinorField;
use crate::grid::Grid;
use crate::pauli::Mat2;
use crate::potential::PotentialSet;
use crate::spectral::Transform;

/// `exp(−i dt M)` with `M = (1/ε)(Σ_k μ_k σ_k + σ₃)`.
///
/// Since `M² = λ² I` with `λ = √(1 + |μ|²)/ε`, the exponential is
/// `cos(λ dt) I − i sin(λ dt) M/λ`.
pub fn free_propagator_mode(mu: &[f64], epsilon: f64, dt: f64) -> Mat2 {
    let mu1 = mu.first().copied().unwrap_or(0.0);
    let mu2 = mu.get(1).copied().unwrap_or(0.0);
    let lambda = (1.0 + mu1 * mu1 + mu2 * mu2).sqrt() / epsilon;
    let (s, c) = (lambda * dt).sin_cos();
    let m_over_lambda = Mat2::pauli(
        Complex64::default(),
        Complex64::new(mu1 / epsilon / lambda, 0.0),
        Complex64::new(mu2 / epsilon / lambda, 0.0),
        Complex64::new(1.0 / epsilon / lambda, 0.0),
    );
    Mat2::IDENTITY * c + m_over_lambda.scale(Complex64::new(0.0, -s))
}

/// `exp(−i dt (V − Σ_k A_k σ_k)) = e^{−i dt V}(cos(|A| dt) I + i sin(|A| dt) (A·σ)/|A|)`.
pub fn potential_propagator_point(v: f64, a: &[f64], dt: f64) -> Mat2 {
    let phase = Complex64::from_polar(1.0, -dt * v);
    let a1 = a.first().copied().unwrap_or(0.0);
    let a2 = a.get(1).copied().unwrap_or(0.0);
    let norm = (a1 * a1 + a2 * a2).sqrt();
    if norm == 0.0 {
        return Mat2::IDENTITY.scale(phase);
    }
    let (s, c) = (norm * dt).sin_cos();
    let rot = Mat2::IDENTITY * c
        + Mat2::pauli(
            Complex64::default(),
            Complex64::new(a1 / norm, 0.0),
            Complex64::new(a2 / norm, 0.0),
            Complex64::default(),
        )
        .scale(Complex64::new(0.0, s));
    rot.scale(phase)
}

/// Precomputed propagators for one grid, `ε` and step.
#[derive(Debug, Clone)]
pub struct TsspSolver {
    transform: Transform,
    pots: PotentialSet,
    epsilon: f64,
    dt: f64,
    free: Vec<Mat2>,
    /// Half-step potential propagators, cached when the potentials are static.
    static_half: Option<Vec<Mat2>>,
}

impl TsspSolver {
    pub fn new(grid: &Grid, pots: &PotentialSet, epsilon: f64, dt: f64) -> Result<Self> {
        if pots.dim() != grid.dim() {
            return Err(SolverError::GridMismatch("potential and grid dimensions differ".into()));
        }
        let transform = Transform::new(grid);
        let free = (0..grid.len())
            .map(|idx| {
                let mu: Vec<f64> = match grid.dim() {
                    1 => vec![grid.mu(grid.mode_of_slot(idx))],
                    _ => vec![
                        grid.mu(grid.mode_of_slot(idx / grid.n())),
                        grid.mu(grid.mode_of_slot(idx % grid.n())),
                    ],
                };
                free_propagator_mode(&mu, epsilon, dt)
            })
            .collect();
        let mut solver = Self {
            transform,
            pots: pots.clone(),
            epsilon,
            dt,
            free,
            static_half: None,
        };
        if pots.is_time_independent() {
            solver.static_half = Some(solver.potential_flow(0.0, 0.5 * dt)?);
        }
        Ok(solver)
    }

    pub fn grid(&self) -> &Grid {
        self.transform.grid()
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Pointwise propagators over `[t − len/2, t + len/2]`, potentials sampled at `t`.
    fn potential_flow(&self, t: f64, len: f64) -> Result<Vec<Mat2>> {
        let s = self.pots.sample(self.grid(), t)?;
        Ok((0..self.grid().len())
            .map(|j| {
                let a: Vec<f64> = s.a.iter().map(|arr| arr[j]).collect();
                potential_propagator_point(s.v[j], &a, len)
            })
            .collect())
    }

    fn apply_pointwise(mats: &[Mat2], field: &mut SpinorField) {
        for (v, m) in field.values_mut().iter_mut().zip(mats) {
            *v = m.apply(v);
        }
    }

    fn free_flow(&self, field: &SpinorField) -> SpinorField {
        let mut spec = self.transform.forward(field);
        for (c, m) in spec.coeffs_mut().iter_mut().zip(&self.free) {
            *c = m.apply(c);
        }
        self.transform.inverse(&spec)
    }

    fn half_potential(&self, t_mid: f64) -> Result<std::borrow::Cow<'_, [Mat2]>> {
        Ok(match &self.static_half {
            Some(m) => std::borrow::Cow::Borrowed(m.as_slice()),
            None => std::borrow::Cow::Owned(self.potential_flow(t_mid, 0.5 * self.dt)?),
        })
    }

    /// One Strang step from time `t` to `t + dt`.
    pub fn step(&self, field: &SpinorField, t: f64) -> Result<SpinorField> {
        let mut f = field.clone();
        Self::apply_pointwise(&self.half_potential(t + 0.25 * self.dt)?, &mut f);
        let mut f = self.free_flow(&f);
        Self::apply_pointwise(&self.half_potential(t + 0.75 * self.dt)?, &mut f);
        Ok(f)
    }

    /// Advances `field` over `steps` steps starting at `t0`. For static potentials the two
    /// adjacent half potential flows between steps are fused.
    pub fn advance(&self, field: &SpinorField, t0: f64, steps: usize) -> Result<SpinorField> {
        if steps == 0 {
            return Ok(field.clone());
        }
        match &self.static_half {
            Some(half) => {
                let full: Vec<Mat2> = half.iter().map(|m| *m * *m).collect();
                let mut f = field.clone();
                Self::apply_pointwise(half, &mut f);
                for k in 0..steps {
                    f = self.free_flow(&f);
                    let tail = if k + 1 == steps { half } else { &full };
                    Self::apply_pointwise(tail, &mut f);
                }
                Ok(f)
            }
            None => {
                let mut f = field.clone();
                for k in 0..steps {
                    f = self.step(&f, t0 + k as f64 * self.dt)?;
                }
                Ok(f)
            }
        }
    }
}

/// One splitting step of size `dt` from time `t`.
pub fn tssp_step(
    field: &SpinorField,
    pots: &PotentialSet,
    t: f64,
    epsilon: f64,
    dt: f64,
) -> Result<SpinorField> {
    TsspSolver::new(field.grid(), pots, epsilon, dt)?.step(field, t)
}

/// A reference trajectory sampled at a list of times.
#[derive(Debug, Clone)]
pub struct ReferenceSolution {
    pub grid: Grid,
    pub epsilon: f64,
    pub tau: f64,
    pub times: Vec<f64>,
    pub fields: Vec<SpinorField>,
}

impl ReferenceSolution {
    /// The reference at `t`, read at the nodes of `coarse`.
    pub fn at(&self, t: f64, coarse: &Grid) -> Result<SpinorField> {
        let k = self
            .times
            .iter()
            .position(|s| (s - t).abs() <= 1e-9 * t.abs().max(1.0))
            .ok_or_else(|| SolverError::InvalidConfig(format!("no reference sample at t = {t}")))?;
        self.fields[k].restrict_to(coarse)
    }
}

/// Integrates `phi0` with step `tau` and records the field at each of `sample_times`.
pub fn compute_reference(
    grid: &Grid,
    epsilon: f64,
    tau: f64,
    phi0: &SpinorField,
    pots: &PotentialSet,
    sample_times: &[f64],
) -> Result<ReferenceSolution> {
    if phi0.grid() != grid {
        return Err(SolverError::GridMismatch("initial data sampled on another grid".into()));
    }
    let mut order: Vec<(usize, usize)> = Vec::new();
    for (i, &t) in sample_times.iter().enumerate() {
        let ratio = t / tau;
        let n = ratio.round();
        if n < 0.0 || (ratio - n).abs() > 1e-9 * ratio.abs().max(1.0) {
            return Err(SolverError::InvalidConfig(format!(
                "sample time {t} is not a multiple of the reference step {tau}"
            )));
        }
        order.push((n as usize, i));
    }
    order.sort_unstable();
    let solver = TsspSolver::new(grid, pots, epsilon, tau)?;
    let mut fields = vec![SpinorField::zeros(*grid); sample_times.len()];
    let mut current = phi0.clone();
    let mut at_step = 0usize;
    for (n, i) in order {
        current = solver.advance(&current, at_step as f64 * tau, n - at_step)?;
        at_step = n;
        fields[i] = current.clone();
    }
    Ok(ReferenceSolution {
        grid: *grid,
        epsilon,
        tau,
        times: sample_times.to_vec(),
        fields,
    })
}

/// Exact propagator of a constant 2×2 Hamiltonian, by scaling and squaring a Taylor series.
/// Kept independent of the closed forms above so tests can cross-check them.
pub fn expm_generic(h: &Mat2, dt: f64) -> Mat2 {
    let a = h.scale(Complex64::new(0.0, -dt));
    let norm = a
        .m
        .iter()
        .flat_map(|r| r.iter())
        .map(|c| c.norm())
        .sum::<f64>();
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let scaled = a.scale(Complex64::new(0.5f64.powi(squarings), 0.0));
    let mut term = Mat2::IDENTITY;
    let mut sum = Mat2::IDENTITY;
    for k in 1..30 {
        term = (term * scaled).scale(Complex64::new(1.0 / k as f64, 0.0));
        sum = sum + term;
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}

/// `true` if `m* m = I` to `tol` entrywise.
pub fn is_unitary(m: &Mat2, tol: f64) -> bool {
    (m.adjoint() * *m).max_abs_diff(&Mat2::IDENTITY) <= tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::sample_field;
    use crate::pauli::Spinor;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;
    use std::sync::Arc;

    #[test]
    fn free_propagator_closed_forms() {
        assert!(free_propagator_mode(&[0.7, -0.2], 0.3, 0.0).max_abs_diff(&Mat2::IDENTITY) < 1e-15);
        let m = free_propagator_mode(&[0.0], 1.0, PI);
        assert!(m.max_abs_diff(&(Mat2::IDENTITY * -1.0)) < 1e-15);
    }

    #[test]
    fn potential_propagator_closed_forms() {
        assert_eq!(potential_propagator_point(0.0, &[0.0], 0.7), Mat2::IDENTITY);
        let m = potential_propagator_point(1.0, &[0.0, 0.0], PI);
        assert!(m.max_abs_diff(&(Mat2::IDENTITY * -1.0)) < 1e-15);
    }

    #[test]
    fn propagators_match_generic_exponential() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let mu = [rng.gen_range(-20.0..20.0), rng.gen_range(-20.0..20.0)];
            let eps = rng.gen_range(0.05..=1.0);
            let dt = rng.gen_range(-0.5..0.5);
            let h = Mat2::pauli(
                Complex64::default(),
                Complex64::new(mu[0] / eps, 0.0),
                Complex64::new(mu[1] / eps, 0.0),
                Complex64::new(1.0 / eps, 0.0),
            );
            let exact = free_propagator_mode(&mu, eps, dt);
            assert!(exact.max_abs_diff(&expm_generic(&h, dt)) < 1e-12);
            assert!(is_unitary(&exact, 1e-13));

            let v = rng.gen_range(-3.0..3.0);
            let a = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
            let hp = Mat2::pauli(
                Complex64::new(v, 0.0),
                Complex64::new(-a[0], 0.0),
                Complex64::new(-a[1], 0.0),
                Complex64::default(),
            );
            let p = potential_propagator_point(v, &a, dt);
            assert!(p.max_abs_diff(&expm_generic(&hp, dt)) < 1e-12);
            assert!(is_unitary(&p, 1e-13));
        }
    }

    #[test]
    fn free_step_is_single_mode_unitary() {
        let g = Grid::new(0.0, 2.0 * PI, 16, 1).unwrap();
        let c = Spinor::new(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8));
        let phi = sample_field(|x| c.scale(Complex64::from_polar(1.0, 3.0 * x[0])), &g).unwrap();
        let out = tssp_step(&phi, &PotentialSet::free(1), 0.0, 0.5, 0.1).unwrap();
        let u = free_propagator_mode(&[3.0], 0.5, 0.1);
        let want = sample_field(|x| u.apply(&c).scale(Complex64::from_polar(1.0, 3.0 * x[0])), &g).unwrap();
        assert!(out.diff(&want).unwrap().norm_max() < 1e-13);
    }

    #[test]
    fn constant_potentials_third_order_local_error() {
        // single mode, spatially constant potential: the full problem is one constant 2x2 system
        let g = Grid::new(0.0, 2.0 * PI, 8, 1).unwrap();
        let (v, a, eps, mu) = (0.7, -0.4, 0.5, 2.0);
        let pots = PotentialSet::new(Arc::new(move |_, _| v), vec![Arc::new(move |_, _| a)], true);
        let c = Spinor::real(0.6, 0.8);
        let phi = sample_field(|x| c.scale(Complex64::from_polar(1.0, mu * x[0])), &g).unwrap();
        let full = Mat2::pauli(
            Complex64::new(v, 0.0),
            Complex64::new(mu / eps - a, 0.0),
            Complex64::default(),
            Complex64::new(1.0 / eps, 0.0),
        );
        let mut errs = Vec::new();
        for dt in [0.02, 0.01, 0.005] {
            let out = tssp_step(&phi, &pots, 0.0, eps, dt).unwrap();
            let want_c = expm_generic(&full, dt).apply(&c);
            let want = sample_field(|x| want_c.scale(Complex64::from_polar(1.0, mu * x[0])), &g).unwrap();
            errs.push(out.diff(&want).unwrap().norm_max());
        }
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!((2.7..3.3).contains(&order), "local order {order}");
        }
    }

    #[test]
    fn norm_preserved_and_fused_advance_matches_steps() {
        let g = Grid::new(0.0, 2.0 * PI, 32, 1).unwrap();
        let pots = crate::presets::Preset::Standard1d.potentials();
        let phi = crate::presets::Preset::Standard1d.sample_initial(&g).unwrap();
        let solver = TsspSolver::new(&g, &pots, 0.5, 1e-3).unwrap();
        let mut f = phi.clone();
        for k in 0..50 {
            f = solver.step(&f, k as f64 * 1e-3).unwrap();
            assert!((f.norm_sqr_l2() - phi.norm_sqr_l2()).abs() < 1e-13 * phi.norm_sqr_l2());
        }
        let fused = solver.advance(&phi, 0.0, 50).unwrap();
        assert!(fused.diff(&f).unwrap().norm_max() < 1e-12);
    }

    #[test]
    fn reference_at_time_zero_is_initial_data() {
        let g = Grid::new(0.0, 2.0 * PI, 64, 1).unwrap();
        let pots = crate::presets::Preset::Standard1d.potentials();
        let phi = crate::presets::Preset::Standard1d.sample_initial(&g).unwrap();
        let r = compute_reference(&g, 1.0, 1e-3, &phi, &pots, &[0.0, 0.01]).unwrap();
        let coarse = Grid::new(0.0, 2.0 * PI, 16, 1).unwrap();
        assert_eq!(r.at(0.0, &coarse).unwrap(), phi.restrict_to(&coarse).unwrap());
        let odd = Grid::new(0.0, 2.0 * PI, 24, 1).unwrap();
        assert!(r.at(0.01, &odd).is_err());
        assert!(compute_reference(&g, 1.0, 1e-3, &phi, &pots, &[0.00015]).is_err());
    }
}
