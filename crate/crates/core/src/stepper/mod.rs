//! Time steppers for the compact fourth-order schemes.

mod first_step;
mod implicit;
mod run;
mod semi_implicit;

use num_complex::Complex64;

pub use first_step::first_step;
pub use implicit::{implicit_step_1d, ImplicitSolver, ImplicitStepInfo};
pub use run::{run, Snapshot, StepDiagnostics, Trajectory};
pub use semi_implicit::{semi_implicit_step, SemiImplicitSolver};

use crate::config::{Scheme, SchemeConfig};
use crate::field::SpinorField;
use crate::pauli::{Mat2, Spinor};
use crate::potential::{PotentialBounds, SampledPotentials};

/// The two most recent time levels of a three-level recurrence.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoLevelState {
    /// `Φ^n`
    pub phi_curr: SpinorField,
    /// `Φ^{n-1}`
    pub phi_prev: SpinorField,
    pub n: usize,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub tau_max: f64,
    pub ok: bool,
    pub scheme: Scheme,
}

/// Stability gate: the semi-implicit scheme needs `τ ≤ 1/(V_max + Σ_j A_max[j])`;
/// the implicit scheme and the splitting reference are unconditionally stable.
pub fn check_stability(cfg: &SchemeConfig, bounds: &PotentialBounds) -> StabilityReport {
    let total = bounds.total();
    let tau_max = if total > 0.0 { 1.0 / total } else { f64::INFINITY };
    let ok = match cfg.scheme {
        Scheme::SemiImplicit4cfd => cfg.tau <= tau_max,
        Scheme::Implicit4cfd | Scheme::TsspReference => true,
    };
    StabilityReport {
        tau_max,
        ok,
        scheme: cfg.scheme,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

/// Von Neumann amplification factor of the implicit scheme for mode `l` on an `n`-point grid
/// with frozen potentials `v0`, `a10`. Unit modulus for every input.
#[allow(clippy::too_many_arguments)]
pub fn amplification_factor(
    l: i64,
    n: usize,
    h: f64,
    branch: Branch,
    epsilon: f64,
    tau: f64,
    v0: f64,
    a10: f64,
) -> Complex64 {
    let theta_h = 2.0 * std::f64::consts::PI * l as f64 / n as f64;
    let gamma = (theta_h.cos() + 2.0) / 3.0;
    let inner = -epsilon * a10 * h + theta_h.sin() / gamma;
    let root = (h * h + inner * inner).sqrt() / (epsilon * h);
    let theta = match branch {
        Branch::Plus => -v0 + root,
        Branch::Minus => -v0 - root,
    };
    let num = Complex64::new(2.0, tau * theta);
    let den = Complex64::new(2.0, -tau * theta);
    num / den
}

/// `G_j Φ_j` with `G_j = V_j I - Σ_k A_{k,j} σ_k`, node by node.
pub(crate) fn apply_potential(pots: &SampledPotentials, values: &[Spinor]) -> Vec<Spinor> {
    values
        .iter()
        .enumerate()
        .map(|(j, s)| potential_matrix(pots, j).apply(s))
        .collect()
}

pub(crate) fn potential_matrix(pots: &SampledPotentials, j: usize) -> Mat2 {
    let z = Complex64::default();
    let a1 = pots.a.first().map_or(0.0, |a| a[j]);
    let a2 = pots.a.get(1).map_or(0.0, |a| a[j]);
    Mat2::pauli(
        Complex64::new(pots.v[j], 0.0),
        Complex64::new(-a1, 0.0),
        Complex64::new(-a2, 0.0),
        z,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gate_thresholds() {
        let bounds = PotentialBounds {
            v_max: 1.0,
            a_max: vec![1.0],
        };
        let mut cfg = SchemeConfig::new(Scheme::SemiImplicit4cfd, 1.0, 0.5, 1.0);
        let r = check_stability(&cfg, &bounds);
        assert_eq!(r.tau_max, 0.5);
        assert!(r.ok);
        cfg.tau = 0.6;
        assert!(!check_stability(&cfg, &bounds).ok);
        cfg.scheme = Scheme::Implicit4cfd;
        cfg.tau = 100.0;
        assert!(check_stability(&cfg, &bounds).ok);
        let free = PotentialBounds {
            v_max: 0.0,
            a_max: vec![0.0, 0.0],
        };
        assert_eq!(check_stability(&cfg, &free).tau_max, f64::INFINITY);
    }

    #[test]
    fn amplification_unit_modulus_and_limits() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..2000 {
            let n = 2 * rng.gen_range(2..512);
            let l = rng.gen_range(-(n as i64) / 2..(n as i64) / 2);
            let eta = amplification_factor(
                l,
                n,
                rng.gen_range(1e-3..1.0),
                if rng.gen_bool(0.5) { Branch::Plus } else { Branch::Minus },
                rng.gen_range(1e-3..=1.0),
                rng.gen_range(1e-6..1.0),
                rng.gen_range(-5.0..5.0),
                rng.gen_range(-5.0..5.0),
            );
            assert!((eta.norm() - 1.0).abs() < 1e-13);
        }
        let eta = amplification_factor(3, 16, 0.3, Branch::Plus, 0.5, 0.0, 1.0, 1.0);
        assert_eq!(eta, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn amplification_zero_mode_formula() {
        // l = 0, V = A = 0, eps = h = 1: theta = ±1
        let tau = 0.3;
        let plus = amplification_factor(0, 8, 1.0, Branch::Plus, 1.0, tau, 0.0, 0.0);
        let minus = amplification_factor(0, 8, 1.0, Branch::Minus, 1.0, tau, 0.0, 0.0);
        let expect = Complex64::new(2.0, tau) / Complex64::new(2.0, -tau);
        assert!((plus - expect).norm() < 1e-15);
        assert!((minus - expect.conj()).norm() < 1e-15);
    }
}
