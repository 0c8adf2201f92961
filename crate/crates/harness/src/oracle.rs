//! Brute-force cross-checks of the fast solvers.
//!
//! Each check assembles an independent dense version of an operator (explicit circulant
//! matrices, direct LU solves, Taylor-series exponentials) and compares it with the
//! production code path on seeded random inputs.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use dirac4cfd::observables::mass_l2;
use dirac4cfd::spectral::{dft_forward, AxisSymbols};
use dirac4cfd::stepper::{amplification_factor, Branch, ImplicitSolver, SemiImplicitSolver};
use dirac4cfd::tssp::{expm_generic, free_propagator_mode, is_unitary, potential_propagator_point};
use dirac4cfd::{Complex64, Grid, Mat2, Preset, SampledPotentials, Spinor, SpinorField};

use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleCheck {
    pub name: String,
    pub n: usize,
    pub samples: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<OracleCheck>,
}

#[derive(Debug, Clone, Default)]
pub struct OracleOptions {
    /// Flip the sign of `γ_l` in the semi-implicit solver under test.
    pub flip_gamma_sign: bool,
    /// Random states per dense stepper check.
    pub states: Option<usize>,
    /// Parameter draws for the amplification-factor check.
    pub amplification_draws: Option<usize>,
}

pub const SEMI_TOL: f64 = 1e-12;
pub const IMPLICIT_TOL: f64 = 1e-10;
pub const PARSEVAL_TOL: f64 = 1e-12;
pub const UNITARY_TOL: f64 = 1e-12;
pub const MODULUS_TOL: f64 = 1e-13;

/// `(ε, τ)` pairs exercised by the dense stepper checks.
const STEP_PARAMS: [(f64, f64); 2] = [(1.0, 0.01), (0.25, 0.05)];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_field(rng: &mut ChaCha8Rng, grid: &Grid) -> SpinorField {
    let mut draw = || c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let values = (0..grid.len()).map(|_| Spinor::new(draw(), draw())).collect();
    SpinorField::from_values(*grid, values).expect("length matches grid")
}

fn to_vector(f: &SpinorField) -> DVector<Complex64> {
    DVector::from_iterator(2 * f.grid().len(), f.values().iter().flat_map(|s| [s.c1, s.c2]))
}

fn max_diff(f: &SpinorField, v: &DVector<Complex64>) -> f64 {
    f.values()
        .iter()
        .enumerate()
        .map(|(j, s)| (s.c1 - v[2 * j]).norm().max((s.c2 - v[2 * j + 1]).norm()))
        .fold(0.0, f64::max)
}

/// `𝒜_h⁻¹δ_x` on one periodic axis of `n` points, by inverting the stencil matrix.
fn compact_derivative_1d(n: usize, h: f64) -> DMatrix<f64> {
    let mut a = DMatrix::<f64>::zeros(n, n);
    let mut d = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let (l, r) = ((j + n - 1) % n, (j + 1) % n);
        a[(j, l)] += 1.0 / 6.0;
        a[(j, j)] += 4.0 / 6.0;
        a[(j, r)] += 1.0 / 6.0;
        d[(j, r)] += 1.0 / (2.0 * h);
        d[(j, l)] -= 1.0 / (2.0 * h);
    }
    a.try_inverse().expect("stencil matrix is invertible") * d
}

/// Per-axis compact derivatives over the flattened node index of `grid`.
fn compact_derivatives(grid: &Grid) -> Vec<DMatrix<f64>> {
    let k = compact_derivative_1d(grid.n(), grid.h());
    match grid.dim() {
        1 => vec![k],
        _ => {
            let id = DMatrix::<f64>::identity(grid.n(), grid.n());
            vec![k.kronecker(&id), id.kronecker(&k)]
        }
    }
}

/// `(1/ε)(−i Σ_k σ_k 𝒜_h⁻¹δ_k + σ₃)` as a dense matrix on node-major spinor unknowns.
fn free_hamiltonian(grid: &Grid, epsilon: f64) -> DMatrix<Complex64> {
    let m = grid.len();
    let mut hmat = DMatrix::<Complex64>::zeros(2 * m, 2 * m);
    for (axis, k) in compact_derivatives(grid).iter().enumerate() {
        let s = dirac4cfd::pauli::sigma(axis + 1);
        for j in 0..m {
            for l in 0..m {
                let kj = k[(j, l)];
                if kj == 0.0 {
                    continue;
                }
                for a in 0..2 {
                    for b in 0..2 {
                        hmat[(2 * j + a, 2 * l + b)] += c(0.0, -kj) * s.m[a][b];
                    }
                }
            }
        }
    }
    for j in 0..m {
        hmat[(2 * j, 2 * j)] += c(1.0, 0.0);
        hmat[(2 * j + 1, 2 * j + 1)] -= c(1.0, 0.0);
    }
    hmat / c(epsilon, 0.0)
}

/// `V_j I − Σ_k A_{k,j} σ_k` on the diagonal blocks.
fn potential_matrix(grid: &Grid, pots: &SampledPotentials) -> DMatrix<Complex64> {
    let m = grid.len();
    let mut g = DMatrix::<Complex64>::zeros(2 * m, 2 * m);
    for j in 0..m {
        let mut block = Mat2::IDENTITY.scale(c(pots.v[j], 0.0));
        for (k, a) in pots.a.iter().enumerate() {
            block = block - dirac4cfd::pauli::sigma(k + 1).scale(c(a[j], 0.0));
        }
        for a in 0..2 {
            for b in 0..2 {
                g[(2 * j + a, 2 * j + b)] = block.m[a][b];
            }
        }
    }
    g
}

fn identity(size: usize, scale: Complex64) -> DMatrix<Complex64> {
    DMatrix::<Complex64>::identity(size, size) * scale
}

fn check(name: &str, n: usize, samples: usize, max_error: f64, tolerance: f64) -> OracleCheck {
    OracleCheck {
        name: name.to_string(),
        n,
        samples,
        max_error,
        tolerance,
        passed: max_error.is_finite() && max_error <= tolerance,
    }
}

/// Semi-implicit step against the dense solve of
/// `(i/2τ − H/2) Φ⁺ = (i/2τ + H/2) Φ⁻ + G Φ`.
pub fn semi_implicit_dense(
    preset: Preset,
    n: usize,
    states: usize,
    rng: &mut ChaCha8Rng,
    flip_gamma_sign: bool,
) -> Result<OracleCheck> {
    let grid = preset.grid(n)?;
    let pots = preset.potentials().sample(&grid, 0.0)?;
    let size = 2 * grid.len();
    let g = potential_matrix(&grid, &pots);
    let mut worst = 0.0f64;
    for (epsilon, tau) in STEP_PARAMS {
        let mut symbols = AxisSymbols::new(&grid);
        if flip_gamma_sign {
            symbols.gamma.iter_mut().for_each(|x| *x = -*x);
        }
        let axes = vec![symbols; grid.dim()];
        let solver = SemiImplicitSolver::with_symbols(&grid, epsilon, tau, &axes)?;
        let hf = free_hamiltonian(&grid, epsilon) * c(0.5, 0.0);
        let diag = identity(size, c(0.0, 0.5 / tau));
        let lhs = (&diag - &hf).lu();
        let rhs_prev = &diag + &hf;
        for _ in 0..states {
            let prev = random_field(rng, &grid);
            let curr = random_field(rng, &grid);
            let fast = solver.step(&prev, &curr, &pots)?;
            let rhs = &rhs_prev * to_vector(&prev) + &g * to_vector(&curr);
            let dense = lhs.solve(&rhs).expect("dense system is nonsingular");
            worst = worst.max(max_diff(&fast, &dense));
        }
    }
    let name = if grid.dim() == 1 {
        "semi-implicit-dense"
    } else {
        "semi-implicit-dense-2d"
    };
    Ok(check(name, n, states * STEP_PARAMS.len(), worst, SEMI_TOL))
}

/// Implicit step against the dense solve of `(i/τ − H/2 − G/2) Φ⁺ = (i/τ + H/2 + G/2) Φ`.
pub fn implicit_dense(preset: Preset, n: usize, states: usize, rng: &mut ChaCha8Rng) -> Result<OracleCheck> {
    let grid = preset.grid(n)?;
    let pots = preset.potentials().sample(&grid, 0.0)?;
    let size = 2 * grid.len();
    let g = potential_matrix(&grid, &pots);
    let mut worst = 0.0f64;
    for (epsilon, tau) in STEP_PARAMS {
        let solver = ImplicitSolver::new(&grid, epsilon, tau, 1e-12, 200)?;
        let half = (free_hamiltonian(&grid, epsilon) + &g) * c(0.5, 0.0);
        let diag = identity(size, c(0.0, 1.0 / tau));
        let lhs = (&diag - &half).lu();
        let rhs_mat = &diag + &half;
        for _ in 0..states {
            let phi = random_field(rng, &grid);
            let (fast, _) = solver.step(&phi, &pots)?;
            let dense = lhs.solve(&(&rhs_mat * to_vector(&phi))).expect("dense system is nonsingular");
            worst = worst.max(max_diff(&fast, &dense));
        }
    }
    Ok(check("implicit-dense", n, states * STEP_PARAMS.len(), worst, IMPLICIT_TOL))
}

/// `‖U‖²_{l²} = L^d Σ_l |Ũ_l|²` on random fields.
pub fn parseval(n: usize, dim: usize, samples: usize, rng: &mut ChaCha8Rng) -> Result<OracleCheck> {
    let grid = Grid::new(0.0, 2.0 * std::f64::consts::PI, n, dim)?;
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let f = random_field(rng, &grid);
        let spec = dft_forward(&f);
        let modal: f64 = spec.coeffs().iter().map(Spinor::norm_sqr).sum::<f64>() * grid.length().powi(dim as i32);
        let nodal = mass_l2(&f);
        worst = worst.max((modal - nodal).abs() / nodal);
    }
    let name = if dim == 1 { "parseval" } else { "parseval-2d" };
    Ok(check(name, n, samples, worst, PARSEVAL_TOL))
}

/// Closed-form split propagators: unitary, and equal to a generic matrix exponential.
pub fn unitarity(samples: usize, rng: &mut ChaCha8Rng) -> OracleCheck {
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let dim = rng.gen_range(1..=2usize);
        let mu: Vec<f64> = (0..dim).map(|_| rng.gen_range(-64.0..64.0)).collect();
        let eps = rng.gen_range(0.01..1.0);
        let dt = rng.gen_range(0.0..0.1);
        let free = free_propagator_mode(&mu, eps, dt);
        let mut hm = Mat2::SIGMA3;
        for (k, m) in mu.iter().enumerate() {
            hm = hm + dirac4cfd::pauli::sigma(k + 1).scale(c(*m, 0.0));
        }
        let hm = hm.scale(c(1.0 / eps, 0.0));
        worst = worst.max(free.max_abs_diff(&expm_generic(&hm, dt)));
        worst = worst.max(unitary_defect(&free));

        let v = rng.gen_range(-5.0..5.0);
        let a: Vec<f64> = (0..dim).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let dt = rng.gen_range(0.0..1.0);
        let pot = potential_propagator_point(v, &a, dt);
        let mut gm = Mat2::IDENTITY.scale(c(v, 0.0));
        for (k, ak) in a.iter().enumerate() {
            gm = gm - dirac4cfd::pauli::sigma(k + 1).scale(c(*ak, 0.0));
        }
        worst = worst.max(pot.max_abs_diff(&expm_generic(&gm, dt)));
        worst = worst.max(unitary_defect(&pot));
        debug_assert!(is_unitary(&pot, 1e-12));
    }
    check("split-propagators", 2, samples, worst, UNITARY_TOL)
}

fn unitary_defect(m: &Mat2) -> f64 {
    (m.adjoint() * *m).max_abs_diff(&Mat2::IDENTITY)
}

/// `| |η_l| − 1 |` over random draws of `(ε, h, τ, V⁰, A⁰₁, l)` and both branches.
pub fn amplification_modulus(draws: usize, rng: &mut ChaCha8Rng) -> OracleCheck {
    let mut worst = 0.0f64;
    for _ in 0..draws {
        let n = 2 * rng.gen_range(2..=512usize);
        let h = 2.0 * std::f64::consts::PI / n as f64;
        let l = rng.gen_range(-(n as i64) / 2..(n as i64) / 2);
        let eps = rng.gen_range(1e-3..1.0);
        let tau = rng.gen_range(1e-6..1.0);
        let v0 = rng.gen_range(-10.0..10.0);
        let a0 = rng.gen_range(-10.0..10.0);
        let branch = if rng.gen_bool(0.5) { Branch::Plus } else { Branch::Minus };
        let eta = amplification_factor(l, n, h, branch, eps, tau, v0, a0);
        worst = worst.max((eta.norm() - 1.0).abs());
    }
    check("amplification-modulus", 0, draws, worst, MODULUS_TOL)
}

/// Runs every check at `N ∈ {8, 16}`; deterministic for a given seed.
pub fn run_oracles(seed: u64, opts: &OracleOptions) -> Result<OracleReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let states = opts.states.unwrap_or(100);
    let mut checks = Vec::new();
    for n in [8, 16] {
        checks.push(semi_implicit_dense(Preset::Standard1d, n, states, &mut rng, opts.flip_gamma_sign)?);
        checks.push(implicit_dense(Preset::Standard1d, n, states, &mut rng)?);
    }
    checks.push(semi_implicit_dense(
        Preset::PeriodicEm2d,
        8,
        states.div_ceil(10),
        &mut rng,
        opts.flip_gamma_sign,
    )?);
    for n in [8, 16, 64] {
        checks.push(parseval(n, 1, 20, &mut rng)?);
    }
    checks.push(parseval(8, 2, 20, &mut rng)?);
    checks.push(unitarity(1000, &mut rng));
    checks.push(amplification_modulus(opts.amplification_draws.unwrap_or(10_000), &mut rng));
    Ok(OracleReport {
        seed,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}
