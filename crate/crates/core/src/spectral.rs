//! Discrete Fourier transforms of spinor fields and the compact difference operators.
//!
//! Transforms follow `Ũ_l = (1/N) Σ_j U_j e^{-2πi jl/N}` and
//! `U_j = Σ_l Ũ_l e^{2πi jl/N}`, applied per component and, in 2D, per axis.
//! Coefficients are stored in FFT slot order (`l mod N`); use [`ModeSpectrum::get`]
//! to address them by mode index.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::field::SpinorField;
use crate::grid::Grid;
use crate::pauli::Spinor;

/// Fourier coefficients of a [`SpinorField`].
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSpectrum {
    grid: Grid,
    coeffs: Vec<Spinor>,
}

impl ModeSpectrum {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            coeffs: vec![Spinor::ZERO; grid.len()],
            grid,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Coefficients in slot order.
    pub fn coeffs(&self) -> &[Spinor] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Spinor] {
        &mut self.coeffs
    }

    fn slot(&self, modes: &[i64]) -> usize {
        match modes {
            [l] => self.grid.slot_of_mode(*l),
            [l1, l2] => self.grid.slot_of_mode(*l1) * self.grid.n() + self.grid.slot_of_mode(*l2),
            _ => panic!("expected one mode index per axis"),
        }
    }

    /// Coefficient of mode `(l)` in 1D or `(l1, l2)` in 2D.
    pub fn get(&self, modes: &[i64]) -> Spinor {
        self.coeffs[self.slot(modes)]
    }

    pub fn set(&mut self, modes: &[i64], value: Spinor) {
        let s = self.slot(modes);
        self.coeffs[s] = value;
    }

    /// Mode indices of slot `idx`, one per axis.
    pub fn modes_of_slot(&self, idx: usize) -> [i64; 2] {
        let g = &self.grid;
        match g.dim() {
            1 => [g.mode_of_slot(idx), 0],
            _ => [g.mode_of_slot(idx / g.n()), g.mode_of_slot(idx % g.n())],
        }
    }
}

/// Cached FFT plans for one grid.
#[derive(Clone)]
pub struct Transform {
    grid: Grid,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Transform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Transform").field("grid", &self.grid).finish()
    }
}

impl Transform {
    pub fn new(grid: &Grid) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            grid: *grid,
            forward: planner.plan_fft_forward(grid.n()),
            inverse: planner.plan_fft_inverse(grid.n()),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    fn transform_plane(&self, plan: &Arc<dyn Fft<f64>>, data: &mut [Complex64]) {
        let n = self.grid.n();
        let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
        // rows (or the whole 1D line)
        plan.process_with_scratch(data, &mut scratch);
        if self.grid.dim() == 2 {
            transpose_square(data, n);
            plan.process_with_scratch(data, &mut scratch);
            transpose_square(data, n);
        }
    }

    fn run(&self, input: &[Spinor], plan: &Arc<dyn Fft<f64>>, scale: f64) -> Vec<Spinor> {
        let mut c1: Vec<Complex64> = input.iter().map(|s| s.c1).collect();
        let mut c2: Vec<Complex64> = input.iter().map(|s| s.c2).collect();
        self.transform_plane(plan, &mut c1);
        self.transform_plane(plan, &mut c2);
        c1.into_iter()
            .zip(c2)
            .map(|(a, b)| Spinor::new(a * scale, b * scale))
            .collect()
    }

    pub fn forward(&self, field: &SpinorField) -> ModeSpectrum {
        assert_eq!(field.grid(), &self.grid, "transform planned for a different grid");
        let scale = 1.0 / self.grid.len() as f64;
        ModeSpectrum {
            grid: self.grid,
            coeffs: self.run(field.values(), &self.forward, scale),
        }
    }

    pub fn inverse(&self, spec: &ModeSpectrum) -> SpinorField {
        assert_eq!(spec.grid(), &self.grid, "transform planned for a different grid");
        let values = self.run(&spec.coeffs, &self.inverse, 1.0);
        SpinorField::from_values(self.grid, values).expect("length preserved by transform")
    }

    /// Forward transform, pointwise 2×2 or scalar action per mode, inverse transform.
    pub fn apply_per_mode<F>(&self, field: &SpinorField, mut f: F) -> SpinorField
    where
        F: FnMut([i64; 2], Spinor) -> Spinor,
    {
        let mut spec = self.forward(field);
        for idx in 0..spec.coeffs.len() {
            let modes = spec.modes_of_slot(idx);
            spec.coeffs[idx] = f(modes, spec.coeffs[idx]);
        }
        self.inverse(&spec)
    }
}

fn transpose_square(data: &mut [Complex64], n: usize) {
    for r in 0..n {
        for c in (r + 1)..n {
            data.swap(r * n + c, c * n + r);
        }
    }
}

pub fn dft_forward(field: &SpinorField) -> ModeSpectrum {
    Transform::new(field.grid()).forward(field)
}

pub fn dft_inverse(spec: &ModeSpectrum) -> SpinorField {
    Transform::new(spec.grid()).inverse(spec)
}

/// Symbol of the averaging operator at mode `l`: `γ_l = (cos(μ_l h) + 2)/3`.
pub fn gamma(l: i64, n: usize, h: f64) -> f64 {
    let mu = 2.0 * std::f64::consts::PI * l as f64 / (n as f64 * h);
    ((mu * h).cos() + 2.0) / 3.0
}

/// Per-axis symbols `γ_l` and `sin(μ_l h)/h`, stored in slot order.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisSymbols {
    pub gamma: Vec<f64>,
    pub sin_over_h: Vec<f64>,
}

impl AxisSymbols {
    pub fn new(grid: &Grid) -> Self {
        let h = grid.h();
        let (gamma, sin_over_h) = (0..grid.n())
            .map(|k| {
                let l = grid.mode_of_slot(k);
                let theta = grid.mu(l) * h;
                (gamma(l, grid.n(), h), theta.sin() / h)
            })
            .unzip();
        Self { gamma, sin_over_h }
    }

    /// Symbol of the compact derivative `𝒜_h⁻¹ δ_x` divided by `i`.
    pub fn compact_derivative(&self, slot: usize) -> f64 {
        self.sin_over_h[slot] / self.gamma[slot]
    }
}

fn axis_stride(grid: &Grid, axis: usize) -> usize {
    match (grid.dim(), axis) {
        (1, 1) => 1,
        (2, 1) => grid.n(),
        (2, 2) => 1,
        _ => panic!("axis {axis} out of range for a {}D grid", grid.dim()),
    }
}

/// Applies a periodic three-point stencil `w_m U_{j-1} + w_0 U_j + w_p U_{j+1}` along `axis`.
fn three_point(field: &SpinorField, axis: usize, w_m: f64, w_0: f64, w_p: f64) -> SpinorField {
    let grid = *field.grid();
    let n = grid.n();
    let stride = axis_stride(&grid, axis);
    let vals = field.values();
    let out = (0..grid.len())
        .map(|idx| {
            let j = (idx / stride) % n;
            let base = idx - j * stride;
            let prev = base + ((j + n - 1) % n) * stride;
            let next = base + ((j + 1) % n) * stride;
            vals[prev] * w_m + vals[idx] * w_0 + vals[next] * w_p
        })
        .collect();
    SpinorField::from_values(grid, out).expect("same grid")
}

/// Centered difference `(U_{j+1} - U_{j-1}) / 2h` along `axis` (1 or 2).
pub fn apply_delta_x(field: &SpinorField, axis: usize) -> SpinorField {
    let w = 1.0 / (2.0 * field.grid().h());
    three_point(field, axis, -w, 0.0, w)
}

/// `(U_{j-1} + 4 U_j + U_{j+1}) / 6` along `axis`.
pub fn apply_ah(field: &SpinorField, axis: usize) -> SpinorField {
    three_point(field, axis, 1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0)
}

fn axis_mode(modes: [i64; 2], axis: usize) -> i64 {
    modes[axis - 1]
}

/// Inverse of [`apply_ah`] by division of each mode by `γ_l`.
pub fn apply_ah_inv(field: &SpinorField, axis: usize) -> SpinorField {
    let g = *field.grid();
    axis_stride(&g, axis);
    Transform::new(&g).apply_per_mode(field, |m, c| c * (1.0 / gamma(axis_mode(m, axis), g.n(), g.h())))
}

/// `𝒜_h⁻¹ δ_x` along `axis`, applied through its Fourier symbol `i sin(μ_l h)/(h γ_l)`.
pub fn compact_derivative(transform: &Transform, field: &SpinorField, axis: usize) -> SpinorField {
    let g = *transform.grid();
    axis_stride(&g, axis);
    transform.apply_per_mode(field, |m, c| {
        let l = axis_mode(m, axis);
        let theta = g.mu(l) * g.h();
        c * Complex64::new(0.0, theta.sin() / (g.h() * gamma(l, g.n(), g.h())))
    })
}

/// Exact derivative of the trigonometric interpolant; the Nyquist mode `l = -N/2` is dropped.
pub fn spectral_derivative(field: &SpinorField, axis: usize) -> SpinorField {
    let g = *field.grid();
    axis_stride(&g, axis);
    let nyquist = -((g.n() / 2) as i64);
    Transform::new(&g).apply_per_mode(field, |m, c| {
        let l = axis_mode(m, axis);
        if l == nyquist {
            Spinor::ZERO
        } else {
            c * Complex64::new(0.0, g.mu(l))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::sample_field;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_field(grid: &Grid, seed: u64) -> SpinorField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vals = (0..grid.len())
            .map(|_| {
                Spinor::new(
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                )
            })
            .collect();
        SpinorField::from_values(*grid, vals).unwrap()
    }

    fn max_diff(a: &SpinorField, b: &SpinorField) -> f64 {
        a.diff(b).unwrap().norm_max()
    }

    /// Direct O(N²) evaluation of the forward sum, 1D.
    fn naive_forward(field: &SpinorField) -> Vec<Spinor> {
        let n = field.grid().n();
        (0..n)
            .map(|k| {
                let l = field.grid().mode_of_slot(k);
                let mut acc = Spinor::ZERO;
                for (j, v) in field.values().iter().enumerate() {
                    let ph = Complex64::from_polar(1.0, -2.0 * PI * (j as f64) * (l as f64) / n as f64);
                    acc += v.scale(ph);
                }
                acc * (1.0 / n as f64)
            })
            .collect()
    }

    #[test]
    fn constant_field_has_only_mean_mode() {
        let g = Grid::new(0.0, 2.0 * PI, 8, 1).unwrap();
        let f = sample_field(|_| Spinor::real(1.0, 0.0), &g).unwrap();
        let s = dft_forward(&f);
        for l in g.modes() {
            let expect = if l == 0 { Spinor::real(1.0, 0.0) } else { Spinor::ZERO };
            assert!((s.get(&[l]) - expect).norm_sqr() < 1e-28);
        }
    }

    #[test]
    fn plane_wave_selects_its_mode() {
        let g = Grid::new(0.0, 2.0 * PI, 8, 1).unwrap();
        let f = sample_field(
            |x| Spinor::new(Complex64::from_polar(1.0, g.mu(1) * (x[0] - g.a())), Complex64::default()),
            &g,
        )
        .unwrap();
        let s = dft_forward(&f);
        for l in g.modes() {
            let expect = if l == 1 { Spinor::real(1.0, 0.0) } else { Spinor::ZERO };
            assert!((s.get(&[l]) - expect).norm_sqr() < 1e-28);
        }
    }

    #[test]
    fn forward_matches_direct_sum() {
        let g = Grid::new(-1.0, 3.0, 8, 1).unwrap();
        let f = random_field(&g, 4);
        let s = dft_forward(&f);
        for (a, b) in s.coeffs().iter().zip(naive_forward(&f)) {
            assert!((*a - b).norm_sqr().sqrt() < 1e-15);
        }
    }

    #[test]
    fn inverse_of_mean_and_zero() {
        let g = Grid::new(0.0, 1.0, 8, 2).unwrap();
        let mut s = ModeSpectrum::zeros(g);
        assert_eq!(dft_inverse(&s).norm_max(), 0.0);
        s.set(&[0, 0], Spinor::real(1.0, 0.0));
        let f = dft_inverse(&s);
        assert!(f.values().iter().all(|v| (*v - Spinor::real(1.0, 0.0)).norm_sqr() < 1e-30));
    }

    #[test]
    fn inverse_of_delta_spectrum() {
        // spectrum of a delta at node 0 is 1/N in every mode; the direct sum gives back N·(1/N) at j = 0
        let g = Grid::new(0.0, 1.0, 8, 1).unwrap();
        let mut s = ModeSpectrum::zeros(g);
        for c in s.coeffs_mut() {
            *c = Spinor::real(1.0 / 8.0, 0.0);
        }
        let f = dft_inverse(&s);
        for (j, v) in f.values().iter().enumerate() {
            let expect = if j == 0 { 1.0 } else { 0.0 };
            assert!((v.c1 - expect).norm() < 1e-15 && v.c2.norm() == 0.0);
        }
    }

    #[test]
    fn round_trip_and_parseval() {
        for (dim, n) in [(1, 8), (1, 16), (1, 64), (2, 8), (2, 16)] {
            let g = Grid::new(-2.0, 5.0, n, dim).unwrap();
            let f = random_field(&g, n as u64);
            let t = Transform::new(&g);
            let s = t.forward(&f);
            let back = t.inverse(&s);
            assert!(back.diff(&f).unwrap().norm_l2() <= 1e-13 * f.norm_l2());
            let parseval = g.length().powi(dim as i32) * s.coeffs().iter().map(Spinor::norm_sqr).sum::<f64>();
            assert!((parseval - f.norm_sqr_l2()).abs() <= 1e-12 * f.norm_sqr_l2());
        }
    }

    #[test]
    fn gamma_endpoints() {
        let n = 16;
        let h = 2.0 * PI / n as f64;
        assert_eq!(gamma(0, n, h), 1.0);
        assert!((gamma(4, n, h) - 2.0 / 3.0).abs() < 1e-15);
        assert!((gamma(-8, n, h) - 1.0 / 3.0).abs() < 1e-15);
        let g = Grid::new(0.0, 2.0 * PI, n, 1).unwrap();
        assert!(g.modes().all(|l| gamma(l, n, h) >= 1.0 / 3.0 - 1e-15));
    }

    /// Dense circulant matrix for the stencil (w_m, w_0, w_p), 1D.
    fn circulant(n: usize, w_m: f64, w_0: f64, w_p: f64) -> Vec<Vec<f64>> {
        let mut m = vec![vec![0.0; n]; n];
        for j in 0..n {
            m[j][(j + n - 1) % n] += w_m;
            m[j][j] += w_0;
            m[j][(j + 1) % n] += w_p;
        }
        m
    }

    fn mat_apply(m: &[Vec<f64>], f: &SpinorField) -> Vec<Spinor> {
        m.iter()
            .map(|row| {
                row.iter()
                    .zip(f.values())
                    .fold(Spinor::ZERO, |acc, (w, v)| acc + *v * *w)
            })
            .collect()
    }

    /// Gauss–Jordan inverse of a small real matrix.
    fn invert(mut m: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
        let n = m.len();
        let mut inv: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as u8 as f64).collect()).collect();
        for c in 0..n {
            let p = (c..n).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs())).unwrap();
            m.swap(c, p);
            inv.swap(c, p);
            let d = m[c][c];
            for k in 0..n {
                m[c][k] /= d;
                inv[c][k] /= d;
            }
            for r in 0..n {
                if r != c {
                    let f = m[r][c];
                    for k in 0..n {
                        m[r][k] -= f * m[c][k];
                        inv[r][k] -= f * inv[c][k];
                    }
                }
            }
        }
        inv
    }

    #[test]
    fn stencils_match_dense_matrices() {
        let g = Grid::new(0.0, 2.0 * PI, 8, 1).unwrap();
        let f = random_field(&g, 11);
        let h = g.h();
        let dx = circulant(8, -1.0 / (2.0 * h), 0.0, 1.0 / (2.0 * h));
        let ah = circulant(8, 1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0);
        let ah_inv = invert(ah.clone());
        let cases = [
            (apply_delta_x(&f, 1), mat_apply(&dx, &f)),
            (apply_ah(&f, 1), mat_apply(&ah, &f)),
            (apply_ah_inv(&f, 1), mat_apply(&ah_inv, &f)),
        ];
        for (got, want) in cases {
            let want = SpinorField::from_values(g, want).unwrap();
            assert!(max_diff(&got, &want) < 1e-14, "{}", max_diff(&got, &want));
        }
    }

    #[test]
    fn delta_x_on_sine() {
        let g = Grid::new(0.0, 2.0 * PI, 64, 1).unwrap();
        let f = sample_field(|x| Spinor::real(x[0].sin(), 0.0), &g).unwrap();
        let d = apply_delta_x(&f, 1);
        let h = g.h();
        for (j, v) in d.values().iter().enumerate() {
            assert!((v.c1.re - g.x(j).cos() * h.sin() / h).abs() < 1e-14);
        }
        let c = sample_field(|_| Spinor::real(2.0, -1.0), &g).unwrap();
        assert!(apply_delta_x(&c, 1).norm_max() < 1e-13);
        assert!(max_diff(&apply_ah(&c, 1), &c) < 1e-15);
    }

    #[test]
    fn operator_symbols_on_plane_waves() {
        for dim in [1, 2] {
            let g = Grid::new(0.0, 3.0, 16, dim).unwrap();
            let h = g.h();
            for l in g.modes() {
                for axis in 1..=dim {
                    let f = sample_field(
                        |x| {
                            let ph = Complex64::from_polar(1.0, g.mu(l) * (x[axis - 1] - g.a()));
                            Spinor::new(ph, ph * 0.5)
                        },
                        &g,
                    )
                    .unwrap();
                    let theta = g.mu(l) * h;
                    let dx = f.scaled(Complex64::new(0.0, theta.sin() / h));
                    let ah = f.scaled(Complex64::new(gamma(l, g.n(), h), 0.0));
                    assert!(max_diff(&apply_delta_x(&f, axis), &dx) < 1e-13);
                    assert!(max_diff(&apply_ah(&f, axis), &ah) < 1e-13);
                }
            }
        }
    }

    #[test]
    fn ah_inverse_and_commutation() {
        for dim in [1, 2] {
            let g = Grid::new(0.0, 2.0 * PI, 16, dim).unwrap();
            let f = random_field(&g, 21);
            for axis in 1..=dim {
                assert!(max_diff(&apply_ah_inv(&apply_ah(&f, axis), axis), &f) < 1e-12);
                let a = apply_ah_inv(&apply_delta_x(&f, axis), axis);
                let b = apply_delta_x(&apply_ah_inv(&f, axis), axis);
                let c = compact_derivative(&Transform::new(&g), &f, axis);
                assert!(max_diff(&a, &b) < 1e-13 * f.norm_max() / g.h());
                assert!(max_diff(&a, &c) < 1e-13 * f.norm_max() / g.h());
                let d = apply_ah(&apply_delta_x(&f, axis), axis);
                let e = apply_delta_x(&apply_ah(&f, axis), axis);
                assert!(max_diff(&d, &e) < 1e-13 * f.norm_max() / g.h());
            }
        }
    }

    #[test]
    fn compact_derivative_is_fourth_order() {
        let mut errs = Vec::new();
        for n in [16, 32, 64, 128] {
            let g = Grid::new(0.0, 2.0 * PI, n, 1).unwrap();
            let f = sample_field(|x| Spinor::real(x[0].sin(), 0.0), &g).unwrap();
            let d = apply_ah_inv(&apply_delta_x(&f, 1), 1);
            let err = d
                .values()
                .iter()
                .enumerate()
                .map(|(j, v)| (v.c1 - Complex64::new(g.x(j).cos(), 0.0)).norm())
                .fold(0.0, f64::max);
            errs.push(err);
        }
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!((3.8..=4.2).contains(&order), "order {order}");
        }
    }

    #[test]
    fn spectral_derivative_cases() {
        let g = Grid::new(0.0, 2.0 * PI, 32, 1).unwrap();
        let c = sample_field(|_| Spinor::real(1.0, 1.0), &g).unwrap();
        assert!(spectral_derivative(&c, 1).norm_max() < 1e-14);

        let f = sample_field(|x| Spinor::real(x[0].sin(), 0.0), &g).unwrap();
        let want = sample_field(|x| Spinor::real(x[0].cos(), 0.0), &g).unwrap();
        assert!(max_diff(&spectral_derivative(&f, 1), &want) < 1e-12);

        let e = sample_field(|x| Spinor::new(Complex64::from_polar(1.0, 2.0 * x[0]), Complex64::default()), &g).unwrap();
        let want = e.scaled(Complex64::new(0.0, 2.0));
        assert!(max_diff(&spectral_derivative(&e, 1), &want) < 1e-12);

        // Nyquist mode is dropped
        let nyq = sample_field(|x| Spinor::real((16.0 * x[0]).cos(), 0.0), &g).unwrap();
        assert!(spectral_derivative(&nyq, 1).norm_max() < 1e-12);
    }

    #[test]
    fn two_dimensional_derivative_per_axis() {
        let g = Grid::new(0.0, 2.0 * PI, 16, 2).unwrap();
        let f = sample_field(|x| Spinor::real(x[0].sin() * (2.0 * x[1]).cos(), 0.0), &g).unwrap();
        let dy = sample_field(|x| Spinor::real(-2.0 * x[0].sin() * (2.0 * x[1]).sin(), 0.0), &g).unwrap();
        let dx = sample_field(|x| Spinor::real(x[0].cos() * (2.0 * x[1]).cos(), 0.0), &g).unwrap();
        assert!(max_diff(&spectral_derivative(&f, 1), &dx) < 1e-12);
        assert!(max_diff(&spectral_derivative(&f, 2), &dy) < 1e-12);
    }
}
