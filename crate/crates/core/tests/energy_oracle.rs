//! The discrete energy against a dense Hermitian quadratic form.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dirac4cfd::observables::discrete_energy;
use dirac4cfd::pauli::sigma;
use dirac4cfd::{Complex64, Preset, Spinor, SpinorField};

fn dense_hamiltonian(preset: Preset, n: usize, eps: f64) -> DMatrix<Complex64> {
    let g = preset.grid(n).unwrap();
    let pots = preset.potentials().sample(&g, 0.0).unwrap();
    let h = g.h();
    let mut a = DMatrix::<f64>::zeros(n, n);
    let mut d = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let (l, r) = ((j + n - 1) % n, (j + 1) % n);
        a[(j, l)] = 1.0 / 6.0;
        a[(j, j)] = 4.0 / 6.0;
        a[(j, r)] = 1.0 / 6.0;
        d[(j, r)] = 0.5 / h;
        d[(j, l)] = -0.5 / h;
    }
    let k = a.try_inverse().unwrap() * d;
    let m = g.len();
    let mut hm = DMatrix::<Complex64>::zeros(2 * m, 2 * m);
    for j in 0..m {
        for l in 0..m {
            let s = sigma(1);
            for p in 0..2 {
                for q in 0..2 {
                    hm[(2 * j + p, 2 * l + q)] += Complex64::new(0.0, -k[(j, l)] / eps) * s.m[p][q];
                }
            }
        }
        let s3 = sigma(3);
        let s1 = sigma(1);
        for p in 0..2 {
            for q in 0..2 {
                hm[(2 * j + p, 2 * j + q)] += s3.m[p][q] / eps - s1.m[p][q] * pots.a[0][j];
            }
            hm[(2 * j + p, 2 * j + p)] += Complex64::new(pots.v[j], 0.0);
        }
    }
    hm * Complex64::new(h, 0.0)
}

#[test]
fn energy_matches_dense_quadratic_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in [8, 16] {
        let g = Preset::Standard1d.grid(n).unwrap();
        let pots = Preset::Standard1d.potentials().sample(&g, 0.0).unwrap();
        for eps in [1.0, 0.25] {
            let hm = dense_hamiltonian(Preset::Standard1d, n, eps);
            assert!((&hm - hm.adjoint()).iter().all(|z| z.norm() < 1e-12));
            for _ in 0..10 {
                let values: Vec<Spinor> = (0..n)
                    .map(|_| {
                        Spinor::new(
                            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                        )
                    })
                    .collect();
                let f = SpinorField::from_values(g, values).unwrap();
                let v = DVector::from_iterator(2 * n, f.values().iter().flat_map(|s| [s.c1, s.c2]));
                let dense = (v.adjoint() * &hm * &v)[(0, 0)];
                let fast = discrete_energy(&f, &pots, eps).unwrap();
                assert!(dense.im.abs() < 1e-12);
                assert!((fast - dense.re).abs() <= 1e-13 * dense.re.abs().max(1.0), "{fast} vs {}", dense.re);
            }
        }
    }
}
