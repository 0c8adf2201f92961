//! The benchmark problems: potentials, initial data and domains.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Result, SolverError};
use crate::field::{sample_field, SpinorField};
use crate::grid::Grid;
use crate::pauli::Spinor;
use crate::potential::{PotentialSet, ScalarFn};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    /// `Ω = (0, 2π)`, `V = 1/(1 + sin²x)`, `A₁ = sin 2x`.
    Standard1d,
    /// Honeycomb lattice potential on `(−32, 32)²`, Gaussian initial data.
    Honeycomb2d,
    /// Periodic electromagnetic potentials on `(0, 2π)²`.
    PeriodicEm2d,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Standard1d, Preset::Honeycomb2d, Preset::PeriodicEm2d];

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Standard1d => "dirac1d-standard",
            Preset::Honeycomb2d => "honeycomb-2d",
            Preset::PeriodicEm2d => "periodic-em-2d",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Preset::Standard1d => 1,
            _ => 2,
        }
    }

    /// Bounds `(a, b)` of the domain along every axis.
    pub fn domain(&self) -> (f64, f64) {
        match self {
            Preset::Honeycomb2d => (-32.0, 32.0),
            _ => (0.0, 2.0 * PI),
        }
    }

    pub fn grid(&self, n: usize) -> Result<Grid> {
        let (a, b) = self.domain();
        Grid::new(a, b, n, self.dim())
    }

    pub fn potentials(&self) -> PotentialSet {
        match self {
            Preset::Standard1d => PotentialSet::new(
                Arc::new(|_, x| 1.0 / (1.0 + x[0].sin().powi(2))),
                vec![Arc::new(|_, x| (2.0 * x[0]).sin())],
                true,
            ),
            Preset::Honeycomb2d => {
                let k = 4.0 * PI / 3f64.sqrt();
                let s3 = 3f64.sqrt() / 2.0;
                let e = [(-1.0, 0.0), (0.5, s3), (0.5, -s3)];
                let v: ScalarFn = Arc::new(move |_, x| {
                    e.iter().map(|(ex, ey)| (k * (ex * x[0] + ey * x[1])).cos()).sum()
                });
                let zero: ScalarFn = Arc::new(|_, _| 0.0);
                PotentialSet::new(v, vec![zero.clone(), zero], true)
            }
            Preset::PeriodicEm2d => PotentialSet::new(
                Arc::new(|_, x| 1.0 / (1.0 + x[0].sin().powi(2) + x[1].cos().powi(2))),
                vec![
                    Arc::new(|_, x| (2.0 * x[0]).sin() * (2.0 * x[1]).sin()),
                    Arc::new(|_, x| 2.0 * x[0].sin() * x[1].cos()),
                ],
                true,
            ),
        }
    }

    pub fn initial(&self, x: &[f64]) -> Spinor {
        match self {
            Preset::Standard1d => {
                Spinor::real(1.0 / (1.0 + x[0].sin().powi(2)), 1.0 / (3.0 + x[0].cos()))
            }
            Preset::Honeycomb2d => {
                let (px, py) = (x[0], x[1]);
                Spinor::real(
                    (-(px * px + py * py) / 2.0).exp(),
                    (-((px - 1.0).powi(2) + py * py) / 2.0).exp(),
                )
            }
            Preset::PeriodicEm2d => {
                let (px, py) = (x[0], x[1]);
                Spinor::real(
                    1.0 / (1.0 + px.sin().powi(2) + py.sin().powi(2)),
                    1.0 / (3.0 + px.cos() * py.sin()),
                )
            }
        }
    }

    /// Analytic `∂_axis Φ₀` (axis 1 or 2).
    pub fn initial_derivative(&self, x: &[f64], axis: usize) -> Spinor {
        match (self, axis) {
            (Preset::Standard1d, 1) => {
                let s = x[0].sin();
                let d1 = 1.0 + s * s;
                let d2 = 3.0 + x[0].cos();
                Spinor::real(-(2.0 * x[0]).sin() / (d1 * d1), s / (d2 * d2))
            }
            (Preset::Honeycomb2d, _) => {
                let p = self.initial(x);
                let (px, py) = (x[0], x[1]);
                if axis == 1 {
                    Spinor::real(-px * p.c1.re, -(px - 1.0) * p.c2.re)
                } else {
                    Spinor::real(-py * p.c1.re, -py * p.c2.re)
                }
            }
            (Preset::PeriodicEm2d, _) => {
                let (px, py) = (x[0], x[1]);
                let d1 = 1.0 + px.sin().powi(2) + py.sin().powi(2);
                let d2 = 3.0 + px.cos() * py.sin();
                if axis == 1 {
                    Spinor::real(-(2.0 * px).sin() / (d1 * d1), px.sin() * py.sin() / (d2 * d2))
                } else {
                    Spinor::real(-(2.0 * py).sin() / (d1 * d1), -px.cos() * py.cos() / (d2 * d2))
                }
            }
            _ => panic!("axis {axis} out of range for {}", self.name()),
        }
    }

    pub fn sample_initial(&self, grid: &Grid) -> Result<SpinorField> {
        sample_field(|x| self.initial(x), grid)
    }

    /// Analytic derivative fields, one per axis.
    pub fn sample_initial_derivative(&self, grid: &Grid) -> Result<Vec<SpinorField>> {
        (1..=grid.dim())
            .map(|axis| sample_field(|x| self.initial_derivative(x, axis), grid))
            .collect()
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = SolverError;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| SolverError::InvalidConfig(format!("unknown preset '{s}'")))
    }
}
