//! Electric and magnetic potentials `V(t, x)`, `A_j(t, x)`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Result, SolverError};
use crate::grid::Grid;

/// A real scalar field of time and space.
pub type ScalarFn = Arc<dyn Fn(f64, &[f64]) -> f64 + Send + Sync>;

/// Suprema of `|V|` and `|A_j|` over the space-time box of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialBounds {
    pub v_max: f64,
    pub a_max: Vec<f64>,
}

impl PotentialBounds {
    /// `V_max + Σ_j A_max[j]`.
    pub fn total(&self) -> f64 {
        self.v_max + self.a_max.iter().sum::<f64>()
    }
}

/// Node samples of the potentials at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPotentials {
    pub v: Vec<f64>,
    /// One array per spatial axis.
    pub a: Vec<Vec<f64>>,
}

impl SampledPotentials {
    pub fn zeros(grid: &Grid) -> Self {
        Self {
            v: vec![0.0; grid.len()],
            a: vec![vec![0.0; grid.len()]; grid.dim()],
        }
    }
}

#[derive(Clone)]
pub struct PotentialSet {
    v: ScalarFn,
    a: Vec<ScalarFn>,
    time_independent: bool,
    bounds: Option<PotentialBounds>,
}

impl fmt::Debug for PotentialSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PotentialSet")
            .field("dim", &self.a.len())
            .field("time_independent", &self.time_independent)
            .field("bounds", &self.bounds)
            .finish()
    }
}

impl PotentialSet {
    /// `a` holds one evaluator per spatial axis.
    pub fn new(v: ScalarFn, a: Vec<ScalarFn>, time_independent: bool) -> Self {
        Self {
            v,
            a,
            time_independent,
            bounds: None,
        }
    }

    /// `V ≡ 0`, `A ≡ 0` in `dim` dimensions.
    pub fn free(dim: usize) -> Self {
        let zero: ScalarFn = Arc::new(|_, _| 0.0);
        let mut set = Self::new(zero.clone(), vec![zero; dim], true);
        set.bounds = Some(PotentialBounds {
            v_max: 0.0,
            a_max: vec![0.0; dim],
        });
        set
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn is_time_independent(&self) -> bool {
        self.time_independent
    }

    pub fn v(&self, t: f64, x: &[f64]) -> f64 {
        (self.v)(t, x)
    }

    pub fn a(&self, axis: usize, t: f64, x: &[f64]) -> f64 {
        (self.a[axis])(t, x)
    }

    pub fn bounds(&self) -> Option<&PotentialBounds> {
        self.bounds.as_ref()
    }

    /// Overrides the bounds with user-supplied values.
    pub fn with_bounds(mut self, bounds: PotentialBounds) -> Self {
        self.bounds = Some(bounds);
        self
    }

    /// Estimates and stores the bounds for a run on `grid` over `[0, t_final]` with step `tau`.
    pub fn with_estimated_bounds(mut self, grid: &Grid, t_final: f64, tau: f64) -> Result<Self> {
        let times = self.time_levels(t_final, tau);
        self.bounds = Some(self.estimate_bounds(grid, &times)?);
        Ok(self)
    }

    /// Time levels a run can touch: every `t_n` and `t_n + τ/2`.
    pub fn time_levels(&self, t_final: f64, tau: f64) -> Vec<f64> {
        if self.time_independent {
            return vec![0.0];
        }
        let steps = (t_final / tau).round().max(1.0) as usize;
        (0..=2 * steps).map(|k| k as f64 * tau / 2.0).collect()
    }

    /// Dense sampling of `|V|` and `|A_j|` on a 4× refinement of `grid` at the given times.
    pub fn estimate_bounds(&self, grid: &Grid, times: &[f64]) -> Result<PotentialBounds> {
        self.check_dim(grid)?;
        let fine = Grid::new(grid.a(), grid.b(), grid.n() * 4, grid.dim())?;
        let mut bounds = PotentialBounds {
            v_max: 0.0,
            a_max: vec![0.0; grid.dim()],
        };
        for &t in times {
            let s = self.sample(&fine, t)?;
            bounds.v_max = s.v.iter().fold(bounds.v_max, |m, v| m.max(v.abs()));
            for (max, arr) in bounds.a_max.iter_mut().zip(&s.a) {
                *max = arr.iter().fold(*max, |m, v| m.max(v.abs()));
            }
        }
        Ok(bounds)
    }

    fn check_dim(&self, grid: &Grid) -> Result<()> {
        if grid.dim() != self.dim() {
            return Err(SolverError::GridMismatch(format!(
                "potentials are {}D but grid is {}D",
                self.dim(),
                grid.dim()
            )));
        }
        Ok(())
    }

    /// `V(t, x_j)` and `A_k(t, x_j)` at every stored node.
    pub fn sample(&self, grid: &Grid, t: f64) -> Result<SampledPotentials> {
        self.check_dim(grid)?;
        let mut out = SampledPotentials {
            v: Vec::with_capacity(grid.len()),
            a: vec![Vec::with_capacity(grid.len()); grid.dim()],
        };
        for idx in 0..grid.len() {
            let x = grid.coords(idx);
            let v = (self.v)(t, &x);
            if !v.is_finite() {
                return Err(SolverError::NonFinite {
                    what: format!("V at t = {t}"),
                    node: x,
                });
            }
            out.v.push(v);
            for (axis, arr) in out.a.iter_mut().enumerate() {
                let a = (self.a[axis])(t, &x);
                if !a.is_finite() {
                    return Err(SolverError::NonFinite {
                        what: format!("A_{} at t = {t}", axis + 1),
                        node: x,
                    });
                }
                arr.push(a);
            }
        }
        Ok(out)
    }
}

/// Samples `p` on `grid` at time `t`.
pub fn sample_potentials(p: &PotentialSet, grid: &Grid, t: f64) -> Result<SampledPotentials> {
    p.sample(grid, t)
}
