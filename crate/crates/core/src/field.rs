use num_complex::Complex64;

use crate::error::{Result, SolverError};
use crate::grid::Grid;
use crate::pauli::Spinor;

/// Spinor values on the stored nodes of a [`Grid`].
///
/// In 2D, `values[j * n + k]` holds the node `(x_j, y_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField {
    grid: Grid,
    values: Vec<Spinor>,
}

impl SpinorField {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            values: vec![Spinor::ZERO; grid.len()],
            grid,
        }
    }

    pub fn from_values(grid: Grid, values: Vec<Spinor>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(SolverError::GridMismatch(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Spinor] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Spinor] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Spinor> {
        self.values
    }

    /// Squared discrete l² norm, `h^d Σ |U_j|²`.
    pub fn norm_sqr_l2(&self) -> f64 {
        self.grid.cell_volume() * self.values.iter().map(Spinor::norm_sqr).sum::<f64>()
    }

    pub fn norm_l2(&self) -> f64 {
        self.norm_sqr_l2().sqrt()
    }

    pub fn norm_max(&self) -> f64 {
        self.values
            .iter()
            .map(|s| s.norm_sqr().sqrt())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(Spinor::is_finite)
    }

    pub fn same_grid(&self, other: &SpinorField) -> Result<()> {
        if self.grid != other.grid {
            return Err(SolverError::GridMismatch(format!(
                "{:?} vs {:?}",
                self.grid, other.grid
            )));
        }
        Ok(())
    }

    /// `self - other`, on a shared grid.
    pub fn diff(&self, other: &SpinorField) -> Result<SpinorField> {
        self.same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| *a - *b)
            .collect();
        Ok(SpinorField {
            grid: self.grid,
            values,
        })
    }

    pub fn scaled(&self, s: Complex64) -> SpinorField {
        SpinorField {
            grid: self.grid,
            values: self.values.iter().map(|v| v.scale(s)).collect(),
        }
    }

    /// Reads this field at the nodes of a coarser nested grid.
    pub fn restrict_to(&self, coarse: &Grid) -> Result<SpinorField> {
        if !self.grid.refines(coarse) {
            return Err(SolverError::GridMismatch(format!(
                "fine grid with n = {} does not nest coarse grid with n = {}",
                self.grid.n(),
                coarse.n()
            )));
        }
        let ratio = self.grid.n() / coarse.n();
        let nf = self.grid.n();
        let values = match coarse.dim() {
            1 => (0..coarse.n()).map(|j| self.values[j * ratio]).collect(),
            _ => (0..coarse.len())
                .map(|idx| {
                    let (j, k) = (idx / coarse.n(), idx % coarse.n());
                    self.values[j * ratio * nf + k * ratio]
                })
                .collect(),
        };
        Ok(SpinorField {
            grid: *coarse,
            values,
        })
    }
}

/// Samples `f` at every stored node.
pub fn sample_field<F>(f: F, grid: &Grid) -> Result<SpinorField>
where
    F: Fn(&[f64]) -> Spinor,
{
    let mut values = Vec::with_capacity(grid.len());
    for idx in 0..grid.len() {
        let x = grid.coords(idx);
        let v = f(&x);
        if !v.is_finite() {
            return Err(SolverError::NonFinite {
                what: "initial data".into(),
                node: x,
            });
        }
        values.push(v);
    }
    Ok(SpinorField {
        grid: *grid,
        values,
    })
}
