//! Uniform periodic grids on a box `(a, b)^d`, `d ∈ {1, 2}`.

use std::f64::consts::PI;

use crate::error::{Result, SolverError};

/// A uniform periodic grid. 2D grids are square: same bounds and `n` per axis.
///
/// Node `n` is identified with node 0 and is never stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: usize,
    a: f64,
    b: f64,
    n: usize,
    h: f64,
}

impl Grid {
    pub fn new(a: f64, b: f64, n: usize, dim: usize) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(SolverError::InvalidGrid(format!("dimension must be 1 or 2, got {dim}")));
        }
        if !(a.is_finite() && b.is_finite()) || b <= a {
            return Err(SolverError::InvalidGrid(format!("need a < b, got ({a}, {b})")));
        }
        if n < 4 || !n.is_multiple_of(2) {
            return Err(SolverError::InvalidGrid(format!(
                "points per dimension must be even and >= 4, got {n}"
            )));
        }
        Ok(Self {
            dim,
            a,
            b,
            n,
            h: (b - a) / n as f64,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Points per dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    /// Total number of stored nodes, `n^dim`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `h^dim`, the quadrature weight of one node.
    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.dim as i32)
    }

    /// Coordinate `x_j = a + j h` along any axis.
    pub fn x(&self, j: usize) -> f64 {
        self.a + j as f64 * self.h
    }

    /// Coordinates of the node stored at flat index `idx` (row-major, axis 1 slowest).
    pub fn coords(&self, idx: usize) -> Vec<f64> {
        match self.dim {
            1 => vec![self.x(idx)],
            _ => vec![self.x(idx / self.n), self.x(idx % self.n)],
        }
    }

    /// Mode indices `l = -n/2, …, n/2 - 1`.
    pub fn modes(&self) -> impl Iterator<Item = i64> {
        let half = (self.n / 2) as i64;
        -half..half
    }

    /// Frequency `μ_l = 2πl/(b - a)`.
    pub fn mu(&self, l: i64) -> f64 {
        2.0 * PI * l as f64 / self.length()
    }

    /// Mode index of FFT output slot `k ∈ 0..n`.
    pub fn mode_of_slot(&self, k: usize) -> i64 {
        let n = self.n as i64;
        let k = k as i64;
        if k < n / 2 {
            k
        } else {
            k - n
        }
    }

    /// FFT output slot of mode `l`.
    pub fn slot_of_mode(&self, l: i64) -> usize {
        l.rem_euclid(self.n as i64) as usize
    }

    /// True if `coarse` has the same box and its nodes are a subset of ours.
    pub fn refines(&self, coarse: &Grid) -> bool {
        self.dim == coarse.dim
            && self.a == coarse.a
            && self.b == coarse.b
            && self.n >= coarse.n
            && self.n.is_multiple_of(coarse.n)
    }
}
