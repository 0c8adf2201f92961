//! Solvers for the two-component Dirac equation
//!
//! `i∂_tΦ = (1/ε)(−i Σ_k σ_k ∂_k + σ₃)Φ + (V I − Σ_k A_k σ_k)Φ`
//!
//! on periodic boxes in one and two dimensions, for `0 < ε ≤ 1`.
//!
//! Space is discretized with the fourth-order compact operator `𝒜_h⁻¹δ_x`; time with either a
//! Crank–Nicolson (implicit, mass and energy conserving) or a three-level semi-implicit step
//! that decouples per Fourier mode. A Strang-split Fourier pseudospectral solver
//! ([`tssp`]) provides reference solutions.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod field;
pub mod grid;
pub mod observables;
pub mod pauli;
pub mod potential;
pub mod presets;
pub mod spectral;
pub mod stepper;
pub mod tssp;

pub use config::{Scheme, SchemeConfig};
pub use error::{Result, SolverError};
pub use field::{sample_field, SpinorField};
pub use grid::Grid;
pub use observables::{ConvergenceTable, ErrorTriple, Quantity};
pub use pauli::{Mat2, Spinor};
pub use potential::{sample_potentials, PotentialBounds, PotentialSet, SampledPotentials};
pub use presets::Preset;
pub use stepper::{run, Trajectory};

pub use num_complex::Complex64;
