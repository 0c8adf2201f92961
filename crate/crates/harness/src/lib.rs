//! Experiment orchestration for the `dirac4cfd` solvers: configuration, convergence sweeps,
//! conservation and 2D dynamics runs, dense oracle checks, and the files they produce.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod conserve;
pub mod dynamics;
pub mod error;
pub mod expr;
pub mod oracle;
pub mod output;
pub mod parallel;
pub mod reference;
pub mod sweep;

pub use config::{Command, ConfigFile, ExperimentSpec, Overrides, ReferenceSettings};
pub use error::{HarnessError, Result};
