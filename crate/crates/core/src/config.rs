use std::fmt;
use std::str::FromStr;

use crate::error::{Result, SolverError};

/// Relative tolerance on `t_final / tau` being an integer.
pub const STEP_COUNT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Crank–Nicolson in time, compact fourth order in space; 1D only.
    Implicit4cfd,
    /// Three-level scheme solved mode by mode in Fourier space.
    SemiImplicit4cfd,
    /// Strang time splitting with Fourier pseudospectral free flow.
    TsspReference,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Implicit4cfd => "implicit",
            Scheme::SemiImplicit4cfd => "semi",
            Scheme::TsspReference => "tssp",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = SolverError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "implicit" | "implicit-4cfd" => Ok(Scheme::Implicit4cfd),
            "semi" | "semi-implicit" | "semi-implicit-4cfd" => Ok(Scheme::SemiImplicit4cfd),
            "tssp" | "tssp-reference" | "tsfp" => Ok(Scheme::TsspReference),
            other => Err(SolverError::InvalidConfig(format!("unknown scheme '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeConfig {
    pub epsilon: f64,
    pub tau: f64,
    pub t_final: f64,
    pub scheme: Scheme,
    /// Relative residual target of the implicit scheme's fixed-point solve.
    pub linear_solver_tol: f64,
    pub max_iterations: usize,
    pub snapshot_times: Vec<f64>,
    /// Run the semi-implicit scheme even when the stability condition fails.
    pub allow_unstable: bool,
    /// Record mass (and energy for static potentials) after every step.
    pub diagnostics: bool,
}

impl SchemeConfig {
    pub fn new(scheme: Scheme, epsilon: f64, tau: f64, t_final: f64) -> Self {
        Self {
            epsilon,
            tau,
            t_final,
            scheme,
            linear_solver_tol: 1e-12,
            max_iterations: 200,
            snapshot_times: Vec::new(),
            allow_unstable: false,
            diagnostics: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(SolverError::InvalidConfig(format!(
                "epsilon must lie in (0, 1], got {}",
                self.epsilon
            )));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(SolverError::InvalidConfig(format!("tau must be positive, got {}", self.tau)));
        }
        if !(self.t_final >= self.tau * (1.0 - STEP_COUNT_TOL)) {
            return Err(SolverError::InvalidConfig(format!(
                "t_final = {} is shorter than one step tau = {}",
                self.t_final, self.tau
            )));
        }
        if !(self.linear_solver_tol > 0.0) || self.max_iterations == 0 {
            return Err(SolverError::InvalidConfig("solver tolerance and iteration cap must be positive".into()));
        }
        self.n_steps()?;
        for &t in &self.snapshot_times {
            self.step_of_time(t)?;
        }
        Ok(())
    }

    /// `round(t_final / tau)`, rejected unless the ratio is integral to [`STEP_COUNT_TOL`].
    pub fn n_steps(&self) -> Result<usize> {
        let ratio = self.t_final / self.tau;
        let n = ratio.round();
        if n < 1.0 || (ratio - n).abs() > STEP_COUNT_TOL * ratio.max(1.0) {
            return Err(SolverError::InvalidConfig(format!(
                "t_final / tau = {ratio} is not an integer"
            )));
        }
        Ok(n as usize)
    }

    /// Step index of snapshot time `t`; `t` must fall on a time level within the run.
    pub fn step_of_time(&self, t: f64) -> Result<usize> {
        let ratio = t / self.tau;
        let n = ratio.round();
        if n < 0.0 || (ratio - n).abs() > STEP_COUNT_TOL * ratio.abs().max(1.0) {
            return Err(SolverError::InvalidConfig(format!(
                "snapshot time {t} is not a multiple of tau = {}",
                self.tau
            )));
        }
        let n = n as usize;
        if n > self.n_steps()? {
            return Err(SolverError::InvalidConfig(format!(
                "snapshot time {t} lies beyond t_final = {}",
                self.t_final
            )));
        }
        Ok(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_count() {
        let cfg = SchemeConfig::new(Scheme::SemiImplicit4cfd, 1.0, 1e-4, 2.0);
        assert_eq!(cfg.n_steps().unwrap(), 20_000);
        let cfg = SchemeConfig::new(Scheme::SemiImplicit4cfd, 1.0, 0.05 / 8.0, 2.0);
        assert_eq!(cfg.n_steps().unwrap(), 320);
        let cfg = SchemeConfig::new(Scheme::SemiImplicit4cfd, 1.0, 0.45, 2.0);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn rejects_bad_parameters() {
        for (eps, tau, t) in [(0.0, 0.1, 1.0), (1.5, 0.1, 1.0), (1.0, -0.1, 1.0), (1.0, 0.1, 0.05)] {
            assert!(SchemeConfig::new(Scheme::Implicit4cfd, eps, tau, t).validate().is_err());
        }
        let mut cfg = SchemeConfig::new(Scheme::Implicit4cfd, 0.5, 0.1, 1.0);
        cfg.snapshot_times = vec![0.0, 0.5, 1.0];
        assert!(cfg.validate().is_ok());
        cfg.snapshot_times = vec![0.55];
        assert!(cfg.validate().is_err());
        cfg.snapshot_times = vec![1.1];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in [Scheme::Implicit4cfd, Scheme::SemiImplicit4cfd, Scheme::TsspReference] {
            assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
        }
        assert!("leapfrog".parse::<Scheme>().is_err());
    }
}
