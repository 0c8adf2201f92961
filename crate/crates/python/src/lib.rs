//! Python bindings: grids, presets, time stepping, reference solutions and error measures.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use dirac4cfd::observables::{current_density, discrete_energy, mass_l2, total_density};
use dirac4cfd::tssp::compute_reference;
use dirac4cfd::{Complex64, ErrorTriple, Scheme, SchemeConfig, SolverError, Spinor};

fn py_err(e: SolverError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_preset(name: &str) -> PyResult<dirac4cfd::Preset> {
    name.parse().map_err(py_err)
}

/// Uniform periodic grid with `n` points per axis on `(a, b)^dim`.
#[pyclass(frozen, from_py_object)]
#[derive(Clone, Copy)]
struct Grid(dirac4cfd::Grid);

#[pymethods]
impl Grid {
    #[new]
    #[pyo3(signature = (a, b, n, dim = 1))]
    fn new(a: f64, b: f64, n: usize, dim: usize) -> PyResult<Self> {
        dirac4cfd::Grid::new(a, b, n, dim).map(Grid).map_err(py_err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn h(&self) -> f64 {
        self.0.h()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    /// Node coordinates in row-major order.
    fn coords(&self) -> Vec<Vec<f64>> {
        (0..self.0.len()).map(|i| self.0.coords(i)).collect()
    }

    fn __repr__(&self) -> String {
        format!("Grid(a={}, b={}, n={}, dim={})", self.0.a(), self.0.b(), self.0.n(), self.0.dim())
    }
}

/// A two-component spinor sampled on a grid.
#[pyclass(frozen, from_py_object)]
#[derive(Clone)]
struct SpinorField(dirac4cfd::SpinorField);

#[pymethods]
impl SpinorField {
    #[new]
    fn new(grid: Grid, phi1: Vec<Complex64>, phi2: Vec<Complex64>) -> PyResult<Self> {
        if phi1.len() != phi2.len() {
            return Err(PyValueError::new_err("components differ in length"));
        }
        let values = phi1.into_iter().zip(phi2).map(|(a, b)| Spinor::new(a, b)).collect();
        dirac4cfd::SpinorField::from_values(grid.0, values)
            .map(SpinorField)
            .map_err(py_err)
    }

    #[getter]
    fn grid(&self) -> Grid {
        Grid(*self.0.grid())
    }

    /// `(phi1, phi2)` as lists of complex numbers.
    fn components(&self) -> (Vec<Complex64>, Vec<Complex64>) {
        self.0.values().iter().map(|s| (s.c1, s.c2)).unzip()
    }

    fn density(&self) -> Vec<f64> {
        total_density(&self.0)
    }

    fn current(&self, epsilon: f64) -> Vec<Vec<f64>> {
        current_density(&self.0, epsilon)
    }

    fn mass(&self) -> f64 {
        mass_l2(&self.0)
    }

    fn __len__(&self) -> usize {
        self.0.values().len()
    }
}

/// Names of the built-in benchmark problems.
#[pyfunction]
fn presets() -> Vec<&'static str> {
    dirac4cfd::Preset::ALL.iter().map(|p| p.name()).collect()
}

#[pyfunction]
fn preset_grid(preset: &str, n: usize) -> PyResult<Grid> {
    parse_preset(preset)?.grid(n).map(Grid).map_err(py_err)
}

#[pyfunction]
fn initial_data(preset: &str, grid: Grid) -> PyResult<SpinorField> {
    parse_preset(preset)?
        .sample_initial(&grid.0)
        .map(SpinorField)
        .map_err(py_err)
}

/// Energy of `field` with the preset's potentials at time `t`.
#[pyfunction]
#[pyo3(signature = (preset, field, epsilon, t = 0.0))]
fn energy(preset: &str, field: &SpinorField, epsilon: f64, t: f64) -> PyResult<f64> {
    let pots = parse_preset(preset)?.potentials().sample(field.0.grid(), t).map_err(py_err)?;
    discrete_energy(&field.0, &pots, epsilon).map_err(py_err)
}

/// Integrates a preset to `t_final` and returns `(final_field, max_mass_drift)`.
#[pyfunction]
#[pyo3(signature = (preset, scheme, epsilon, n, tau, t_final, allow_unstable = false))]
fn solve(
    preset: &str,
    scheme: &str,
    epsilon: f64,
    n: usize,
    tau: f64,
    t_final: f64,
    allow_unstable: bool,
) -> PyResult<(SpinorField, Option<f64>)> {
    let preset = parse_preset(preset)?;
    let scheme: Scheme = scheme.parse().map_err(py_err)?;
    let grid = preset.grid(n).map_err(py_err)?;
    let phi0 = preset.sample_initial(&grid).map_err(py_err)?;
    let dphi0 = preset.sample_initial_derivative(&grid).map_err(py_err)?;
    let mut cfg = SchemeConfig::new(scheme, epsilon, tau, t_final);
    cfg.diagnostics = true;
    cfg.allow_unstable = allow_unstable;
    let traj = dirac4cfd::run(&cfg, &grid, &phi0, Some(&dphi0), &preset.potentials()).map_err(py_err)?;
    let drift = traj.max_mass_drift();
    Ok((SpinorField(traj.final_field), drift))
}

/// Time-splitting pseudospectral solution at `t`, restricted to `coarse` when given.
#[pyfunction]
#[pyo3(signature = (preset, epsilon, n, tau, t, coarse = None))]
fn reference(
    preset: &str,
    epsilon: f64,
    n: usize,
    tau: f64,
    t: f64,
    coarse: Option<Grid>,
) -> PyResult<SpinorField> {
    let preset = parse_preset(preset)?;
    let grid = preset.grid(n).map_err(py_err)?;
    let phi0 = preset.sample_initial(&grid).map_err(py_err)?;
    let sol = compute_reference(&grid, epsilon, tau, &phi0, &preset.potentials(), &[t]).map_err(py_err)?;
    let target = coarse.map_or(grid, |g| g.0);
    sol.at(t, &target).map(SpinorField).map_err(py_err)
}

/// Relative errors `(e_phi, e_rho, e_J)` of `numerical` against `exact`.
#[pyfunction]
fn errors(numerical: &SpinorField, exact: &SpinorField, epsilon: f64) -> PyResult<(f64, f64, f64)> {
    let e = ErrorTriple::measure(&numerical.0, &exact.0, epsilon).map_err(py_err)?;
    Ok((e.e_phi, e.e_rho, e.e_j))
}

#[pymodule]
fn dirac4cfd_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Grid>()?;
    m.add_class::<SpinorField>()?;
    m.add_function(wrap_pyfunction!(presets, m)?)?;
    m.add_function(wrap_pyfunction!(preset_grid, m)?)?;
    m.add_function(wrap_pyfunction!(initial_data, m)?)?;
    m.add_function(wrap_pyfunction!(energy, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(reference, m)?)?;
    m.add_function(wrap_pyfunction!(errors, m)?)?;
    Ok(())
}
