//! Experiment specifications: TOML files, command-line overrides and per-command defaults.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use dirac4cfd::{Grid, Preset, Scheme};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{io_err, HarnessError, Result};
use crate::expr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    ConvergeSpace,
    ConvergeTime,
    Conserve,
    Dynamics2d,
    OracleCheck,
    Solve,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::ConvergeSpace => "converge-space",
            Command::ConvergeTime => "converge-time",
            Command::Conserve => "conserve",
            Command::Dynamics2d => "dynamics2d",
            Command::OracleCheck => "oracle-check",
            Command::Solve => "solve",
        }
    }
}

/// A number written either as a literal or as an expression string such as `"pi/16"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum NumberSpec {
    Int(i64),
    Float(f64),
    Expr(String),
}

impl NumberSpec {
    pub fn value(&self) -> Result<f64> {
        match self {
            NumberSpec::Int(i) => Ok(*i as f64),
            NumberSpec::Float(f) => Ok(*f),
            NumberSpec::Expr(s) => expr::eval(s),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum NumberList {
    One(NumberSpec),
    Many(Vec<NumberSpec>),
}

impl NumberList {
    fn values(&self) -> Result<Vec<f64>> {
        match self {
            NumberList::One(n) => Ok(vec![n.value()?]),
            NumberList::Many(v) => v.iter().map(NumberSpec::value).collect(),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceFile {
    pub n: Option<usize>,
    pub tau: Option<NumberSpec>,
    pub gate: Option<bool>,
    pub gate_tol: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverFile {
    pub linear_solver_tol: Option<f64>,
    pub max_iterations: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputFile {
    pub dir: Option<PathBuf>,
}

/// Contents of a `--config` file. Every key is optional.
///
/// ```toml
/// preset = "dirac1d-standard"
/// scheme = "semi"
/// epsilon = [1.0, "2^-4"]
/// h = ["pi/16", "pi/32", "pi/64", "pi/128"]
/// t_final = 2.0
///
/// [reference]
/// n = 512
/// tau = 1e-5
///
/// [output]
/// dir = "tables"
/// ```
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub preset: Option<String>,
    pub scheme: Option<String>,
    pub epsilon: Option<NumberList>,
    pub h: Option<NumberList>,
    pub n: Option<usize>,
    pub tau: Option<NumberList>,
    pub t_final: Option<NumberSpec>,
    pub snapshot_times: Option<NumberList>,
    pub seed: Option<u64>,
    pub allow_unstable: Option<bool>,
    #[serde(default)]
    pub reference: ReferenceFile,
    #[serde(default)]
    pub solver: SolverFile,
    #[serde(default)]
    pub output: OutputFile,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        Self::parse(&text)
    }
}

/// Command-line values; each one overrides the matching config-file key.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub preset: Option<String>,
    pub scheme: Option<String>,
    pub epsilon: Vec<String>,
    pub h: Vec<String>,
    pub n: Option<usize>,
    pub tau: Vec<String>,
    pub t_final: Option<String>,
    pub snapshot_times: Vec<String>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub allow_unstable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReferenceSettings {
    /// Points per axis of the reference grid.
    pub n: usize,
    pub tau: f64,
    /// Compare against a second reference with `2n` points and step `tau/2` before use.
    pub gate: bool,
    pub gate_tol: f64,
}

impl Default for ReferenceSettings {
    fn default() -> Self {
        Self {
            n: 512,
            tau: 1e-5,
            gate: true,
            gate_tol: 1e-7,
        }
    }
}

/// The time step paired with a spatial sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CompanionTau {
    Fixed(f64),
    /// `base · min(ε, 1)^exponent`, shortened so that it divides `t_final`.
    Scaled { base: f64, exponent: f64 },
}

pub const DEFAULT_COMPANION_TAU: CompanionTau = CompanionTau::Scaled {
    base: 1e-4,
    exponent: 1.5,
};

impl CompanionTau {
    pub fn tau(&self, epsilon: f64, t_final: f64) -> f64 {
        match *self {
            CompanionTau::Fixed(t) => t,
            CompanionTau::Scaled { base, exponent } => {
                let raw = base * epsilon.min(1.0).powf(exponent);
                let steps = (t_final / raw * (1.0 - 1e-12)).ceil().max(1.0);
                t_final / steps
            }
        }
    }
}

fn ser_preset<S: Serializer>(p: &Preset, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(p.name())
}

fn ser_scheme<S: Serializer>(p: &Scheme, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(p.name())
}

/// A fully resolved experiment.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentSpec {
    pub command: Command,
    #[serde(serialize_with = "ser_preset")]
    pub preset: Preset,
    #[serde(serialize_with = "ser_scheme")]
    pub scheme: Scheme,
    pub epsilons: Vec<f64>,
    /// The swept axis: mesh sizes for `converge-space`, time steps for `converge-time`.
    /// Other commands carry the single mesh size here.
    pub resolutions: Vec<f64>,
    /// Grid points per axis matching each entry of `resolutions` (space) or the fixed grid.
    pub grid_points: Vec<usize>,
    pub companion_tau: CompanionTau,
    pub t_final: f64,
    pub snapshot_times: Vec<f64>,
    pub reference: ReferenceSettings,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub allow_unstable: bool,
    pub linear_solver_tol: f64,
    pub max_iterations: usize,
}

fn list(cli: &[String], file: &Option<NumberList>) -> Result<Option<Vec<f64>>> {
    if !cli.is_empty() {
        return cli.iter().map(|s| expr::eval(s)).collect::<Result<Vec<_>>>().map(Some);
    }
    file.as_ref().map(NumberList::values).transpose()
}

fn single(name: &str, values: Option<Vec<f64>>) -> Result<Option<f64>> {
    match values {
        None => Ok(None),
        Some(v) if v.len() == 1 => Ok(Some(v[0])),
        Some(_) => Err(HarnessError::Config(format!("{name} takes a single value for this command"))),
    }
}

/// Points per axis of `preset` for mesh size `h`; `h` must divide the domain length.
pub fn points_for_h(preset: Preset, h: f64) -> Result<usize> {
    let (a, b) = preset.domain();
    let ratio = (b - a) / h;
    let n = ratio.round();
    if !(h > 0.0) || n < 1.0 || (ratio - n).abs() > 1e-8 * ratio {
        return Err(HarnessError::Config(format!(
            "h = {h} does not divide the {} domain of length {}",
            preset.name(),
            b - a
        )));
    }
    Ok(n as usize)
}

fn check_halving(name: &str, values: &[f64]) -> Result<()> {
    for w in values.windows(2) {
        let r = w[0] / w[1];
        if (r - 2.0).abs() > 1e-9 {
            return Err(HarnessError::Config(format!(
                "{name} values must halve from one entry to the next ({} -> {})",
                w[0], w[1]
            )));
        }
    }
    Ok(())
}

impl ExperimentSpec {
    /// Merges defaults for `command`, then the config file, then the command-line overrides.
    pub fn resolve(command: Command, file: &ConfigFile, cli: &Overrides) -> Result<Self> {
        let preset_name = cli.preset.clone().or_else(|| file.preset.clone());
        let preset: Preset = match preset_name {
            Some(p) => p.parse()?,
            None if command == Command::Dynamics2d => Preset::Honeycomb2d,
            None => Preset::Standard1d,
        };
        let scheme: Scheme = match cli.scheme.clone().or_else(|| file.scheme.clone()) {
            Some(s) => s.parse()?,
            None if command == Command::Conserve => Scheme::Implicit4cfd,
            None => Scheme::SemiImplicit4cfd,
        };
        if command == Command::Dynamics2d && preset.dim() != 2 {
            return Err(HarnessError::Config("dynamics2d needs a two-dimensional preset".into()));
        }

        let epsilons = list(&cli.epsilon, &file.epsilon)?;
        let hs = list(&cli.h, &file.h)?;
        let taus = list(&cli.tau, &file.tau)?;
        let t_final = match &cli.t_final {
            Some(s) => Some(expr::eval(s)?),
            None => file.t_final.as_ref().map(NumberSpec::value).transpose()?,
        };
        let n_override = cli.n.or(file.n);
        let snapshots = list(&cli.snapshot_times, &file.snapshot_times)?;

        let mut reference = ReferenceSettings::default();
        if let Some(n) = file.reference.n {
            reference.n = n;
        }
        if let Some(t) = &file.reference.tau {
            reference.tau = t.value()?;
        }
        if let Some(g) = file.reference.gate {
            reference.gate = g;
        }
        if let Some(t) = file.reference.gate_tol {
            reference.gate_tol = t;
        }

        let default_eps: Vec<f64> = match command {
            Command::ConvergeSpace | Command::Conserve => vec![1.0, 0.0625],
            Command::ConvergeTime => (0..6).map(|k| 2f64.powf(-2.0 * k as f64 / 3.0)).collect(),
            Command::Dynamics2d => vec![1.0, 0.5],
            Command::OracleCheck | Command::Solve => vec![1.0],
        };
        let epsilons = epsilons.unwrap_or(default_eps);
        if epsilons.is_empty() || epsilons.iter().any(|&e| !(e > 0.0 && e <= 1.0)) {
            return Err(HarnessError::Config("epsilon values must lie in (0, 1]".into()));
        }
        let t_final = t_final.unwrap_or(match command {
            Command::Dynamics2d => 1.0,
            _ => 2.0,
        });

        let (a, b) = preset.domain();
        let length = b - a;
        let desk_n = match preset {
            Preset::Standard1d => 128,
            Preset::Honeycomb2d => 512,
            Preset::PeriodicEm2d => 256,
        };
        let (resolutions, grid_points, companion_tau) = match command {
            Command::ConvergeSpace => {
                let hs = hs.unwrap_or_else(|| (4..8).map(|k| PI / f64::from(1u32 << k)).collect());
                check_halving("h", &hs)?;
                let ns = hs.iter().map(|&h| points_for_h(preset, h)).collect::<Result<Vec<_>>>()?;
                let companion = match single("tau", taus)? {
                    Some(t) => CompanionTau::Fixed(t),
                    None => DEFAULT_COMPANION_TAU,
                };
                (hs, ns, companion)
            }
            Command::ConvergeTime => {
                let taus = taus.unwrap_or_else(|| (0..7).map(|k| 0.05 / f64::from(1u32 << k)).collect());
                check_halving("tau", &taus)?;
                let n = match (single("h", hs)?, n_override) {
                    (Some(h), _) => points_for_h(preset, h)?,
                    (None, Some(n)) => n,
                    (None, None) => points_for_h(preset, PI / 256.0)?,
                };
                (taus, vec![n], CompanionTau::Fixed(f64::NAN))
            }
            _ => {
                let n = match (single("h", hs)?, n_override) {
                    (Some(h), _) => points_for_h(preset, h)?,
                    (None, Some(n)) => n,
                    (None, None) if command == Command::Conserve => points_for_h(preset, PI / 64.0)?,
                    (None, None) => desk_n,
                };
                let tau = single("tau", taus)?.unwrap_or(match command {
                    Command::Solve => 1e-3,
                    _ => 0.01,
                });
                (vec![length / n as f64], vec![n], CompanionTau::Fixed(tau))
            }
        };
        for &n in &grid_points {
            Grid::new(a, b, n, preset.dim())?;
        }
        if matches!(command, Command::ConvergeSpace | Command::ConvergeTime)
            && grid_points.iter().any(|&n| reference.n % n != 0)
        {
            return Err(HarnessError::Config(format!(
                "reference grid of {} points is not a multiple of every swept grid",
                reference.n
            )));
        }

        let snapshot_times = snapshots.unwrap_or_else(|| match command {
            Command::Dynamics2d => vec![0.0, 0.5 * t_final, t_final],
            _ => vec![t_final],
        });

        Ok(Self {
            command,
            preset,
            scheme,
            epsilons,
            resolutions,
            grid_points,
            companion_tau,
            t_final,
            snapshot_times,
            reference,
            output_dir: cli
                .out
                .clone()
                .or_else(|| file.output.dir.clone())
                .unwrap_or_else(|| PathBuf::from("out")),
            seed: cli.seed.or(file.seed).unwrap_or(20_240_601),
            allow_unstable: cli.allow_unstable || file.allow_unstable.unwrap_or(false),
            linear_solver_tol: file.solver.linear_solver_tol.unwrap_or(1e-12),
            max_iterations: file.solver.max_iterations.unwrap_or(200),
        })
    }

    /// Defaults for `command` with no file and no overrides.
    pub fn defaults(command: Command) -> Result<Self> {
        Self::resolve(command, &ConfigFile::default(), &Overrides::default())
    }

    /// Time step of a run at `epsilon` (ignores the swept axis of `converge-time`).
    pub fn tau_for(&self, epsilon: f64) -> f64 {
        self.companion_tau.tau(epsilon, self.t_final)
    }

    pub fn grid(&self, n: usize) -> Result<Grid> {
        Ok(self.preset.grid(n)?)
    }
}
