use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dirac4cfd_harness::commands::{self, CommandOutput};
use dirac4cfd_harness::oracle::OracleOptions;
use dirac4cfd_harness::{Command, ConfigFile, ExperimentSpec, Overrides};

#[derive(Parser)]
#[command(name = "dirac4cfd", version, about = "Compact finite difference solvers for the Dirac equation")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Spatial convergence table over a list of mesh sizes
    ConvergeSpace(Common),
    /// Temporal convergence table over a list of time steps
    ConvergeTime(Common),
    /// Mass and energy histories
    Conserve(Common),
    /// Density snapshots of a 2D preset
    Dynamics2d(Common),
    /// Dense-solve, Parseval, unitarity and amplification-factor checks
    OracleCheck(Common),
    /// A single run
    Solve {
        #[command(flatten)]
        common: Common,
        /// Measure the final field against a reference solution
        #[arg(long)]
        compare_reference: bool,
    },
}

#[derive(Args, Clone, Default)]
struct Common {
    /// TOML experiment file
    #[arg(long)]
    config: Option<PathBuf>,
    /// dirac1d-standard, honeycomb-2d or periodic-em-2d
    #[arg(long)]
    preset: Option<String>,
    /// implicit, semi or tssp
    #[arg(long)]
    scheme: Option<String>,
    /// Comma-separated values; expressions such as 2^-4 are accepted
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    epsilon: Vec<String>,
    /// Mesh sizes, e.g. pi/16,pi/32
    #[arg(long, value_delimiter = ',')]
    h: Vec<String>,
    /// Grid points per axis (alternative to a single --h)
    #[arg(long)]
    n: Option<usize>,
    /// Time steps, e.g. 0.05/2^3
    #[arg(long, value_delimiter = ',')]
    tau: Vec<String>,
    /// Final time
    #[arg(long)]
    tfinal: Option<String>,
    /// Snapshot times for dynamics2d
    #[arg(long, value_delimiter = ',')]
    snapshots: Vec<String>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for randomized checks
    #[arg(long)]
    seed: Option<u64>,
    /// Run even when the time step violates the stability bound
    #[arg(long)]
    allow_unstable: bool,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            preset: self.preset.clone(),
            scheme: self.scheme.clone(),
            epsilon: self.epsilon.clone(),
            h: self.h.clone(),
            n: self.n,
            tau: self.tau.clone(),
            t_final: self.tfinal.clone(),
            snapshot_times: self.snapshots.clone(),
            out: self.out.clone(),
            seed: self.seed,
            allow_unstable: self.allow_unstable,
        }
    }

    fn spec(&self, command: Command) -> anyhow::Result<ExperimentSpec> {
        let file = match &self.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        Ok(ExperimentSpec::resolve(command, &file, &self.overrides())?)
    }
}

fn execute(cli: Cli) -> anyhow::Result<CommandOutput> {
    let (command, common) = match &cli.command {
        Sub::ConvergeSpace(c) => (Command::ConvergeSpace, c),
        Sub::ConvergeTime(c) => (Command::ConvergeTime, c),
        Sub::Conserve(c) => (Command::Conserve, c),
        Sub::Dynamics2d(c) => (Command::Dynamics2d, c),
        Sub::OracleCheck(c) => (Command::OracleCheck, c),
        Sub::Solve { common, .. } => (Command::Solve, common),
    };
    let spec = common.spec(command)?;
    if let Some(w) = commands::unstable_warning(&spec)? {
        eprintln!("{w}");
    }
    let out = match cli.command {
        Sub::ConvergeSpace(_) => commands::cmd_converge_space(&spec)?,
        Sub::ConvergeTime(_) => commands::cmd_converge_time(&spec)?,
        Sub::Conserve(_) => commands::cmd_conserve(&spec)?,
        Sub::Dynamics2d(_) => commands::cmd_dynamics2d(&spec)?,
        Sub::OracleCheck(_) => commands::cmd_oracle_check(&spec, &OracleOptions::default())?,
        Sub::Solve {
            compare_reference, ..
        } => commands::cmd_solve(&spec, compare_reference)?,
    };
    Ok(out)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(out) => {
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            println!("{}", out.text.trim_end());
            for f in &out.files {
                eprintln!("wrote {}", f.display());
            }
            if out.success {
                ExitCode::SUCCESS
            } else {
                eprintln!("one or more checks failed");
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
