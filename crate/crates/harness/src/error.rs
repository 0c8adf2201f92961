use dirac4cfd::SolverError;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("reference self-convergence gate failed for epsilon = {epsilon}: deviation {deviation:.3e} exceeds {tolerance:.1e}")]
    ReferenceGate {
        epsilon: f64,
        deviation: f64,
        tolerance: f64,
    },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
    #[error("thread pool: {0}")]
    Pool(String),
}

pub type Result<T> = std::result::Result<T, HarnessError>;

pub(crate) fn io_err(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    }
}
