use crate::error::{HarnessError, Result};

pub const THREADS_ENV: &str = "DIRAC4CFD_THREADS";

/// Thread cap from `DIRAC4CFD_THREADS`; `None` when unset.
pub fn thread_cap() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(HarnessError::Config(format!(
                "{THREADS_ENV} must be a positive integer, got '{s}'"
            ))),
        },
    }
}

/// A pool sized by [`thread_cap`], or rayon's default when no cap is set.
pub fn pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap()? {
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| HarnessError::Pool(e.to_string()))
}
