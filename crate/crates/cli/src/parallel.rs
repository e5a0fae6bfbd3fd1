use arraymirror_core::Executor;
use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};

use crate::CliError;

pub const THREADS_VAR: &str = "ARRAYMIRROR_THREADS";

/// Runs sweep cells on a private rayon pool. Results keep input order.
pub struct RayonExecutor {
    pool: ThreadPool,
}

impl RayonExecutor {
    /// `threads = 0` lets rayon pick.
    pub fn new(threads: usize) -> Result<Self, CliError> {
        let pool = ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| CliError::Invalid(format!("cannot start thread pool: {e}")))?;
        Ok(Self { pool })
    }

    pub fn from_env() -> Result<Self, CliError> {
        Self::new(threads_from(std::env::var(THREADS_VAR).ok().as_deref())?)
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

pub fn threads_from(value: Option<&str>) -> Result<usize, CliError> {
    match value.map(str::trim) {
        None | Some("") => Ok(0),
        Some(s) => s
            .parse()
            .map_err(|_| CliError::Invalid(format!("{THREADS_VAR} must be a non-negative integer, got {s:?}"))),
    }
}

impl Executor for RayonExecutor {
    fn map<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        self.pool.install(|| items.par_iter().map(&f).collect())
    }
}
