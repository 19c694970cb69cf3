//! Thread-pool executor for the core's parallel loops.

use lawson_core::Executor;
use rayon::prelude::*;

/// Name of the environment variable capping the evaluation width.
pub const PARALLELISM_VAR: &str = "CMC_PARALLELISM";

/// Rayon-backed [`Executor`]. Results come back in index order, so output
/// does not depend on the thread count.
pub struct Pool {
    pool: rayon::ThreadPool,
}

impl Pool {
    /// Pool with `threads` workers (0 means available parallelism).
    pub fn new(threads: usize) -> Result<Self, rayon::ThreadPoolBuildError> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
        Ok(Pool { pool })
    }

    /// Pool sized by `CMC_PARALLELISM`, or by the hardware when unset.
    pub fn from_env() -> Result<Self, rayon::ThreadPoolBuildError> {
        Self::new(parallelism_from_env().unwrap_or(0))
    }

    /// Worker count.
    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

/// Positive integer value of `CMC_PARALLELISM`, if set and valid.
pub fn parallelism_from_env() -> Option<usize> {
    std::env::var(PARALLELISM_VAR).ok()?.trim().parse().ok().filter(|&n: &usize| n > 0)
}

impl Executor for Pool {
    fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        self.pool.install(|| (0..n).into_par_iter().map(f).collect())
    }
}
