//! Pluggable evaluation strategy for embarrassingly parallel loops.
//!
//! The core stays single threaded; a std caller can supply a thread pool.
//! Results are always assembled in index order, so outputs do not depend on
//! the executor.

use alloc::vec::Vec;

/// Maps a function over `0..n` and collects results in index order.
pub trait Executor: Sync {
    /// Evaluate `f(i)` for every `i < n`.
    fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

/// Sequential executor.
#[derive(Debug, Clone, Copy, Default)]
pub struct Serial;

impl Executor for Serial {
    fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..n).map(f).collect()
    }
}
