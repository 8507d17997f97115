//! Data-parallel helpers.
//!
//! With the `parallel` feature these fan out over a rayon pool; without it
//! every call degrades to a plain sequential loop with the same output order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How a batch of independent work items is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Rayon pool. `threads: None` uses the global pool.
    #[default]
    Parallel,
    ParallelWith { threads: usize },
}

impl Execution {
    /// Maps `jobs` as accepted on the command line: 1 is sequential, 0 means
    /// "all cores".
    pub fn from_jobs(jobs: usize) -> Self {
        match jobs {
            1 => Execution::Sequential,
            0 => Execution::Parallel,
            n => Execution::ParallelWith { threads: n },
        }
    }

    pub fn is_parallel(&self) -> bool {
        cfg!(feature = "parallel") && !matches!(self, Execution::Sequential)
    }

    /// Order-preserving map.
    pub fn map<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            Execution::Sequential => items.iter().map(f).collect(),
            #[cfg(feature = "parallel")]
            Execution::Parallel => items.par_iter().map(f).collect(),
            #[cfg(feature = "parallel")]
            Execution::ParallelWith { threads } => {
                with_pool(*threads, || items.par_iter().map(f).collect())
            }
            #[cfg(not(feature = "parallel"))]
            _ => items.iter().map(f).collect(),
        }
    }

    /// Runs `f` on every item; completion order is unspecified when parallel.
    pub fn for_each<T, F>(&self, items: &[T], f: F)
    where
        T: Sync,
        F: Fn(&T) + Sync + Send,
    {
        match self {
            Execution::Sequential => items.iter().for_each(f),
            #[cfg(feature = "parallel")]
            Execution::Parallel => items.par_iter().for_each(f),
            #[cfg(feature = "parallel")]
            Execution::ParallelWith { threads } => with_pool(*threads, || items.par_iter().for_each(f)),
            #[cfg(not(feature = "parallel"))]
            _ => items.iter().for_each(f),
        }
    }
}

#[cfg(feature = "parallel")]
fn with_pool<R: Send>(threads: usize, op: impl FnOnce() -> R + Send) -> R {
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(op),
        // Pool creation only fails on resource exhaustion; the global pool still works.
        Err(_) => op(),
    }
}
