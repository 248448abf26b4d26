//! Batch execution strategy.
//!
//! With the `parallel` feature (default) batches fan out over rayon's global
//! pool; without it [`Execution::Parallel`] runs sequentially.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether `Parallel` actually runs on multiple threads in this build.
    pub const fn parallel_available() -> bool {
        cfg!(feature = "parallel")
    }

    /// Map `f` over `items`, preserving order.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            Execution::Sequential => items.iter().map(f).collect(),
            #[cfg(feature = "parallel")]
            Execution::Parallel => items.par_iter().map(f).collect(),
            #[cfg(not(feature = "parallel"))]
            Execution::Parallel => items.iter().map(f).collect(),
        }
    }
}
