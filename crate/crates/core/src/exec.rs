//! Sequential / data-parallel execution switch.
//!
//! With the `parallel` feature disabled every [`Execution::Parallel`] request
//! runs sequentially. Both paths produce bitwise-identical output: parallel
//! work is split over independent output elements, never over a reduction.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// Maps `f` over `0..len`, collecting results in index order.
    pub fn map_indices<T, F>(self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                (0..len).into_par_iter().map(f).collect()
            }
            _ => (0..len).map(f).collect(),
        }
    }

    /// Runs `f` confined to a single worker thread. Used by timing code, which
    /// must not share the machine with a thread pool.
    pub fn pinned<T: Send>(f: impl FnOnce() -> T + Send) -> T {
        #[cfg(feature = "parallel")]
        {
            match rayon::ThreadPoolBuilder::new().num_threads(1).build() {
                Ok(pool) => pool.install(f),
                Err(_) => f(),
            }
        }
        #[cfg(not(feature = "parallel"))]
        {
            f()
        }
    }
}

/// Caps the global worker pool. `0` keeps the library default (one worker per
/// core). Has no effect without the `parallel` feature or after the pool has
/// been initialised.
pub fn configure_threads(threads: usize) {
    #[cfg(feature = "parallel")]
    if threads > 0 {
        if let Err(err) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            log::warn!("could not size worker pool: {err}");
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
}
