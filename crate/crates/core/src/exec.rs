//! Data-parallel mapping with a sequential fallback.
//!
//! With the `parallel` feature (default) [`Execution::Parallel`] fans work
//! out over the rayon pool. Without it, or with [`Execution::Sequential`],
//! items are processed in order on the calling thread. Results keep input
//! order either way, so reductions over them are reproducible.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

impl Execution {
    /// Whether work will actually be spread over threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

pub fn map<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec == Execution::Parallel {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Maps over `0..n`.
pub fn map_range<R, F>(exec: Execution, n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec == Execution::Parallel {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}
