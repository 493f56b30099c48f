//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) work is spread over the rayon pool;
//! without it the same closures run on the calling thread. Callers must only
//! pass closures whose result does not depend on scheduling, so both modes
//! return identical values.

/// How a batch of independent work items is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "parallel", derive(Default))]
pub enum Execution {
    Sequential,
    #[cfg(feature = "parallel")]
    #[default]
    Parallel,
}

#[cfg(not(feature = "parallel"))]
impl Default for Execution {
    fn default() -> Self {
        Execution::Sequential
    }
}

/// Counts the indices in `0..n` for which `pred` holds.
pub fn count_where<F>(n: u64, mode: Execution, pred: F) -> u64
where
    F: Fn(u64) -> bool + Sync + Send,
{
    match mode {
        Execution::Sequential => (0..n).filter(|&i| pred(i)).count() as u64,
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().filter(|&i| pred(i)).count() as u64
        }
    }
}

/// Maps `f` over `items`, preserving order.
pub fn map_ordered<T, R, F>(items: &[T], mode: Execution, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match mode {
        Execution::Sequential => items.iter().map(f).collect(),
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
    }
}
