//! Execution policy for the element-parallel kernels.
//!
//! Assembly, classification and geometry extraction are maps over elements
//! followed by a deterministic sequential gather, so the parallel and
//! sequential paths produce bit-identical results.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How element-wise work is scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parallelism {
    Sequential,
    #[cfg(feature = "parallel")]
    Rayon,
}

impl Default for Parallelism {
    #[cfg(feature = "parallel")]
    fn default() -> Self {
        Parallelism::Rayon
    }
    #[cfg(not(feature = "parallel"))]
    fn default() -> Self {
        Parallelism::Sequential
    }
}

/// Maps `f` over `items`, preserving order.
pub(crate) fn map_collect<T, U, F>(par: Parallelism, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    match par {
        Parallelism::Sequential => items.iter().map(f).collect(),
        #[cfg(feature = "parallel")]
        Parallelism::Rayon => items.par_iter().map(f).collect(),
    }
}

/// Maps `f` over `0..n`, preserving order.
pub(crate) fn map_range<U, F>(par: Parallelism, n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    match par {
        Parallelism::Sequential => (0..n).map(f).collect(),
        #[cfg(feature = "parallel")]
        Parallelism::Rayon => (0..n).into_par_iter().map(f).collect(),
    }
}
