//! Parallel-map primitive used by the grid and probe sweeps.
//!
//! With the default `parallel` feature the indexed map runs on rayon;
//! without it everything degrades to the sequential loop. The `_serial`
//! variant is always available so benchmarks can compare both paths in a
//! single build.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `0..n`, collecting results in index order.
pub fn map_indexed<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().with_min_len(16).map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_indexed_serial(n, f)
    }
}

/// Sequential counterpart of [`map_indexed`].
pub fn map_indexed_serial<U, F>(n: usize, f: F) -> Vec<U>
where
    F: Fn(usize) -> U,
{
    (0..n).map(f).collect()
}

/// True when the parallel path is compiled in.
pub fn parallel_enabled() -> bool {
    cfg!(feature = "parallel")
}
