//! Execution-policy seam: data-parallel maps over index ranges with a
//! sequential fallback when the `parallel` feature is disabled.
//!
//! Callers must pass pure closures; results are collected in index order so
//! output is bitwise independent of the worker count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
pub(crate) fn map_indexed<U: Send>(n: usize, f: impl Fn(usize) -> U + Sync + Send) -> Vec<U> {
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indexed<U>(n: usize, f: impl Fn(usize) -> U) -> Vec<U> {
    (0..n).map(f).collect()
}

#[cfg(feature = "parallel")]
pub(crate) fn try_map_indexed<U: Send, E: Send>(
    n: usize,
    f: impl Fn(usize) -> Result<U, E> + Sync + Send,
) -> Result<Vec<U>, E> {
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn try_map_indexed<U, E>(
    n: usize,
    f: impl Fn(usize) -> Result<U, E>,
) -> Result<Vec<U>, E> {
    (0..n).map(f).collect()
}

/// Runs `f` with parallelism disabled: inside a dedicated single-thread pool
/// when the `parallel` feature is on, directly otherwise. Used by the `_seq`
/// siblings of the sweep entry points so benchmarks can compare both paths.
#[cfg(feature = "parallel")]
pub(crate) fn with_sequential<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    use std::sync::OnceLock;
    static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();
    let pool = POOL.get_or_init(|| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .expect("building a single-thread pool cannot fail")
    });
    pool.install(f)
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn with_sequential<R>(f: impl FnOnce() -> R) -> R {
    f()
}
