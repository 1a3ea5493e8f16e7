//! Worker-pool plumbing. Callers pass a parallelism degree; results never
//! depend on it.

use rayon::prelude::*;

/// Runs `f` on a dedicated pool of `jobs` threads (inline when `jobs <= 1`).
pub(crate) fn with_jobs<R, F>(jobs: usize, f: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    if jobs <= 1 {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// Least index in `0..n` satisfying `pred`.
pub(crate) fn first_index<F>(n: usize, jobs: usize, pred: F) -> Option<usize>
where
    F: Fn(usize) -> bool + Sync + Send,
{
    if jobs <= 1 {
        return (0..n).find(|&i| pred(i));
    }
    with_jobs(jobs, || (0..n).into_par_iter().find_first(|&i| pred(i)))
}

/// Least value in `lo..hi` (u64 range) satisfying `pred`.
pub(crate) fn first_u64<F>(lo: u64, hi: u64, jobs: usize, pred: F) -> Option<u64>
where
    F: Fn(u64) -> bool + Sync + Send,
{
    if jobs <= 1 {
        return (lo..hi).find(|&i| pred(i));
    }
    with_jobs(jobs, || (lo..hi).into_par_iter().find_first(|&i| pred(i)))
}

/// Maps `0..n` in parallel, preserving order.
pub(crate) fn map_indexed<T, F>(n: usize, jobs: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if jobs <= 1 {
        return (0..n).map(f).collect();
    }
    with_jobs(jobs, || (0..n).into_par_iter().map(f).collect())
}
