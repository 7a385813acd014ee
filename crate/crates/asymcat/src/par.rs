//! Data-parallel map with a sequential fallback.
//!
//! Scans, multi-starts and Monte-Carlo runs are embarrassingly parallel: each
//! job is a pure function of its index. `map_par` fans out over rayon when the
//! `parallel` feature (default) is enabled and degrades to a plain loop
//! otherwise. Results are returned in index order either way, so outputs are
//! identical across both builds and any thread count.

/// Sequential map, kept available in parallel builds for benchmarking.
pub fn map_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T + Sync + Send,
    T: Send,
{
    (0..n).map(f).collect()
}

/// Map `f` over `0..n`, in parallel when the `parallel` feature is enabled.
#[cfg(feature = "parallel")]
pub fn map_par<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T + Sync + Send,
    T: Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

/// Map `f` over `0..n`, in parallel when the `parallel` feature is enabled.
#[cfg(not(feature = "parallel"))]
pub fn map_par<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T + Sync + Send,
    T: Send,
{
    map_seq(n, f)
}

/// Run `f` over `0..n` until it yields `Some`, returning the result with the
/// lowest index. Used by emptiness searches that only need one witness.
#[cfg(feature = "parallel")]
pub fn find_first_par<T, F>(n: usize, f: F) -> Option<(usize, T)>
where
    F: Fn(usize) -> Option<T> + Sync + Send,
    T: Send,
{
    use rayon::prelude::*;
    (0..n)
        .into_par_iter()
        .find_map_first(|i| f(i).map(|t| (i, t)))
}

/// Run `f` over `0..n` until it yields `Some`, returning the result with the
/// lowest index.
#[cfg(not(feature = "parallel"))]
pub fn find_first_par<T, F>(n: usize, f: F) -> Option<(usize, T)>
where
    F: Fn(usize) -> Option<T> + Sync + Send,
    T: Send,
{
    (0..n).find_map(|i| f(i).map(|t| (i, t)))
}

/// Number of worker threads the parallel build will use.
#[cfg(feature = "parallel")]
pub fn num_threads() -> usize {
    rayon::current_num_threads()
}

/// Number of worker threads the parallel build will use.
#[cfg(not(feature = "parallel"))]
pub fn num_threads() -> usize {
    1
}
