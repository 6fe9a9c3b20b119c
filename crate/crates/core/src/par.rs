//! Index-parallel map, backed by rayon when the `parallel` feature is on.
//!
//! Results always come back in index order, so callers that fold them
//! sequentially are deterministic whatever the thread count.

/// Whether this build can run on more than one thread.
pub const PARALLEL: bool = cfg!(feature = "parallel");

/// Runs `f` with at most `threads` workers available to [`map_indexed`]
/// (`None` keeps the global default).
#[cfg(feature = "parallel")]
pub fn install<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    match threads.map(|t| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
    }) {
        Some(Ok(pool)) => pool.install(f),
        _ => f(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn install<R: Send>(_threads: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    f()
}

/// `(0..n).map(f).collect()`, spread over the current pool.
#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    if rayon::current_num_threads() <= 1 {
        return (0..n).map(f).collect();
    }
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}
