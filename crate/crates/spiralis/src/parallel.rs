//! Order-preserving data-parallel building blocks.
//!
//! With the `parallel` feature (default) these run on the rayon global pool;
//! without it they are plain sequential loops. Every helper returns results
//! in input order and leaves reductions to the caller, which performs them
//! sequentially — so numerical output is bit-identical whatever the worker
//! count. `SPIRALIS_THREADS` (read by the CLI, or by [`configure_from_env`])
//! caps the pool size.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Cap the rayon worker count from the `SPIRALIS_THREADS` environment
/// variable. No-op if the variable is unset, unparsable, or the global pool
/// is already initialised; always a no-op in sequential builds.
pub fn configure_from_env() {
    #[cfg(feature = "parallel")]
    {
        if let Ok(raw) = std::env::var("SPIRALIS_THREADS") {
            if let Ok(n) = raw.trim().parse::<usize>() {
                if n >= 1 {
                    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
                }
            }
        }
    }
}

/// Map `f` over `0..n`, collecting results in index order.
pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Map `f` over a slice, collecting results in input order.
pub fn map_slice<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Map `f` over `0..n` where each call yields a batch; batches are
/// concatenated in index order.
pub fn flat_map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> Vec<T> + Sync + Send,
{
    let batches: Vec<Vec<T>> = map_range(n, f);
    let mut out = Vec::with_capacity(batches.iter().map(Vec::len).sum());
    for batch in batches {
        out.extend(batch);
    }
    out
}
