//! Order-preserving data parallelism.
//!
//! With the `parallel` feature and more than one thread requested, work runs
//! on a dedicated rayon pool sized to the request. Otherwise everything runs
//! on the calling thread. Results always come back in input order, so the
//! thread count never changes an answer.

/// Maps `f` over `items`, returning results in input order.
pub fn map_ordered<T, R, F>(items: &[T], threads: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(usize, &T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if threads > 1 && items.len() > 1 {
        use rayon::prelude::*;
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            return pool.install(|| items.par_iter().enumerate().map(|(i, t)| f(i, t)).collect());
        }
    }
    let _ = threads;
    items.iter().enumerate().map(|(i, t)| f(i, t)).collect()
}

/// Splits `0..len` into contiguous chunks of at most `chunk` elements.
pub fn chunk_ranges(len: u64, chunk: u64) -> Vec<std::ops::Range<u64>> {
    let chunk = chunk.max(1);
    (0..len.div_ceil(chunk))
        .map(|i| i * chunk..((i + 1) * chunk).min(len))
        .collect()
}

/// Default worker count: `PGCOVER_THREADS`, then available parallelism.
pub fn default_threads() -> usize {
    std::env::var("PGCOVER_THREADS")
        .ok()
        .and_then(|s| s.parse().ok())
        .filter(|&n: &usize| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}
