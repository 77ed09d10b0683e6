//! Order-preserving map over independent work items, on a rayon pool when
//! the `parallel` feature is enabled and sequentially otherwise.

/// Maps `f` over `items` on the global pool; output order follows input order.
#[cfg(feature = "parallel")]
pub fn map<T, R, F>(items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    items.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map<T, R, F>(items: Vec<T>, f: F) -> Vec<R>
where
    F: Fn(T) -> R,
{
    items.into_iter().map(f).collect()
}

/// Like [`map`] but on a dedicated pool of `threads` workers.
#[cfg(feature = "parallel")]
pub fn map_in_pool<T, R, F>(items: Vec<T>, threads: usize, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    if threads <= 1 {
        return items.into_iter().map(f).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(|| map(items, f)),
        Err(_) => map(items, f),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map_in_pool<T, R, F>(items: Vec<T>, _threads: usize, f: F) -> Vec<R>
where
    F: Fn(T) -> R,
{
    map(items, f)
}

/// Worker count requested through `LEXSCHED_THREADS`, if set and positive.
pub fn env_threads() -> Option<usize> {
    std::env::var("LEXSCHED_THREADS").ok()?.trim().parse().ok().filter(|&n: &usize| n > 0)
}

/// Caps the global pool at `threads` workers. Only the first call has an effect.
pub fn init_global(threads: usize) {
    #[cfg(feature = "parallel")]
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
}

/// Number of workers [`map`] will use.
pub fn current_threads() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}
