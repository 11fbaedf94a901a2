//! Element-loop parallelism. `SB_THREADS` caps the worker count; results are
//! always merged in cell order so assembly is deterministic.

use std::sync::OnceLock;

use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};

fn pool() -> Option<&'static ThreadPool> {
    static POOL: OnceLock<Option<ThreadPool>> = OnceLock::new();
    POOL.get_or_init(|| {
        let n: usize = std::env::var("SB_THREADS").ok()?.trim().parse().ok()?;
        ThreadPoolBuilder::new().num_threads(n.max(1)).build().ok()
    })
    .as_ref()
}

/// `f(0), ..., f(n-1)` computed concurrently, returned in index order.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    let run = || (0..n).into_par_iter().map(&f).collect();
    match pool() {
        Some(p) => p.install(run),
        None => run(),
    }
}
