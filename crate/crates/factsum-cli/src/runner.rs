//! Order-preserving parallel map.
//!
//! Results are collected back into input order regardless of scheduling, so
//! any `--jobs` value produces identical output. Every per-record closure in
//! this tool is pure, which is what makes that guarantee hold.

use rayon::prelude::*;

/// Maps `f` over `items`, in parallel when `jobs > 1`, preserving order.
pub fn par_map_ordered<T, R, F>(jobs: usize, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    if jobs <= 1 || items.len() <= 1 {
        return items.iter().map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("worker pool construction cannot fail with positive thread count");
    pool.install(|| items.par_iter().map(&f).collect())
}
