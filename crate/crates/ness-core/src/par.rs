//! Data-parallel map over independent work items.
//!
//! With the `parallel` feature the work fans out over the global rayon pool;
//! without it the same call runs sequentially. Output order always matches
//! input order, so results are deterministic either way.

/// Maps `f` over `items`, in parallel when the `parallel` feature is active.
#[cfg(feature = "parallel")]
pub fn map_items<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

/// Maps `f` over `items`, in parallel when the `parallel` feature is active.
#[cfg(not(feature = "parallel"))]
pub fn map_items<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Sequential reference path, always available (used by the benches to
/// compare against the parallel dispatch).
pub fn map_items_seq<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Sizes the global thread pool. A `workers` of 0 keeps the default
/// (available parallelism). Returns an error message if the pool was
/// already initialized with a different size.
#[cfg(feature = "parallel")]
pub fn configure_workers(workers: usize) -> std::result::Result<(), String> {
    if workers == 0 {
        return Ok(());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global()
        .map_err(|e| e.to_string())
}

/// Without the `parallel` feature there is no pool to configure.
#[cfg(not(feature = "parallel"))]
pub fn configure_workers(_workers: usize) -> std::result::Result<(), String> {
    Ok(())
}
