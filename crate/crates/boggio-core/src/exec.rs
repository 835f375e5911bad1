//! Data-parallel map helper.
//!
//! With the default `parallel` feature, independent work items fan out over a
//! rayon pool (capped by `BOGGIO_THREADS` if set); without it the same code
//! runs sequentially. Results are always collected in index order, so outputs
//! are bit-stable regardless of scheduling.

#[cfg(feature = "parallel")]
use once_cell::sync::Lazy;

#[cfg(feature = "parallel")]
static POOL: Lazy<Option<rayon::ThreadPool>> = Lazy::new(|| {
    let n: usize = std::env::var("BOGGIO_THREADS").ok()?.parse().ok()?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n.max(1))
        .build()
        .ok()
});

/// Map `f` over `0..len`, in parallel when enabled, preserving index order.
#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    use rayon::prelude::*;
    let run = || (0..len).into_par_iter().map(&f).collect();
    match POOL.as_ref() {
        Some(pool) => pool.install(run),
        None => run(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    (0..len).map(f).collect()
}

/// Sequential variant, kept unconditionally for benchmark comparison.
pub fn map_indexed_seq<T, F>(len: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..len).map(f).collect()
}
