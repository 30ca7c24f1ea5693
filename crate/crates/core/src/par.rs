//! Thin switch between rayon and sequential iteration.

/// `(start..end).map(f)` collected in order, in parallel when the
/// `parallel` feature is on.
#[cfg(feature = "parallel")]
pub fn map_range<T: Send, F: Fn(usize) -> T + Sync>(start: usize, end: usize, f: &F) -> Vec<T> {
    use rayon::prelude::*;
    (start..end).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_range<T: Send, F: Fn(usize) -> T + Sync>(start: usize, end: usize, f: &F) -> Vec<T> {
    (start..end).map(f).collect()
}

/// Cap the global worker pool from `ROUGHWAVE_THREADS` (no-op if unset or
/// if the pool is already initialised).
pub fn init_threads_from_env() {
    #[cfg(feature = "parallel")]
    if let Some(n) = std::env::var("ROUGHWAVE_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}
