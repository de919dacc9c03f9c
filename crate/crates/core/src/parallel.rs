//! Thread-count control for the row-parallel operators.

use crate::error::{Error, Result};

/// Runs `f` inside a dedicated rayon pool with `threads` workers.
///
/// Every operator in the crate parallelizes over rows through rayon, so
/// this is the knob the benchmark turns. Outputs do not depend on it.
pub fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> Result<R> {
    if threads == 0 {
        return Err(Error::Parameter("thread count must be positive".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Parameter(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Logical CPUs available to this process.
pub fn available_threads() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}
