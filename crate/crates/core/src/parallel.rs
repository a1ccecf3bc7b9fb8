use crate::error::{Error, Result};

/// Runs `f` inside a dedicated rayon pool of `threads` workers, or directly
/// on the calling thread when `threads <= 1`.
pub(crate) fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> Result<R> {
    if threads <= 1 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::param(format!("cannot start {threads} worker threads: {e}")))?;
    Ok(pool.install(f))
}

/// Maps `f` over `0..n` with per-worker scratch state from `init`. Runs in
/// order on the calling thread when `threads <= 1`, so results never depend
/// on scheduling.
pub(crate) fn map_indexed<S, R, I, F>(threads: usize, n: usize, init: I, f: F) -> Result<Vec<R>>
where
    R: Send,
    I: Fn() -> S + Send + Sync,
    F: Fn(&mut S, usize) -> R + Send + Sync,
{
    if threads <= 1 {
        let mut state = init();
        return Ok((0..n).map(|i| f(&mut state, i)).collect());
    }
    with_threads(threads, || {
        use rayon::prelude::*;
        (0..n).into_par_iter().map_init(&init, &f).collect()
    })
}
