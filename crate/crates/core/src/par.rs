//! Data-parallel helpers. With the `parallel` feature these fan out over
//! rayon's pool; without it they run the same closures in order. Every merge
//! used by callers is associative, so both paths return identical results.

use std::ops::Range;

/// Splits `0..total` into contiguous chunks, folds each chunk with
/// `fold_chunk`, and merges the partial results left to right.
pub(crate) fn fold_chunks<T, F, M>(
    total: u64,
    chunk: u64,
    identity: T,
    fold_chunk: F,
    merge: M,
) -> T
where
    T: Send + Sync + Clone,
    F: Fn(Range<u64>) -> T + Send + Sync,
    M: Fn(T, T) -> T + Send + Sync,
{
    let chunk = chunk.max(1);
    let chunks = total.div_ceil(chunk);
    let range_of = |c: u64| c * chunk..((c + 1) * chunk).min(total);

    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..chunks)
            .into_par_iter()
            .map(|c| fold_chunk(range_of(c)))
            .reduce(|| identity.clone(), &merge)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..chunks)
            .map(|c| fold_chunk(range_of(c)))
            .fold(identity, merge)
    }
}

/// Maps every item, preserving order.
pub(crate) fn map<I, T, F>(items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Send + Sync,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Chunk size giving about sixteen tasks per worker.
pub(crate) fn chunk_size(total: u64) -> u64 {
    #[cfg(feature = "parallel")]
    let workers = rayon::current_num_threads() as u64;
    #[cfg(not(feature = "parallel"))]
    let workers = 1u64;
    (total / (workers * 16)).clamp(1, 1 << 16)
}
