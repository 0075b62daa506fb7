//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature the helpers run on the ambient rayon pool;
//! without it, or with [`Parallelism::Sequential`], they run in a plain loop.
//! Results are always returned in index order, so callers see identical output
//! for any worker count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Execution strategy for the data-parallel loops.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Parallelism {
    Sequential,
    /// Uses rayon when the `parallel` feature is enabled, otherwise sequential.
    #[default]
    Parallel,
}

impl Parallelism {
    /// True when work will actually be spread over threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Parallelism::Parallel
    }
}

/// `f(0), f(1), ..., f(len - 1)` collected in order.
pub fn map_range<T, F>(par: Parallelism, len: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if par.is_parallel() {
        return (0..len).into_par_iter().map(f).collect();
    }
    let _ = par;
    (0..len).map(f).collect()
}

/// Like [`map_range`] for fallible work. The reported error is the one with the
/// smallest index, independent of scheduling.
pub fn try_map_range<T, E, F>(par: Parallelism, len: u64, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(u64) -> Result<T, E> + Sync + Send,
{
    map_range(par, len, f).into_iter().collect()
}

/// Folds `items` in fixed-size chunks and merges the partial results in chunk
/// order. `merge` must be associative for the result to be partition
/// independent.
pub fn fold_chunks<I, A, Init, Fold, Merge>(
    par: Parallelism,
    items: &[I],
    chunk_len: usize,
    init: Init,
    fold: Fold,
    merge: Merge,
) -> A
where
    I: Sync,
    A: Send,
    Init: Fn() -> A + Sync + Send,
    Fold: Fn(&mut A, &I) + Sync + Send,
    Merge: Fn(A, A) -> A + Sync + Send,
{
    let chunk_len = chunk_len.max(1);
    let run = |chunk: &[I]| {
        let mut acc = init();
        for item in chunk {
            fold(&mut acc, item);
        }
        acc
    };
    #[cfg(feature = "parallel")]
    if par.is_parallel() {
        return items
            .par_chunks(chunk_len)
            .map(run)
            .reduce_with(&merge)
            .unwrap_or_else(&init);
    }
    let _ = par;
    items
        .chunks(chunk_len)
        .map(run)
        .reduce(&merge)
        .unwrap_or_else(init)
}
