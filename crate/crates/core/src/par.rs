//! Data-parallel loops over index ranges and slices.
//!
//! With the `parallel` feature these dispatch to rayon; without it they are
//! plain sequential loops. Every helper writes each output slot from exactly
//! one task, so results do not depend on scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

// Below this many elements a loop is not worth splitting.
#[cfg(feature = "parallel")]
const MIN_SPLIT: usize = 512;

/// `(0..len).map(f).collect()`, order preserved.
pub(crate) fn map_range<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..len).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(f).collect()
    }
}

/// Calls `f(index, &mut item)` for every slot of `items`.
pub(crate) fn for_each_indexed<T, F>(items: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize, &mut T) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items
            .par_iter_mut()
            .with_min_len(MIN_SPLIT)
            .enumerate()
            .for_each(|(k, x)| f(k, x));
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter_mut().enumerate().for_each(|(k, x)| f(k, x));
    }
}

/// Calls `f(chunk_index, chunk)` for consecutive chunks of `chunk` elements.
pub(crate) fn for_each_chunk<T, F>(items: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items
            .par_chunks_mut(chunk)
            .with_min_len((MIN_SPLIT / chunk.max(1)).max(1))
            .enumerate()
            .for_each(|(k, c)| f(k, c));
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.chunks_mut(chunk).enumerate().for_each(|(k, c)| f(k, c));
    }
}

/// Sum of `f(k)` over `0..len` for floats, reduced in fixed index order per
/// block so the result is independent of thread count.
pub(crate) fn sum_f64<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    const BLOCK: usize = 4096;
    let blocks = len.div_ceil(BLOCK);
    let partial = map_range(blocks, |b| {
        let end = ((b + 1) * BLOCK).min(len);
        (b * BLOCK..end).map(&f).sum::<f64>()
    });
    partial.into_iter().sum()
}
