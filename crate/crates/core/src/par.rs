//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature, loops over disjoint chunks run on the rayon
//! pool unless serial mode was requested at runtime. Reductions are always
//! formed as per-chunk partial sums combined in chunk order, so serial and
//! parallel execution give bitwise-identical results.

use std::ops::Range;
use std::sync::atomic::{AtomicBool, Ordering};

static FORCE_SERIAL: AtomicBool = AtomicBool::new(false);

/// Chunk length used by reductions. Fixed so that partial sums do not depend
/// on the thread count.
pub const REDUCE_CHUNK: usize = 4096;

/// Force (or release) sequential execution for the whole process.
pub fn set_serial(serial: bool) {
    FORCE_SERIAL.store(serial, Ordering::SeqCst);
}

pub fn is_serial() -> bool {
    FORCE_SERIAL.load(Ordering::SeqCst) || !cfg!(feature = "parallel")
}

/// Caps the global rayon pool at `threads`. Only the first call has an effect.
#[cfg(feature = "parallel")]
pub fn init_threads(threads: usize) {
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build_global();
}

#[cfg(not(feature = "parallel"))]
pub fn init_threads(_threads: usize) {}

/// Applies `f(chunk_index, chunk)` to consecutive chunks of `data`.
pub fn for_each_chunk_mut<T, F>(data: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    let chunk = chunk.max(1);
    #[cfg(feature = "parallel")]
    {
        if !is_serial() {
            use rayon::prelude::*;
            data.par_chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
            return;
        }
    }
    for (i, c) in data.chunks_mut(chunk).enumerate() {
        f(i, c);
    }
}

/// Maps `f` over `0..n` and collects results in index order.
pub fn map_collect<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if !is_serial() {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(f).collect();
        }
    }
    (0..n).map(f).collect()
}

/// Deterministic sum of `f(range)` over fixed-size chunks of `0..n`.
pub fn chunked_sum<F>(n: usize, f: F) -> f64
where
    F: Fn(Range<usize>) -> f64 + Sync + Send,
{
    let chunks = n.div_ceil(REDUCE_CHUNK);
    let partials = map_collect(chunks, |c| {
        let lo = c * REDUCE_CHUNK;
        f(lo..(lo + REDUCE_CHUNK).min(n))
    });
    partials.into_iter().sum()
}
