//! Execution policy for the data-parallel kernels.
//!
//! With the `parallel` feature (on by default) kernels split their work over
//! the rayon pool. Without it every policy degrades to plain sequential loops
//! and rayon is not linked at all. Both paths produce bit-identical results:
//! reductions are always taken over fixed-size blocks and combined in order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Block length used for reductions so the summation order never depends on
/// how work was scheduled.
const REDUCE_BLOCK: usize = 1 << 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecPolicy {
    Sequential,
    Parallel,
}

impl Default for ExecPolicy {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            ExecPolicy::Parallel
        } else {
            ExecPolicy::Sequential
        }
    }
}

impl ExecPolicy {
    #[inline]
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == ExecPolicy::Parallel
    }
}

/// Runs `f(chunk_index, chunk)` over consecutive chunks of `data`.
pub fn for_each_chunk_mut<T, F>(policy: ExecPolicy, data: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Send + Sync,
{
    #[cfg(feature = "parallel")]
    if policy.is_parallel() {
        data.par_chunks_mut(chunk)
            .enumerate()
            .for_each(|(i, c)| f(i, c));
        return;
    }
    let _ = policy;
    data.chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
}

/// Fills `out[i] = f(i)`.
pub fn fill_indexed<T, F>(policy: ExecPolicy, out: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize) -> T + Send + Sync,
{
    #[cfg(feature = "parallel")]
    if policy.is_parallel() {
        out.par_iter_mut().enumerate().for_each(|(i, v)| *v = f(i));
        return;
    }
    let _ = policy;
    out.iter_mut().enumerate().for_each(|(i, v)| *v = f(i));
}

/// Collects `f(i)` for `i in 0..len`.
pub fn map_range<T, F>(policy: ExecPolicy, len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Send + Sync,
{
    #[cfg(feature = "parallel")]
    if policy.is_parallel() {
        return (0..len).into_par_iter().map(f).collect();
    }
    let _ = policy;
    (0..len).map(f).collect()
}

/// Order-stable sum of `f(i)` over `0..len`.
pub fn sum_range<F>(policy: ExecPolicy, len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Send + Sync,
{
    let blocks = len.div_ceil(REDUCE_BLOCK);
    let partial = map_range(policy, blocks, |b| {
        let start = b * REDUCE_BLOCK;
        let end = (start + REDUCE_BLOCK).min(len);
        (start..end).map(&f).sum::<f64>()
    });
    partial.iter().sum()
}

/// Order-stable sum of complex `f(i)` over `0..len`.
pub fn sum_range_complex<F>(policy: ExecPolicy, len: usize, f: F) -> num_complex::Complex64
where
    F: Fn(usize) -> num_complex::Complex64 + Send + Sync,
{
    let blocks = len.div_ceil(REDUCE_BLOCK);
    let partial = map_range(policy, blocks, |b| {
        let start = b * REDUCE_BLOCK;
        let end = (start + REDUCE_BLOCK).min(len);
        (start..end).map(&f).sum::<num_complex::Complex64>()
    });
    partial.iter().sum()
}
