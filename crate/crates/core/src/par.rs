//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature disabled every helper runs sequentially and
//! `Exec::Parallel` behaves like `Exec::Sequential`. All reductions are
//! order-independent or take the lowest index, so results never depend on
//! scheduling.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Execution strategy for the data-parallel kernels.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    /// True when work will actually be spread over the rayon pool.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }
}

pub(crate) fn map<T, R, F>(exec: Exec, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

pub(crate) fn sum_range<F>(exec: Exec, range: Range<usize>, f: F) -> u64
where
    F: Fn(usize) -> u64 + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return range.into_par_iter().map(f).sum();
    }
    let _ = exec;
    range.map(f).sum()
}

pub(crate) fn any<T, F>(exec: Exec, items: &[T], f: F) -> bool
where
    T: Sync,
    F: Fn(usize, &T) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return items.par_iter().enumerate().any(|(i, x)| f(i, x));
    }
    let _ = exec;
    items.iter().enumerate().any(|(i, x)| f(i, x))
}

/// Runs `f` over `0..len` and returns results in index order.
pub(crate) fn map_range<R, F>(exec: Exec, range: Range<usize>, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return range.into_par_iter().map(f).collect();
    }
    let _ = exec;
    range.map(f).collect()
}
