//! Execution mode for the data-parallel kernels.
//!
//! Every kernel that touches a dense buffer row by row, and every batch of
//! independent trajectories, goes through the helpers here. With the
//! `parallel` feature disabled, [`Execution::Parallel`] silently runs
//! sequentially, so results never depend on the feature set.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// True when the rayon path is compiled in and selected.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Runs `f(row_index, row)` for every row in `rows` of a row-major buffer.
pub(crate) fn for_each_row<T, F>(
    exec: Execution,
    data: &mut [T],
    row_len: usize,
    rows: std::ops::Range<usize>,
    f: F,
) where
    T: Send,
    F: Fn(usize, &mut [T]) + Send + Sync,
{
    let start = rows.start;
    let slice = &mut data[rows.start * row_len..rows.end * row_len];
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        slice
            .par_chunks_mut(row_len)
            .enumerate()
            .for_each(|(i, row)| f(start + i, row));
        return;
    }
    let _ = exec;
    slice
        .chunks_mut(row_len)
        .enumerate()
        .for_each(|(i, row)| f(start + i, row));
}

/// Runs `f(i, row_a, row_b)` over paired rows of two equally shaped buffers.
pub(crate) fn for_each_row_pair<T, F>(
    exec: Execution,
    a: &mut [T],
    b: &mut [T],
    row_len: usize,
    rows: std::ops::Range<usize>,
    f: F,
) where
    T: Send,
    F: Fn(usize, &mut [T], &mut [T]) + Send + Sync,
{
    let start = rows.start;
    let span = rows.start * row_len..rows.end * row_len;
    let (a, b) = (&mut a[span.clone()], &mut b[span]);
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        a.par_chunks_mut(row_len)
            .zip(b.par_chunks_mut(row_len))
            .enumerate()
            .for_each(|(i, (ra, rb))| f(start + i, ra, rb));
        return;
    }
    let _ = exec;
    a.chunks_mut(row_len)
        .zip(b.chunks_mut(row_len))
        .enumerate()
        .for_each(|(i, (ra, rb))| f(start + i, ra, rb));
}

/// Maps `f` over `0..count` and returns the results in index order.
///
/// Output order (and therefore any later sequential fold) is independent of
/// the execution mode and thread count.
pub(crate) fn map_indexed<R, F>(exec: Execution, count: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Send + Sync,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..count).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..count).map(f).collect()
}
