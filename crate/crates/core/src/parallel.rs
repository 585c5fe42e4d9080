//! Data-parallel helpers with a sequential fallback.
//!
//! Work is always split into the same index space regardless of the
//! execution mode, so parallel and sequential runs produce identical
//! results. Without the `parallel` feature every mode runs sequentially.

/// Execution strategy for batch work.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether work will actually be spread over threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Evaluates `f(0..n)` and returns the results in index order.
pub fn map_indexed<R, F>(exec: Execution, n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// Splits `0..len` into consecutive chunks of `chunk` items and maps each
/// chunk range, preserving order.
pub fn map_chunks<R, F>(exec: Execution, len: usize, chunk: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(std::ops::Range<usize>) -> R + Sync + Send,
{
    assert!(chunk > 0, "chunk size must be positive");
    let count = len.div_ceil(chunk);
    map_indexed(exec, count, |i| {
        let start = i * chunk;
        f(start..(start + chunk).min(len))
    })
}

/// Runs `f` on each item of `items` in parallel when enabled and returns the
/// results in order.
pub fn map_slice<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    map_indexed(exec, items.len(), |i| f(&items[i]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree_and_keep_order() {
        let seq = map_indexed(Execution::Sequential, 1000, |i| i * i);
        let par = map_indexed(Execution::Parallel, 1000, |i| i * i);
        assert_eq!(seq, par);
        assert_eq!(seq[31], 961);
    }

    #[test]
    fn chunks_cover_range() {
        let ranges = map_chunks(Execution::Parallel, 10, 3, |r| r);
        assert_eq!(ranges, vec![0..3, 3..6, 6..9, 9..10]);
        assert!(map_chunks(Execution::Sequential, 0, 4, |r| r).is_empty());
    }
}
