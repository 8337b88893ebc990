//! Data-parallel execution with a sequential fallback.
//!
//! Every bulk operation in the crate (class enumeration, per-class LP
//! solves, batched eigenvalue evaluation) funnels through [`map_ordered`],
//! which preserves input order so that results are bitwise identical
//! regardless of the execution mode or worker count. With the `parallel`
//! feature (on by default) the work is dispatched through rayon; without it
//! everything runs sequentially and [`Exec::Par`] degrades to [`Exec::Seq`].

use std::sync::atomic::{AtomicUsize, Ordering};

/// Execution mode for bulk operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    /// Run on the calling thread.
    Seq,
    /// Run on the rayon thread pool (sequential when the `parallel`
    /// feature is disabled).
    Par,
}

impl Default for Exec {
    fn default() -> Self {
        Exec::Par
    }
}

static REQUESTED_JOBS: AtomicUsize = AtomicUsize::new(0);

/// Records the requested worker count: `0` means "let the pool decide".
///
/// With the `parallel` feature this configures the global rayon pool the
/// first time it is called; later calls only update the bookkeeping (rayon
/// pools cannot be resized). Returns the count that will actually be used.
pub fn configure_jobs(jobs: usize) -> usize {
    REQUESTED_JOBS.store(jobs, Ordering::SeqCst);
    #[cfg(feature = "parallel")]
    {
        if jobs > 0 {
            // Ignore the error: the pool may already be initialised (e.g.
            // by an earlier call or by the test harness), in which case the
            // existing pool is kept.
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build_global();
        }
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

/// The effective worker count for [`Exec::Par`].
pub fn effective_jobs() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

/// Maps `f` over `items`, returning results in input order.
pub fn map_ordered<T, R, F>(exec: Exec, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        Exec::Seq => items.iter().map(f).collect(),
        Exec::Par => {
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
    }
}

/// Maps `f` over an index range, returning results in index order.
pub fn map_range<R, F>(exec: Exec, n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    match exec {
        Exec::Seq => (0..n).map(f).collect(),
        Exec::Par => {
            #[cfg(feature = "parallel")]
            {
                use rayon::prelude::*;
                (0..n).into_par_iter().map(f).collect()
            }
            #[cfg(not(feature = "parallel"))]
            {
                (0..n).map(f).collect()
            }
        }
    }
}
