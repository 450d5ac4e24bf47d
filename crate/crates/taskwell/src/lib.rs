//! A lightweight thread pool with task futures, loop parallelization,
//! pausing, and monitoring.
//!
//! The pool spawns a fixed number of worker threads once and reuses them
//! for every task, pulling work from a shared FIFO queue. On top of that
//! it provides:
//!
//! - **Futures**: [`submit`](ThreadPool::submit) returns a [`TaskFuture`]
//!   for the task's result; [`push_task`](ThreadPool::push_task) runs a
//!   task with no result handling at all.
//! - **Loop parallelization**:
//!   [`parallelize_loop`](ThreadPool::parallelize_loop) splits an index
//!   range into contiguous blocks and runs them as parallel tasks,
//!   collected in a [`MultiFuture`].
//! - **Monitoring**: [`task_counts`](ThreadPool::task_counts) reports a
//!   consistent snapshot of queued, running, and total task counts.
//! - **Pausing**: [`set_paused`](ThreadPool::set_paused) stops workers
//!   from taking new tasks without discarding the queue;
//!   [`reset`](ThreadPool::reset) swaps the workers for a new set while
//!   preserving queued tasks.
//! - **Failure containment**: a panicking task never kills its worker;
//!   the failure travels to the task's future, or to an optional handler
//!   for fire-and-forget tasks.
//! - **Synchronized output**: [`SyncedStream`] serializes whole print
//!   calls from concurrent tasks; [`Stopwatch`] measures elapsed time.
//!
//! # Quick start
//!
//! ```
//! use taskwell::ThreadPool;
//!
//! let pool = ThreadPool::with_threads(4);
//!
//! // One task, one future.
//! let answer = pool.submit(|| 6 * 7);
//! assert_eq!(answer.get().unwrap(), 42);
//!
//! // A parallelized loop: sum the squares of 0..100 in blocks.
//! let total: i64 = pool
//!     .parallelize_loop(0, 100, |start, end| {
//!         (start..end).map(|i| i * i).sum::<i64>()
//!     })
//!     .get()
//!     .unwrap()
//!     .into_iter()
//!     .sum();
//! assert_eq!(total, 328350);
//! ```

mod future;
mod loops;
mod pool;
mod sync;

pub use future::{MultiFuture, TaskError, TaskFuture};
pub use loops::{compute_blocks, BlockPartition, BlockRange};
pub use pool::{hardware_concurrency, TaskCounts, ThreadPool};
pub use sync::{Stopwatch, SyncedStream};

/// Library version and release date, as reported by the test harness.
pub const VERSION: &str = concat!("v", env!("CARGO_PKG_VERSION"), " (2026-08-19)");
