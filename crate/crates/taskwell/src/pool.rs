//! The thread pool itself: worker management, task queue, and monitoring.

use std::collections::VecDeque;
use std::panic::{self, AssertUnwindSafe};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Condvar, Mutex};
use std::thread::{self, JoinHandle};

use crate::future::{MultiFuture, TaskError, TaskFuture};
use crate::loops::compute_blocks;

type Task = Box<dyn FnOnce() + Send + 'static>;
type PanicHandler = Box<dyn Fn(TaskError) + Send + Sync + 'static>;

/// Number of hardware threads available to the process, never less than 1.
pub fn hardware_concurrency() -> usize {
    thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

/// Consistent snapshot of the pool's task counters.
///
/// All three fields come from the same locked region, so `total` always
/// equals `queued + running`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TaskCounts {
    /// Tasks sitting in the queue, not yet picked up by a worker.
    pub queued: usize,
    /// Tasks currently executing on a worker.
    pub running: usize,
    /// Tasks owned by the pool in any form: `queued + running`.
    pub total: usize,
}

struct PoolState {
    queue: VecDeque<Task>,
    running: usize,
    paused: bool,
    /// Set while `reset` swaps workers: blocks dequeues like `paused`, but
    /// is invisible to `is_paused` and `wait_for_tasks`.
    draining: bool,
    shutdown: bool,
}

struct Shared {
    state: Mutex<PoolState>,
    /// Signaled when a task is queued, the pool is unpaused, or workers
    /// must shut down. Workers wait on this.
    task_available: Condvar,
    /// Signaled when a task completes or the pause flag changes. Waiters
    /// in `wait_for_tasks` and `reset` wait on this.
    state_changed: Condvar,
    thread_count: AtomicUsize,
    panic_handler: Mutex<Option<PanicHandler>>,
}

impl Shared {
    fn report_panic(&self, error: TaskError) {
        let handler = self.panic_handler.lock().unwrap();
        if let Some(handler) = handler.as_ref() {
            // A misbehaving handler must not kill the worker.
            let _ = panic::catch_unwind(AssertUnwindSafe(|| handler(error)));
        }
    }
}

/// Thread pool with a fixed set of workers pulling from a shared FIFO queue.
///
/// Workers are created once and reused for every task, so the per-task cost
/// is a queue operation rather than a thread spawn. Tasks are executed in
/// submission order as workers become free. The pool can be paused, queried
/// for its task counts, and reset to a different number of threads; dropping
/// it waits for outstanding work before joining the workers.
///
/// # Examples
///
/// ```
/// use taskwell::ThreadPool;
///
/// let pool = ThreadPool::with_threads(4);
/// let future = pool.submit(|| 6 * 7);
/// assert_eq!(future.get().unwrap(), 42);
/// ```
pub struct ThreadPool {
    shared: Arc<Shared>,
    workers: Mutex<Vec<JoinHandle<()>>>,
}

impl ThreadPool {
    /// Creates a pool with one worker per hardware thread.
    pub fn new() -> Self {
        Self::with_threads(hardware_concurrency())
    }

    /// Creates a pool with `thread_count` workers. A count of 0 is treated
    /// as 1.
    pub fn with_threads(thread_count: usize) -> Self {
        let shared = Arc::new(Shared {
            state: Mutex::new(PoolState {
                queue: VecDeque::new(),
                running: 0,
                paused: false,
                draining: false,
                shutdown: false,
            }),
            task_available: Condvar::new(),
            state_changed: Condvar::new(),
            thread_count: AtomicUsize::new(0),
            panic_handler: Mutex::new(None),
        });
        let pool = ThreadPool {
            shared,
            workers: Mutex::new(Vec::new()),
        };
        let count = thread_count.max(1);
        let mut workers = pool.workers.lock().unwrap();
        Self::spawn_workers(&pool.shared, &mut workers, count);
        drop(workers);
        pool
    }

    fn spawn_workers(shared: &Arc<Shared>, workers: &mut Vec<JoinHandle<()>>, count: usize) {
        for i in 0..count {
            let shared = Arc::clone(shared);
            let handle = thread::Builder::new()
                .name(format!("taskwell-worker-{i}"))
                .spawn(move || worker_loop(&shared))
                .expect("failed to spawn worker thread");
            workers.push(handle);
        }
        shared.thread_count.store(count, Ordering::Relaxed);
    }

    /// Number of worker threads in the pool.
    pub fn thread_count(&self) -> usize {
        self.shared.thread_count.load(Ordering::Relaxed)
    }

    /// Queues a task without creating a future for its result.
    ///
    /// If the task panics, the panic is caught at the worker, reported to
    /// the handler installed with [`set_panic_handler`](Self::set_panic_handler)
    /// if any, and otherwise discarded. The worker keeps serving tasks.
    pub fn push_task<F>(&self, task: F)
    where
        F: FnOnce() + Send + 'static,
    {
        self.enqueue(Box::new(task));
    }

    /// Queues a task and returns a future for its result.
    ///
    /// If the task panics, the payload is captured and the future resolves
    /// to an error instead; [`TaskFuture::get`] hands the failure back on
    /// the retrieving thread.
    pub fn submit<F, R>(&self, task: F) -> TaskFuture<R>
    where
        F: FnOnce() -> R + Send + 'static,
        R: Send + 'static,
    {
        let (future, completer) = TaskFuture::new();
        self.enqueue(Box::new(move || {
            let outcome =
                panic::catch_unwind(AssertUnwindSafe(task)).map_err(TaskError::from_payload);
            completer.complete(outcome);
        }));
        future
    }

    fn enqueue(&self, task: Task) {
        let mut state = self.shared.state.lock().unwrap();
        state.queue.push_back(task);
        drop(state);
        self.shared.task_available.notify_one();
    }

    /// Splits the index range `[start, end)` into one block per worker
    /// thread and queues one task per block. See
    /// [`parallelize_loop_with`](Self::parallelize_loop_with).
    pub fn parallelize_loop<F, R>(&self, start: i64, end: i64, body: F) -> MultiFuture<R>
    where
        F: Fn(i64, i64) -> R + Send + Sync + 'static,
        R: Send + 'static,
    {
        self.parallelize_loop_with(start, end, self.thread_count(), body)
    }

    /// Splits the index range `[start, end)` into at most `num_blocks`
    /// contiguous blocks and queues one task per block, each invoking
    /// `body(block_start, block_end)`.
    ///
    /// Blocks are computed by [`compute_blocks`], so a descending range is
    /// normalized, no block is ever empty, and an empty range queues
    /// nothing. The returned [`MultiFuture`] holds one future per block in
    /// block order; waiting on it waits only for these tasks.
    pub fn parallelize_loop_with<F, R>(
        &self,
        start: i64,
        end: i64,
        num_blocks: usize,
        body: F,
    ) -> MultiFuture<R>
    where
        F: Fn(i64, i64) -> R + Send + Sync + 'static,
        R: Send + 'static,
    {
        let partition = compute_blocks(start, end, num_blocks);
        let body = Arc::new(body);
        let mut futures = MultiFuture::new();
        for block in partition.blocks() {
            let body = Arc::clone(&body);
            let (block_start, block_end) = (block.start, block.end);
            futures.push(self.submit(move || body(block_start, block_end)));
        }
        futures
    }

    /// Snapshot of the queued, running, and total task counts.
    pub fn task_counts(&self) -> TaskCounts {
        let state = self.shared.state.lock().unwrap();
        let queued = state.queue.len();
        let running = state.running;
        TaskCounts {
            queued,
            running,
            total: queued + running,
        }
    }

    /// Number of tasks waiting in the queue.
    pub fn tasks_queued(&self) -> usize {
        self.task_counts().queued
    }

    /// Number of tasks currently executing.
    pub fn tasks_running(&self) -> usize {
        self.task_counts().running
    }

    /// Number of tasks owned by the pool, queued or running.
    pub fn tasks_total(&self) -> usize {
        self.task_counts().total
    }

    /// Pauses or resumes the pool.
    ///
    /// While paused, workers stop taking tasks from the queue; tasks that
    /// are already running continue to completion. Submitting is still
    /// allowed and grows the queue. Unpausing resumes execution in queue
    /// order.
    pub fn set_paused(&self, paused: bool) {
        let mut state = self.shared.state.lock().unwrap();
        state.paused = paused;
        drop(state);
        // Wake workers so they notice the unpause, and waiters so they
        // re-evaluate their predicate against the new flag.
        self.shared.task_available.notify_all();
        self.shared.state_changed.notify_all();
    }

    /// Whether the pool is currently paused.
    pub fn is_paused(&self) -> bool {
        self.shared.state.lock().unwrap().paused
    }

    /// Blocks until the pool has no more work to do.
    ///
    /// With the pool unpaused this means no queued and no running tasks.
    /// With the pool paused, only the currently running tasks are waited
    /// for; queued tasks stay queued. Returns immediately if there is
    /// nothing to wait for. Must not be called from inside a task, as the
    /// worker would then be waiting for itself.
    pub fn wait_for_tasks(&self) {
        let mut state = self.shared.state.lock().unwrap();
        loop {
            let done = if state.paused {
                state.running == 0
            } else {
                state.running == 0 && state.queue.is_empty()
            };
            if done {
                return;
            }
            state = self.shared.state_changed.wait(state).unwrap();
        }
    }

    /// Replaces the workers with a fresh set of `new_thread_count` threads
    /// (or one per hardware thread when `None`).
    ///
    /// Waits for the currently running tasks to finish, joins the old
    /// workers, and spawns the new ones. Queued tasks are not discarded:
    /// they stay in the queue and resume on the new workers. The pause
    /// flag is left exactly as it was, and tasks submitted while the reset
    /// is in progress are queued as usual. Must not be called from inside
    /// a task.
    pub fn reset(&self, new_thread_count: impl Into<Option<usize>>) {
        let count = new_thread_count
            .into()
            .unwrap_or_else(hardware_concurrency)
            .max(1);
        let mut workers = self.workers.lock().unwrap();
        {
            let mut state = self.shared.state.lock().unwrap();
            state.draining = true;
        }
        self.wait_until_idle();
        {
            let mut state = self.shared.state.lock().unwrap();
            state.shutdown = true;
        }
        self.shared.task_available.notify_all();
        for handle in workers.drain(..) {
            let _ = handle.join();
        }
        {
            let mut state = self.shared.state.lock().unwrap();
            state.shutdown = false;
            state.draining = false;
        }
        Self::spawn_workers(&self.shared, &mut workers, count);
        self.shared.task_available.notify_all();
    }

    /// Installs a handler invoked with the error whenever a task queued
    /// with [`push_task`](Self::push_task) panics. Failures of tasks
    /// queued with [`submit`](Self::submit) go to their futures instead
    /// and never reach this handler.
    pub fn set_panic_handler<F>(&self, handler: F)
    where
        F: Fn(TaskError) + Send + Sync + 'static,
    {
        *self.shared.panic_handler.lock().unwrap() = Some(Box::new(handler));
    }

    fn wait_until_idle(&self) {
        let mut state = self.shared.state.lock().unwrap();
        while state.running > 0 {
            state = self.shared.state_changed.wait(state).unwrap();
        }
    }
}

impl Default for ThreadPool {
    fn default() -> Self {
        Self::new()
    }
}

impl Drop for ThreadPool {
    /// Waits for outstanding tasks and joins the workers.
    ///
    /// If the pool is paused, only the running tasks are waited for;
    /// whatever is still queued is discarded without ever executing.
    fn drop(&mut self) {
        self.wait_for_tasks();
        {
            let mut state = self.shared.state.lock().unwrap();
            state.shutdown = true;
        }
        self.shared.task_available.notify_all();
        for handle in self.workers.get_mut().unwrap().drain(..) {
            let _ = handle.join();
        }
    }
}

fn worker_loop(shared: &Shared) {
    loop {
        let task = {
            let mut state = shared.state.lock().unwrap();
            loop {
                if state.shutdown {
                    return;
                }
                if !state.paused && !state.draining {
                    if let Some(task) = state.queue.pop_front() {
                        state.running += 1;
                        break task;
                    }
                }
                state = shared.task_available.wait(state).unwrap();
            }
        };
        let outcome = panic::catch_unwind(AssertUnwindSafe(task));
        {
            let mut state = shared.state.lock().unwrap();
            state.running -= 1;
        }
        shared.state_changed.notify_all();
        if let Err(payload) = outcome {
            shared.report_panic(TaskError::from_payload(payload));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::AtomicBool;

    #[test]
    fn default_pool_uses_hardware_concurrency() {
        let pool = ThreadPool::new();
        assert_eq!(pool.thread_count(), hardware_concurrency());
    }

    #[test]
    fn zero_threads_clamps_to_one() {
        let pool = ThreadPool::with_threads(0);
        assert_eq!(pool.thread_count(), 1);
    }

    #[test]
    fn submit_returns_value() {
        let pool = ThreadPool::with_threads(2);
        let future = pool.submit(|| 19 + 23);
        assert_eq!(future.get().unwrap(), 42);
    }

    #[test]
    fn push_task_runs_side_effect() {
        let pool = ThreadPool::with_threads(2);
        let flag = Arc::new(AtomicBool::new(false));
        let flag2 = Arc::clone(&flag);
        pool.push_task(move || flag2.store(true, Ordering::SeqCst));
        pool.wait_for_tasks();
        assert!(flag.load(Ordering::SeqCst));
    }

    #[test]
    fn wait_for_tasks_on_idle_pool_returns_immediately() {
        let pool = ThreadPool::with_threads(2);
        pool.wait_for_tasks();
        assert_eq!(pool.tasks_total(), 0);
    }

    #[test]
    fn counts_snapshot_is_consistent() {
        let pool = ThreadPool::with_threads(2);
        for _ in 0..100 {
            pool.push_task(|| {});
        }
        for _ in 0..1000 {
            let counts = pool.task_counts();
            assert_eq!(counts.total, counts.queued + counts.running);
        }
        pool.wait_for_tasks();
        assert_eq!(pool.task_counts().total, 0);
    }
}
