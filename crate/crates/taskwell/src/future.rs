//! Futures for retrieving task results, and the error type for failed tasks.

use std::any::Any;
use std::error::Error;
use std::fmt;
use std::sync::{Arc, Condvar, Mutex};

/// Error produced when a task panics instead of returning a value.
///
/// The panic payload is captured and carried to whoever retrieves the
/// result, so a failure inside a worker thread surfaces at the call site
/// that asked for the value.
pub struct TaskError {
    payload: Box<dyn Any + Send>,
}

impl TaskError {
    pub(crate) fn from_payload(payload: Box<dyn Any + Send>) -> Self {
        TaskError { payload }
    }

    /// The panic message, if the payload was a string; a generic message
    /// otherwise.
    pub fn message(&self) -> &str {
        if let Some(s) = self.payload.downcast_ref::<&'static str>() {
            s
        } else if let Some(s) = self.payload.downcast_ref::<String>() {
            s
        } else {
            "task panicked with a non-string payload"
        }
    }

    /// Consumes the error and returns the raw panic payload.
    pub fn into_payload(self) -> Box<dyn Any + Send> {
        self.payload
    }
}

impl fmt::Display for TaskError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.message())
    }
}

impl fmt::Debug for TaskError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("TaskError").field(&self.message()).finish()
    }
}

impl Error for TaskError {}

struct FutureState<T> {
    outcome: Mutex<Option<Result<T, TaskError>>>,
    ready: Condvar,
}

impl<T> FutureState<T> {
    fn new() -> Self {
        FutureState {
            outcome: Mutex::new(None),
            ready: Condvar::new(),
        }
    }

    fn complete(&self, outcome: Result<T, TaskError>) {
        let mut slot = self.outcome.lock().unwrap();
        debug_assert!(slot.is_none(), "future completed twice");
        *slot = Some(outcome);
        drop(slot);
        self.ready.notify_all();
    }

    fn wait(&self) {
        let mut slot = self.outcome.lock().unwrap();
        while slot.is_none() {
            slot = self.ready.wait(slot).unwrap();
        }
    }

    fn take(&self) -> Result<T, TaskError> {
        let mut slot = self.outcome.lock().unwrap();
        loop {
            if slot.is_some() {
                return slot.take().unwrap();
            }
            slot = self.ready.wait(slot).unwrap();
        }
    }
}

/// Handle to the eventual result of a single submitted task.
///
/// The task starts out pending and settles exactly once, either with the
/// task's return value or with the [`TaskError`] describing its failure.
/// Dropping the handle does not cancel the task; the task still runs and
/// its result is simply discarded.
pub struct TaskFuture<T> {
    state: Arc<FutureState<T>>,
}

impl<T> TaskFuture<T> {
    pub(crate) fn new() -> (Self, TaskCompleter<T>) {
        let state = Arc::new(FutureState::new());
        (
            TaskFuture {
                state: Arc::clone(&state),
            },
            TaskCompleter { state },
        )
    }

    /// Creates a future that is already settled with `outcome`.
    pub fn ready(outcome: Result<T, TaskError>) -> Self {
        let state = FutureState::new();
        *state.outcome.lock().unwrap() = Some(outcome);
        TaskFuture {
            state: Arc::new(state),
        }
    }

    /// Blocks until the task has settled, without consuming the result.
    pub fn wait(&self) {
        self.state.wait();
    }

    /// Blocks until the task has settled and returns its result.
    ///
    /// Consumes the future, so the result can be retrieved at most once.
    pub fn get(self) -> Result<T, TaskError> {
        self.state.take()
    }
}

/// Write end of a [`TaskFuture`], held by the queued task.
pub(crate) struct TaskCompleter<T> {
    state: Arc<FutureState<T>>,
}

impl<T> TaskCompleter<T> {
    pub(crate) fn complete(self, outcome: Result<T, TaskError>) {
        self.state.complete(outcome);
    }
}

/// Ordered collection of [`TaskFuture`]s treated as one unit.
///
/// Futures keep the order in which they were stored, regardless of the
/// order in which the underlying tasks finish.
pub struct MultiFuture<T> {
    futures: Vec<TaskFuture<T>>,
}

impl<T> MultiFuture<T> {
    pub fn new() -> Self {
        MultiFuture {
            futures: Vec::new(),
        }
    }

    /// Appends a future at the end of the stored order.
    pub fn push(&mut self, future: TaskFuture<T>) {
        self.futures.push(future);
    }

    pub fn len(&self) -> usize {
        self.futures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.futures.is_empty()
    }

    /// Blocks until every stored future has settled.
    pub fn wait(&self) {
        for future in &self.futures {
            future.wait();
        }
    }

    /// Blocks until every stored future has settled, then returns the
    /// values in storage order, or the first failure in storage order.
    pub fn get(self) -> Result<Vec<T>, TaskError> {
        self.wait();
        self.futures.into_iter().map(TaskFuture::get).collect()
    }
}

impl<T> Default for MultiFuture<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T> FromIterator<TaskFuture<T>> for MultiFuture<T> {
    fn from_iter<I: IntoIterator<Item = TaskFuture<T>>>(iter: I) -> Self {
        MultiFuture {
            futures: iter.into_iter().collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::thread;
    use std::time::Duration;

    #[test]
    fn ready_future_returns_value() {
        let future = TaskFuture::ready(Ok(42));
        assert_eq!(future.get().unwrap(), 42);
    }

    #[test]
    fn wait_blocks_until_completed() {
        let (future, completer) = TaskFuture::new();
        let handle = thread::spawn(move || {
            thread::sleep(Duration::from_millis(50));
            completer.complete(Ok(7));
        });
        future.wait();
        assert_eq!(future.get().unwrap(), 7);
        handle.join().unwrap();
    }

    #[test]
    fn error_message_from_str_payload() {
        let err = TaskError::from_payload(Box::new("Division by zero!"));
        assert_eq!(err.message(), "Division by zero!");
    }

    #[test]
    fn error_message_from_string_payload() {
        let err = TaskError::from_payload(Box::new(String::from("boom")));
        assert_eq!(err.message(), "boom");
        assert_eq!(err.to_string(), "boom");
    }

    #[test]
    fn error_message_from_other_payload() {
        let err = TaskError::from_payload(Box::new(123_i32));
        assert_eq!(err.message(), "task panicked with a non-string payload");
        assert!(err.into_payload().downcast_ref::<i32>().is_some());
    }

    #[test]
    fn empty_multi_future_settles_immediately() {
        let multi: MultiFuture<i32> = MultiFuture::new();
        assert!(multi.is_empty());
        multi.wait();
        assert_eq!(multi.get().unwrap(), Vec::<i32>::new());
    }

    #[test]
    fn multi_future_preserves_storage_order() {
        let mut multi = MultiFuture::new();
        let mut completers = Vec::new();
        for _ in 0..5 {
            let (future, completer) = TaskFuture::new();
            multi.push(future);
            completers.push(completer);
        }
        // Settle in reverse order; values must still come back in storage order.
        for (i, completer) in completers.into_iter().enumerate().rev() {
            completer.complete(Ok(i * 10));
        }
        assert_eq!(multi.get().unwrap(), vec![0, 10, 20, 30, 40]);
    }

    #[test]
    fn multi_future_reports_first_stored_failure() {
        let mut multi = MultiFuture::new();
        multi.push(TaskFuture::ready(Ok(1)));
        multi.push(TaskFuture::ready(Err(TaskError::from_payload(Box::new(
            "first failure",
        )))));
        multi.push(TaskFuture::ready(Err(TaskError::from_payload(Box::new(
            "second failure",
        )))));
        let err = multi.get().unwrap_err();
        assert_eq!(err.message(), "first failure");
    }
}
