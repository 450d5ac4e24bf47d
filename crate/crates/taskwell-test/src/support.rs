//! Small synchronization helpers used by the checks and benchmarks.

use std::cell::UnsafeCell;
use std::panic;
use std::sync::{Condvar, Mutex, Once};
use std::thread;
use std::time::Duration;

/// One-shot gate: tasks block on [`wait`](Self::wait) until somebody calls
/// [`open`](Self::open). Used to hold tasks at a known point so task counts
/// can be observed deterministically.
pub struct Gate {
    opened: Mutex<bool>,
    signal: Condvar,
}

impl Gate {
    pub fn new() -> Self {
        Gate {
            opened: Mutex::new(false),
            signal: Condvar::new(),
        }
    }

    pub fn open(&self) {
        let mut opened = self.opened.lock().unwrap();
        *opened = true;
        drop(opened);
        self.signal.notify_all();
    }

    pub fn wait(&self) {
        let mut opened = self.opened.lock().unwrap();
        while !*opened {
            opened = self.signal.wait(opened).unwrap();
        }
    }
}

impl Default for Gate {
    fn default() -> Self {
        Self::new()
    }
}

/// Countdown latch: [`wait_timeout`](Self::wait_timeout) returns true once
/// [`count_down`](Self::count_down) has been called the configured number
/// of times.
pub struct Latch {
    remaining: Mutex<usize>,
    signal: Condvar,
}

impl Latch {
    pub fn new(count: usize) -> Self {
        Latch {
            remaining: Mutex::new(count),
            signal: Condvar::new(),
        }
    }

    pub fn count_down(&self) {
        let mut remaining = self.remaining.lock().unwrap();
        assert!(*remaining > 0, "latch counted down too many times");
        *remaining -= 1;
        if *remaining == 0 {
            drop(remaining);
            self.signal.notify_all();
        }
    }

    #[must_use]
    pub fn wait_timeout(&self, timeout: Duration) -> bool {
        let remaining = self.remaining.lock().unwrap();
        let (remaining, result) = self
            .signal
            .wait_timeout_while(remaining, timeout, |remaining| *remaining > 0)
            .unwrap();
        drop(remaining);
        !result.timed_out()
    }
}

/// Fixed-size array of slots written concurrently by loop tasks.
///
/// The loop contract hands each task a disjoint index block, so distinct
/// tasks never touch the same slot. That disjointness is exactly the
/// invariant callers of [`slot_mut`](Self::slot_mut) must uphold.
pub struct SlotArena<T> {
    slots: Box<[UnsafeCell<T>]>,
}

unsafe impl<T: Send> Sync for SlotArena<T> {}

impl<T> SlotArena<T> {
    pub fn from_vec(values: Vec<T>) -> Self {
        SlotArena {
            slots: values
                .into_iter()
                .map(UnsafeCell::new)
                .collect::<Vec<_>>()
                .into_boxed_slice(),
        }
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// Mutable access to one slot through a shared reference.
    ///
    /// # Safety
    ///
    /// No two threads may access the same index at the same time, and the
    /// caller must not hold two references to the same slot.
    #[allow(clippy::mut_from_ref)]
    pub unsafe fn slot_mut(&self, index: usize) -> &mut T {
        &mut *self.slots[index].get()
    }

    pub fn into_vec(self) -> Vec<T> {
        self.slots
            .into_vec()
            .into_iter()
            .map(UnsafeCell::into_inner)
            .collect()
    }
}

/// Suppresses the default panic message for panics inside pool workers, so
/// checks that fail tasks on purpose do not spam stderr. Panics on any
/// other thread still print normally.
pub fn install_quiet_worker_panics() {
    static INSTALL: Once = Once::new();
    INSTALL.call_once(|| {
        let default_hook = panic::take_hook();
        panic::set_hook(Box::new(move |info| {
            let in_worker = thread::current()
                .name()
                .is_some_and(|name| name.starts_with("taskwell-worker"));
            if !in_worker {
                default_hook(info);
            }
        }));
    });
}
