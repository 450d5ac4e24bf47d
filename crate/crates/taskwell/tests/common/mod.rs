#![allow(dead_code)]

use std::panic;
use std::sync::{Condvar, Mutex, Once};
use std::thread;
use std::time::Duration;

/// One-shot gate: tasks block on `wait` until somebody calls `open`.
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

/// Countdown latch: `wait_timeout` returns true once `count_down` has been
/// called the configured number of times.
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

/// Suppresses the default panic message for panics inside pool workers, so
/// tests that panic on purpose do not spam stderr. Panics on any other
/// thread still print normally.
pub fn silence_worker_panics() {
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

pub fn inverse(x: f64) -> f64 {
    if x == 0.0 {
        panic!("Division by zero!");
    }
    1.0 / x
}
