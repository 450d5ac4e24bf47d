//! Synchronized output and a simple stopwatch.

use std::fmt;
use std::io::{self, Write};
use std::sync::Mutex;
use std::time::Instant;

/// Writer wrapper that serializes whole print calls across threads.
///
/// Each call to [`print`](Self::print) or [`println`](Self::println)
/// renders all of its arguments and writes them as one unit while holding
/// an internal lock, so output from concurrent threads never interleaves
/// within a call. Two `SyncedStream`s wrapping the same underlying device
/// do not synchronize with each other; share one instance instead.
///
/// The [`sync_print!`](crate::sync_print) and
/// [`sync_println!`](crate::sync_println) macros provide the familiar
/// format-string interface on top of these methods.
pub struct SyncedStream<W: Write> {
    inner: Mutex<W>,
}

impl SyncedStream<io::Stdout> {
    /// Synchronized stream over standard output.
    pub fn stdout() -> Self {
        Self::new(io::stdout())
    }
}

impl<W: Write> SyncedStream<W> {
    pub fn new(writer: W) -> Self {
        SyncedStream {
            inner: Mutex::new(writer),
        }
    }

    /// Writes the formatted arguments as one atomic unit.
    pub fn print(&self, args: fmt::Arguments<'_>) -> io::Result<()> {
        let mut writer = self.inner.lock().unwrap();
        writer.write_fmt(args)?;
        writer.flush()
    }

    /// Writes the formatted arguments and a trailing newline as one atomic
    /// unit.
    pub fn println(&self, args: fmt::Arguments<'_>) -> io::Result<()> {
        let mut writer = self.inner.lock().unwrap();
        writer.write_fmt(args)?;
        writer.write_all(b"\n")?;
        writer.flush()
    }

    /// Returns the underlying writer.
    pub fn into_inner(self) -> W {
        self.inner.into_inner().unwrap()
    }
}

/// Prints through a [`SyncedStream`] with `format!` syntax.
#[macro_export]
macro_rules! sync_print {
    ($stream:expr, $($arg:tt)*) => {
        $stream.print(::std::format_args!($($arg)*))
    };
}

/// Prints a line through a [`SyncedStream`] with `format!` syntax.
#[macro_export]
macro_rules! sync_println {
    ($stream:expr) => {
        $stream.println(::std::format_args!(""))
    };
    ($stream:expr, $($arg:tt)*) => {
        $stream.println(::std::format_args!($($arg)*))
    };
}

/// Stopwatch measuring elapsed wall-clock time on a monotonic clock.
///
/// # Examples
///
/// ```
/// use taskwell::Stopwatch;
///
/// let mut watch = Stopwatch::new();
/// watch.start();
/// let total: u64 = (0..1000).sum();
/// watch.stop();
/// assert!(total > 0 && watch.ms() >= 0.0);
/// ```
#[derive(Debug, Default)]
pub struct Stopwatch {
    started: Option<Instant>,
    stopped: Option<Instant>,
}

impl Stopwatch {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records the starting time and clears any previous stop mark.
    pub fn start(&mut self) {
        self.started = Some(Instant::now());
        self.stopped = None;
    }

    /// Records the stopping time.
    ///
    /// # Panics
    ///
    /// Panics if the stopwatch was never started.
    pub fn stop(&mut self) {
        assert!(self.started.is_some(), "stopwatch stopped before start");
        self.stopped = Some(Instant::now());
    }

    /// Milliseconds elapsed between the last start and stop. Never
    /// negative, since the clock is monotonic.
    ///
    /// # Panics
    ///
    /// Panics if the stopwatch has not been started and stopped.
    pub fn ms(&self) -> f64 {
        let started = self.started.expect("stopwatch read before start");
        let stopped = self.stopped.expect("stopwatch read before stop");
        stopped.duration_since(started).as_secs_f64() * 1e3
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::thread;
    use std::time::Duration;

    #[test]
    fn print_renders_arguments_in_order() {
        let stream = SyncedStream::new(Vec::new());
        sync_print!(stream, "{} + {} = {}", 19, 23, 19 + 23).unwrap();
        sync_println!(stream, "!").unwrap();
        let written = stream.into_inner();
        assert_eq!(String::from_utf8(written).unwrap(), "19 + 23 = 42!\n");
    }

    #[test]
    fn stopwatch_measures_sleep() {
        let mut watch = Stopwatch::new();
        watch.start();
        thread::sleep(Duration::from_millis(100));
        watch.stop();
        let elapsed = watch.ms();
        assert!(elapsed >= 100.0, "measured {elapsed} ms");
        assert!(elapsed < 1000.0, "measured {elapsed} ms");
    }

    #[test]
    fn stopwatch_restarts_cleanly() {
        let mut watch = Stopwatch::new();
        watch.start();
        thread::sleep(Duration::from_millis(10));
        watch.stop();
        let first = watch.ms();
        watch.start();
        thread::sleep(Duration::from_millis(10));
        watch.stop();
        let second = watch.ms();
        assert!(first >= 0.0 && second >= 0.0);
    }

    #[test]
    #[should_panic(expected = "read before start")]
    fn stopwatch_read_before_start_panics() {
        let watch = Stopwatch::new();
        let _ = watch.ms();
    }

    #[test]
    #[should_panic(expected = "read before stop")]
    fn stopwatch_read_before_stop_panics() {
        let mut watch = Stopwatch::new();
        watch.start();
        let _ = watch.ms();
    }
}
