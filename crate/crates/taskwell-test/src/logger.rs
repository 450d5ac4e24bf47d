//! Run output: console printing mirrored into a timestamped log file.

use std::fmt;
use std::fs::{self, File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use chrono::{DateTime, Local};
use taskwell::SyncedStream;

/// Writer that duplicates everything to a console writer and, when present,
/// a log file. A file that starts failing is dropped with a note on stderr
/// so the run itself keeps going.
pub struct TeeWriter {
    console: Box<dyn Write + Send>,
    file: Option<File>,
}

impl TeeWriter {
    pub fn new(console: Box<dyn Write + Send>, file: Option<File>) -> Self {
        TeeWriter { console, file }
    }
}

impl Write for TeeWriter {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        self.console.write_all(buf)?;
        if let Some(file) = self.file.as_mut() {
            if let Err(error) = file.write_all(buf) {
                eprintln!("Warning: writing to the log file failed ({error}); the log file will be incomplete.");
                self.file = None;
            }
        }
        Ok(buf.len())
    }

    fn flush(&mut self) -> io::Result<()> {
        self.console.flush()?;
        if let Some(file) = self.file.as_mut() {
            let _ = file.flush();
        }
        Ok(())
    }
}

/// Synchronized logger used for every line the harness prints.
///
/// Routing all output through one `Logger` keeps concurrent lines intact
/// and makes the log file a byte-for-byte mirror of the console.
pub struct Logger {
    stream: SyncedStream<TeeWriter>,
}

impl Logger {
    pub fn new(console: Box<dyn Write + Send>, file: Option<File>) -> Self {
        Logger {
            stream: SyncedStream::new(TeeWriter::new(console, file)),
        }
    }

    /// Logger writing to standard output and, if possible, a log file.
    pub fn to_stdout(file: Option<File>) -> Self {
        Self::new(Box::new(io::stdout()), file)
    }

    /// Logger writing into an in-memory buffer, for tests.
    pub fn to_buffer() -> (Self, BufferSink) {
        let sink = BufferSink::new();
        (Self::new(Box::new(sink.clone()), None), sink)
    }

    pub fn print(&self, args: fmt::Arguments<'_>) {
        let _ = self.stream.print(args);
    }

    pub fn println(&self, args: fmt::Arguments<'_>) {
        let _ = self.stream.println(args);
    }
}

/// Prints a line through a [`Logger`] with `format!` syntax.
#[macro_export]
macro_rules! logln {
    ($logger:expr) => {
        $logger.println(::std::format_args!(""))
    };
    ($logger:expr, $($arg:tt)*) => {
        $logger.println(::std::format_args!($($arg)*))
    };
}

/// Shared in-memory writer that hands its contents back as a string.
#[derive(Clone)]
pub struct BufferSink {
    buffer: Arc<Mutex<Vec<u8>>>,
}

impl BufferSink {
    pub fn new() -> Self {
        BufferSink {
            buffer: Arc::new(Mutex::new(Vec::new())),
        }
    }

    pub fn contents(&self) -> String {
        String::from_utf8(self.buffer.lock().unwrap().clone()).expect("log output was not UTF-8")
    }
}

impl Default for BufferSink {
    fn default() -> Self {
        Self::new()
    }
}

impl Write for BufferSink {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        self.buffer.lock().unwrap().extend_from_slice(buf);
        Ok(buf.len())
    }

    fn flush(&mut self) -> io::Result<()> {
        Ok(())
    }
}

/// Name of the log file for a run started at `moment`.
pub fn log_file_name(moment: &DateTime<Local>) -> String {
    format!("taskwell_test-{}.log", moment.format("%Y-%m-%d_%H.%M.%S"))
}

/// Creates the log file in `directory`, creating the directory if needed.
///
/// If a file for the same timestamp already exists, a numeric suffix (-1,
/// -2, ...) is appended until a fresh name is found, so an earlier log is
/// never overwritten.
pub fn create_log_file(directory: &Path, moment: &DateTime<Local>) -> io::Result<(File, PathBuf)> {
    fs::create_dir_all(directory)?;
    let base_name = log_file_name(moment);
    let stem = base_name
        .strip_suffix(".log")
        .expect("log name ends in .log");
    let mut attempt = 0_u32;
    loop {
        let name = if attempt == 0 {
            base_name.clone()
        } else {
            format!("{stem}-{attempt}.log")
        };
        let path = directory.join(name);
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(file) => return Ok((file, path)),
            Err(error) if error.kind() == io::ErrorKind::AlreadyExists && attempt < 1000 => {
                attempt += 1;
            }
            Err(error) => return Err(error),
        }
    }
}
