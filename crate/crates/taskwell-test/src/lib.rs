//! Test and benchmark harness for the `taskwell` thread pool.
//!
//! The harness runs a suite of automated checks covering construction,
//! resets, task submission, futures, loop parallelization, monitoring,
//! pausing, and failure handling, followed by a calibrated benchmark that
//! measures the speedup of parallel vector generation over a
//! single-threaded baseline. All output is mirrored to a timestamped log
//! file.

pub mod bench;
pub mod checks;
pub mod config;
pub mod logger;
pub mod rng;
pub mod support;

use std::io::Write;
use std::sync::Arc;

use chrono::Local;

pub use bench::{run_benchmark, BenchRecord, BenchmarkReport};
pub use checks::{run_automated_tests, TestSummary};
pub use config::HarnessConfig;
pub use logger::{create_log_file, log_file_name, BufferSink, Logger, TeeWriter};

/// Runs the harness against `console`, returning the process exit code:
/// 0 when every executed check passed, 1 otherwise.
pub fn run(config: &HarnessConfig, console: Box<dyn Write + Send>) -> i32 {
    let started = Local::now();
    let log_file = match create_log_file(&config.log_dir, &started) {
        Ok((file, path)) => Some((file, path)),
        Err(error) => {
            let _ = writeln!(
                std::io::stderr(),
                "Warning: could not create a log file in {:?}: {error}. Continuing without one.",
                config.log_dir
            );
            None
        }
    };
    let (file, log_path) = match log_file {
        Some((file, path)) => (Some(file), Some(path)),
        None => (None, None),
    };
    let log = Arc::new(Logger::new(console, file));

    logln!(log, "taskwell test harness");
    logln!(log, "Thread pool library version is {}.", taskwell::VERSION);
    logln!(
        log,
        "Hardware concurrency is {}.",
        taskwell::hardware_concurrency()
    );
    if let Some(path) = &log_path {
        logln!(log, "Generating log file: {}.", path.display());
    }
    logln!(
        log,
        "Configuration: {} threads, {} repeats, {} ms benchmark target, \
         {}-element vectors, seed {}.",
        config.effective_threads(),
        config.repeats,
        config.target_ms,
        config.vector_len,
        config.seed
    );
    logln!(
        log,
        "Note: for accurate timing, run on an otherwise idle machine."
    );

    let summary = if config.only_benchmark {
        TestSummary {
            passed: 0,
            failed: 0,
        }
    } else {
        run_automated_tests(config, &log)
    };

    if !config.skip_benchmark && !config.only_benchmark && summary.failed > 0 {
        logln!(log);
        logln!(log, "Skipping the benchmark because some checks failed.");
    } else if !config.skip_benchmark {
        run_benchmark(config, &log);
    }

    if summary.failed == 0 {
        0
    } else {
        1
    }
}
