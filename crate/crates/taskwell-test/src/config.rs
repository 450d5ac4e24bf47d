//! Command-line configuration for the harness.

use std::path::PathBuf;

use clap::Parser;
use taskwell::hardware_concurrency;

/// Automated checks and benchmarks for the taskwell thread pool.
///
/// The process exits with code 0 exactly when every check passed.
/// Benchmark results vary with the hardware; they are reported, never
/// failed.
#[derive(Parser, Debug, Clone)]
#[command(name = "taskwell-test", version = taskwell::VERSION)]
pub struct HarnessConfig {
    /// Worker threads for the pool under test (default: hardware concurrency)
    #[arg(long, value_parser = parse_threads)]
    pub threads: Option<usize>,

    /// Timing repetitions per benchmark configuration
    #[arg(long, default_value_t = 20, value_parser = parse_repeats)]
    pub repeats: usize,

    /// Target duration of one calibrated single-threaded pass, in milliseconds
    #[arg(long = "target-ms", default_value_t = 50.0, value_parser = parse_target_ms)]
    pub target_ms: f64,

    /// Elements per generated vector
    #[arg(long = "vector-len", default_value_t = 500, value_parser = parse_vector_len)]
    pub vector_len: usize,

    /// Seed for randomized checks and benchmark data
    #[arg(long, default_value_t = 42)]
    pub seed: u64,

    /// Directory for the log file (created if missing)
    #[arg(long = "log-dir", default_value = ".")]
    pub log_dir: PathBuf,

    /// Skip the benchmark phase
    #[arg(long, conflicts_with = "only_benchmark")]
    pub skip_benchmark: bool,

    /// Run only the benchmark phase, without the checks
    #[arg(long)]
    pub only_benchmark: bool,
}

impl HarnessConfig {
    /// The pool size under test: `--threads` if given, otherwise the
    /// hardware concurrency.
    pub fn effective_threads(&self) -> usize {
        self.threads.unwrap_or_else(hardware_concurrency)
    }
}

impl Default for HarnessConfig {
    fn default() -> Self {
        HarnessConfig {
            threads: None,
            repeats: 20,
            target_ms: 50.0,
            vector_len: 500,
            seed: 42,
            log_dir: PathBuf::from("."),
            skip_benchmark: false,
            only_benchmark: false,
        }
    }
}

fn parse_threads(value: &str) -> Result<usize, String> {
    let threads: usize = value.parse().map_err(|_| "expected a positive integer")?;
    if threads == 0 {
        return Err("at least 1 thread is required".into());
    }
    Ok(threads)
}

fn parse_repeats(value: &str) -> Result<usize, String> {
    let repeats: usize = value.parse().map_err(|_| "expected an integer")?;
    if repeats < 2 {
        return Err("at least 2 repeats are required for a standard deviation".into());
    }
    Ok(repeats)
}

fn parse_vector_len(value: &str) -> Result<usize, String> {
    let length: usize = value.parse().map_err(|_| "expected an integer")?;
    if length == 0 {
        return Err("vectors must have at least 1 element".into());
    }
    Ok(length)
}

fn parse_target_ms(value: &str) -> Result<f64, String> {
    let target: f64 = value.parse().map_err(|_| "expected a number")?;
    if !target.is_finite() || target <= 0.0 {
        return Err("the target must be a positive number of milliseconds".into());
    }
    Ok(target)
}
