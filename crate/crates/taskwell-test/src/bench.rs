//! Benchmark: timing vector generation single-threaded and with the pool.

use std::sync::Arc;

use taskwell::{Stopwatch, ThreadPool};

use crate::config::HarnessConfig;
use crate::logger::Logger;
use crate::logln;
use crate::rng::{stream_seed, SplitMix64};
use crate::support::SlotArena;

/// Smallest workload the calibration will return.
pub const MIN_VECTOR_COUNT: usize = 64;

/// Memory ceiling for the generated vectors, so calibration cannot balloon
/// on a very fast machine.
const MAX_WORKLOAD_BYTES: usize = 4 << 30;

/// Timing statistics for one benchmark configuration. A `task_count` of 0
/// is the single-threaded baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchRecord {
    pub task_count: usize,
    pub mean_ms: f64,
    pub stddev_ms: f64,
}

/// Everything one benchmark run measured.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkReport {
    pub thread_count: usize,
    pub repeats: usize,
    pub vector_count: usize,
    pub vector_len: usize,
    /// Baseline first, then one record per task count, ascending.
    pub records: Vec<BenchRecord>,
    pub best_task_count: usize,
    pub best_mean_ms: f64,
    /// Baseline mean divided by the best multithreaded mean.
    pub speedup: f64,
}

/// Arithmetic mean and population standard deviation of the samples.
pub fn mean_and_stddev(samples: &[f64]) -> (f64, f64) {
    assert!(!samples.is_empty(), "no samples to average");
    let count = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / count;
    let variance = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / count;
    (mean, variance.sqrt())
}

/// Task counts to benchmark for a pool of `threads` workers: a quarter,
/// half, one, two, and four times the thread count, clamped to at least 1,
/// without duplicates.
pub fn task_count_schedule(threads: usize) -> Vec<usize> {
    let mut schedule: Vec<usize> = [threads / 4, threads / 2, threads, threads * 2, threads * 4]
        .iter()
        .map(|&count| count.max(1))
        .collect();
    schedule.dedup();
    schedule
}

/// The record with the lowest multithreaded mean; ties go to the smaller
/// task count, which comes first in the schedule.
pub fn best_multithreaded(records: &[BenchRecord]) -> &BenchRecord {
    let mut best = &records[1];
    for record in &records[2..] {
        if record.mean_ms < best.mean_ms {
            best = record;
        }
    }
    best
}

/// Allocates `vector_count` zeroed vectors of `vector_len` elements.
pub fn build_arena(vector_count: usize, vector_len: usize) -> SlotArena<Vec<f64>> {
    SlotArena::from_vec(vec![vec![0.0; vector_len]; vector_count])
}

/// Fills the vectors with indices in `[start, end)` with random values.
///
/// Every vector gets its own generator stream derived from `(seed, index)`,
/// so the data depends only on the seed, not on which thread or task count
/// produced it.
pub fn fill_block(arena: &SlotArena<Vec<f64>>, start: i64, end: i64, seed: u64) {
    for index in start..end {
        // In-bounds and disjoint: each loop task owns its index block.
        let vector = unsafe { arena.slot_mut(index as usize) };
        let mut rng = SplitMix64::new(stream_seed(seed, index as u64));
        for slot in vector.iter_mut() {
            *slot = rng.next_f64();
        }
    }
}

fn measure_single_threaded(vector_count: usize, vector_len: usize, seed: u64) -> f64 {
    let arena = build_arena(vector_count, vector_len);
    let mut watch = Stopwatch::new();
    watch.start();
    fill_block(&arena, 0, vector_count as i64, seed);
    watch.stop();
    watch.ms()
}

/// Finds how many vectors a single thread fills in roughly `target_ms`.
///
/// Doubles the vector count from [`MIN_VECTOR_COUNT`] until one
/// single-threaded pass takes at least the target, then bisects between
/// the last two counts, stopping early once a measurement lands within
/// 10% above the target. The returned count always measured at or above
/// the target (unless the memory ceiling cut the search short) and is
/// never below [`MIN_VECTOR_COUNT`].
pub fn calibrate_vector_count(target_ms: f64, vector_len: usize, seed: u64) -> usize {
    let max_count = (MAX_WORKLOAD_BYTES / (vector_len * std::mem::size_of::<f64>()).max(1))
        .max(MIN_VECTOR_COUNT);
    let mut count = MIN_VECTOR_COUNT;
    let mut elapsed = measure_single_threaded(count, vector_len, seed);
    if elapsed >= target_ms {
        return MIN_VECTOR_COUNT;
    }
    while elapsed < target_ms {
        if count >= max_count {
            return max_count;
        }
        count = (count * 2).min(max_count);
        elapsed = measure_single_threaded(count, vector_len, seed);
    }

    // elapsed(high) reached the target, elapsed(low) did not.
    let mut low = count / 2;
    let mut high = count;
    while low + 1 < high {
        let mid = low + (high - low) / 2;
        let elapsed = measure_single_threaded(mid, vector_len, seed);
        if elapsed >= target_ms {
            high = mid;
            if elapsed <= target_ms * 1.1 {
                break;
            }
        } else {
            low = mid;
        }
    }
    high
}

/// Runs the full benchmark and prints the timing report.
pub fn run_benchmark(config: &HarnessConfig, log: &Arc<Logger>) -> BenchmarkReport {
    let threads = config.effective_threads();
    let title = "Performing benchmarks:";
    let rule = "=".repeat(title.chars().count());
    logln!(log);
    logln!(log, "{rule}");
    logln!(log, "{title}");
    logln!(log, "{rule}");
    logln!(log, "Using {threads} threads.");
    logln!(
        log,
        "Each test will be repeated {} times to collect reliable statistics.",
        config.repeats
    );

    logln!(
        log,
        "Calibrating the workload to roughly {} ms per single-threaded pass...",
        config.target_ms
    );
    let vector_count = calibrate_vector_count(config.target_ms, config.vector_len, config.seed);
    logln!(log);
    logln!(
        log,
        "Generating {vector_count} random vectors with {} elements each:",
        config.vector_len
    );

    let pool = ThreadPool::with_threads(threads);
    let arena = Arc::new(build_arena(vector_count, config.vector_len));
    let seed = config.seed;
    let mut watch = Stopwatch::new();
    let mut records = Vec::new();

    // Single-threaded baseline, with one untimed warm-up pass.
    fill_block(&arena, 0, vector_count as i64, seed);
    let mut samples = Vec::with_capacity(config.repeats);
    for _ in 0..config.repeats {
        watch.start();
        fill_block(&arena, 0, vector_count as i64, seed);
        watch.stop();
        samples.push(watch.ms());
    }
    let (mean_ms, stddev_ms) = mean_and_stddev(&samples);
    logln!(
        log,
        "Single-threaded, the mean execution time was {mean_ms:>6.1} ms \
         with standard deviation {stddev_ms:>5.1} ms."
    );
    records.push(BenchRecord {
        task_count: 0,
        mean_ms,
        stddev_ms,
    });

    for task_count in task_count_schedule(threads) {
        let body = {
            let arena = Arc::clone(&arena);
            move |start: i64, end: i64| fill_block(&arena, start, end, seed)
        };
        // Untimed warm-up pass for this configuration.
        pool.parallelize_loop_with(0, vector_count as i64, task_count, body.clone())
            .wait();
        let mut samples = Vec::with_capacity(config.repeats);
        for _ in 0..config.repeats {
            watch.start();
            pool.parallelize_loop_with(0, vector_count as i64, task_count, body.clone())
                .wait();
            watch.stop();
            samples.push(watch.ms());
        }
        let (mean_ms, stddev_ms) = mean_and_stddev(&samples);
        logln!(
            log,
            "With {task_count:>5} tasks, the mean execution time was {mean_ms:>6.1} ms \
             with standard deviation {stddev_ms:>5.1} ms."
        );
        records.push(BenchRecord {
            task_count,
            mean_ms,
            stddev_ms,
        });
    }

    let best = *best_multithreaded(&records);
    let speedup = records[0].mean_ms / best.mean_ms;
    logln!(log);
    logln!(
        log,
        "Best speedup obtained by multithreading vs. single-threading: {speedup:.1}x, \
         using {} tasks.",
        best.task_count
    );

    let closing = "Benchmarks completed!";
    let rule = "+".repeat(closing.chars().count());
    logln!(log);
    logln!(log, "{rule}");
    logln!(log, "{closing}");
    logln!(log, "{rule}");

    BenchmarkReport {
        thread_count: threads,
        repeats: config.repeats,
        vector_count,
        vector_len: config.vector_len,
        records,
        best_task_count: best.task_count,
        best_mean_ms: best.mean_ms,
        speedup,
    }
}
