//! The automated check suite for the thread pool.

use std::collections::HashSet;
use std::sync::atomic::{AtomicBool, AtomicI64, AtomicU32, Ordering};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use taskwell::{MultiFuture, TaskCounts, ThreadPool};

use crate::config::HarnessConfig;
use crate::logger::Logger;
use crate::logln;
use crate::rng::SplitMix64;
use crate::support::{Gate, Latch, SlotArena};

/// Upper bound on any internal wait; reaching it fails the check instead
/// of hanging the run.
const WAIT_LIMIT: Duration = Duration::from_secs(30);

/// Outcome of a full run of the check suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TestSummary {
    pub passed: usize,
    pub failed: usize,
}

impl TestSummary {
    pub fn total(&self) -> usize {
        self.passed + self.failed
    }

    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

struct Suite<'a> {
    log: &'a Arc<Logger>,
    passed: usize,
    failed: usize,
}

impl<'a> Suite<'a> {
    fn new(log: &'a Arc<Logger>) -> Self {
        Suite {
            log,
            passed: 0,
            failed: 0,
        }
    }

    fn section(&self, title: &str) {
        let rule = "=".repeat(title.chars().count());
        logln!(self.log);
        logln!(self.log, "{rule}");
        logln!(self.log, "{title}");
        logln!(self.log, "{rule}");
    }

    fn check(&mut self, condition: bool, description: &str) {
        logln!(self.log, "{description}...");
        if condition {
            self.passed += 1;
            logln!(self.log, "-> PASSED!");
        } else {
            self.failed += 1;
            logln!(self.log, "-> FAILED!");
        }
    }

    fn summary(&self) -> TestSummary {
        TestSummary {
            passed: self.passed,
            failed: self.failed,
        }
    }
}

/// Runs every check against one pool and returns the pass/fail counts,
/// printing one result line per check and a closing banner.
pub fn run_automated_tests(config: &HarnessConfig, log: &Arc<Logger>) -> TestSummary {
    let base_threads = config.effective_threads();
    let mut rng = SplitMix64::new(config.seed);
    let mut suite = Suite::new(log);
    let pool = ThreadPool::with_threads(base_threads);

    check_constructor(&mut suite, &pool, base_threads);
    check_reset(&mut suite, &pool, config, base_threads);
    check_push_task(&mut suite, &pool);
    check_submit(&mut suite, &pool);
    check_wait_for_tasks(&mut suite, &pool);
    check_parallelize_loop(&mut suite, &pool, &mut rng);
    check_monitoring(&mut suite, &pool, log, base_threads);
    check_pausing(&mut suite, &pool, log, base_threads);
    check_failure_handling(&mut suite, &pool, log);
    check_vector_addition(&mut suite, &pool, &mut rng);

    let summary = suite.summary();
    let verdict = if summary.all_passed() {
        format!("SUCCESS: Passed all {} checks!", summary.total())
    } else {
        format!(
            "FAILURE: Passed {} out of {} checks!",
            summary.passed,
            summary.total()
        )
    };
    let rule = "+".repeat(verdict.chars().count());
    logln!(log);
    logln!(log, "{rule}");
    logln!(log, "{verdict}");
    logln!(log, "{rule}");
    summary
}

/// Runs one task per worker, holding all of them at a gate, and counts the
/// distinct thread ids that picked the tasks up. Returns `None` when some
/// worker never arrived.
fn count_distinct_workers(pool: &ThreadPool) -> Option<usize> {
    let worker_count = pool.thread_count();
    let ids = Arc::new(Mutex::new(HashSet::new()));
    let arrived = Arc::new(Latch::new(worker_count));
    let release = Arc::new(Gate::new());
    let mut futures = MultiFuture::new();
    for _ in 0..worker_count {
        let ids = Arc::clone(&ids);
        let arrived = Arc::clone(&arrived);
        let release = Arc::clone(&release);
        futures.push(pool.submit(move || {
            ids.lock().unwrap().insert(thread::current().id());
            arrived.count_down();
            release.wait();
        }));
    }
    let complete = arrived.wait_timeout(WAIT_LIMIT);
    release.open();
    futures.wait();
    if !complete {
        return None;
    }
    let count = ids.lock().unwrap().len();
    Some(count)
}

fn check_constructor(suite: &mut Suite, pool: &ThreadPool, expected_threads: usize) {
    suite.section("Checking the constructor:");
    suite.check(
        pool.thread_count() == expected_threads,
        &format!("Checking that the pool reports {expected_threads} threads"),
    );
    suite.check(
        count_distinct_workers(pool) == Some(expected_threads),
        "Checking that the number of distinct worker thread ids matches the thread count",
    );
}

fn check_reset(suite: &mut Suite, pool: &ThreadPool, config: &HarnessConfig, base: usize) {
    suite.section("Checking reset():");
    let half = (base / 2).max(1);
    pool.reset(half);
    suite.check(
        pool.thread_count() == half,
        &format!("Checking that the pool reports {half} threads after reset({half})"),
    );
    suite.check(
        count_distinct_workers(pool) == Some(half),
        "Checking that the distinct worker thread ids match the new thread count",
    );
    if config.threads.is_none() {
        pool.reset(None);
    } else {
        pool.reset(base);
    }
    suite.check(
        pool.thread_count() == base,
        &format!("Checking that the pool reports {base} threads after resetting back"),
    );
    suite.check(
        count_distinct_workers(pool) == Some(base),
        "Checking that the distinct worker thread ids match after resetting back",
    );
}

fn set_flag(flag: &AtomicBool) {
    flag.store(true, Ordering::SeqCst);
}

fn set_flags(first: &AtomicBool, second: &AtomicBool) {
    first.store(true, Ordering::SeqCst);
    second.store(true, Ordering::SeqCst);
}

fn double(x: i64) -> i64 {
    x * 2
}

fn multiply(a: i64, b: i64) -> i64 {
    a * b
}

fn inverse(x: f64) -> f64 {
    if x == 0.0 {
        panic!("Division by zero!");
    }
    1.0 / x
}

fn check_push_task(suite: &mut Suite, pool: &ThreadPool) {
    suite.section("Checking push_task():");

    let flag = Arc::new(AtomicBool::new(false));
    {
        let flag = Arc::clone(&flag);
        pool.push_task(move || set_flag(&flag));
    }
    pool.wait_for_tasks();
    suite.check(
        flag.load(Ordering::SeqCst),
        "Checking that push_task() runs a task calling a function with no arguments",
    );

    let flag = Arc::new(AtomicBool::new(false));
    {
        let flag = Arc::clone(&flag);
        pool.push_task(move || set_flag(&flag));
    }
    pool.wait_for_tasks();
    suite.check(
        flag.load(Ordering::SeqCst),
        "Checking that push_task() runs a task calling a function with one argument",
    );

    let first = Arc::new(AtomicBool::new(false));
    let second = Arc::new(AtomicBool::new(false));
    {
        let first = Arc::clone(&first);
        let second = Arc::clone(&second);
        pool.push_task(move || set_flags(&first, &second));
    }
    pool.wait_for_tasks();
    suite.check(
        first.load(Ordering::SeqCst) && second.load(Ordering::SeqCst),
        "Checking that push_task() runs a task calling a function with two arguments",
    );
}

fn check_submit(suite: &mut Suite, pool: &ThreadPool) {
    suite.section("Checking submit():");

    let flag = Arc::new(AtomicBool::new(false));
    let future = {
        let flag = Arc::clone(&flag);
        pool.submit(move || flag.store(true, Ordering::SeqCst))
    };
    let completed = future.get().is_ok();
    suite.check(
        completed && flag.load(Ordering::SeqCst),
        "Checking that submit() works for a function with no arguments and no return value",
    );

    let flag = Arc::new(AtomicBool::new(false));
    let future = {
        let flag = Arc::clone(&flag);
        pool.submit(move || set_flag(&flag))
    };
    let completed = future.get().is_ok();
    suite.check(
        completed && flag.load(Ordering::SeqCst),
        "Checking that submit() works for a function with one argument and no return value",
    );

    let first = Arc::new(AtomicBool::new(false));
    let second = Arc::new(AtomicBool::new(false));
    let future = {
        let first = Arc::clone(&first);
        let second = Arc::clone(&second);
        pool.submit(move || set_flags(&first, &second))
    };
    let completed = future.get().is_ok();
    suite.check(
        completed && first.load(Ordering::SeqCst) && second.load(Ordering::SeqCst),
        "Checking that submit() works for a function with two arguments and no return value",
    );

    let future = pool.submit(|| 42);
    suite.check(
        future.get().ok() == Some(42),
        "Checking that submit() works for a function with no arguments and a return value",
    );

    let future = pool.submit(|| double(21));
    suite.check(
        future.get().ok() == Some(42),
        "Checking that submit() works for a function with one argument and a return value",
    );

    let future = pool.submit(|| multiply(6, 7));
    suite.check(
        future.get().ok() == Some(42),
        "Checking that submit() works for a function with two arguments and a return value",
    );
}

fn check_wait_for_tasks(suite: &mut Suite, pool: &ThreadPool) {
    suite.section("Checking wait_for_tasks():");
    let squares: Arc<Vec<AtomicI64>> = Arc::new((0..100).map(|_| AtomicI64::new(-1)).collect());
    for i in 0..100_i64 {
        let squares = Arc::clone(&squares);
        pool.push_task(move || squares[i as usize].store(i * i, Ordering::SeqCst));
    }
    pool.wait_for_tasks();
    let all_written = (0..100).all(|i| squares[i].load(Ordering::SeqCst) == (i * i) as i64);
    suite.check(
        all_written,
        "Checking that wait_for_tasks() returns only after all 100 queued tasks have run",
    );
}

fn check_parallelize_loop(suite: &mut Suite, pool: &ThreadPool, rng: &mut SplitMix64) {
    suite.section("Checking parallelize_loop():");

    for _ in 0..10 {
        let start = rng.range_i64(-1_000_000, 1_000_000);
        let end = rng.range_i64(-1_000_000, 1_000_000);
        let tasks = rng.range_usize(2, 24);
        let low = start.min(end);
        let length = (start - end).unsigned_abs() as usize;
        let touched: Arc<Vec<AtomicU32>> =
            Arc::new((0..length).map(|_| AtomicU32::new(0)).collect());
        {
            let touched = Arc::clone(&touched);
            pool.parallelize_loop_with(start, end, tasks, move |block_start, block_end| {
                for i in block_start..block_end {
                    touched[(i - low) as usize].fetch_add(1, Ordering::Relaxed);
                }
            })
            .wait();
        }
        let covered = touched.iter().all(|c| c.load(Ordering::Relaxed) == 1);
        suite.check(
            covered,
            &format!(
                "Verifying that a loop from {start} to {end} split into {tasks} tasks \
                 writes every index exactly once"
            ),
        );
    }

    for _ in 0..10 {
        let start = rng.range_i64(-1_000_000, 1_000_000);
        let end = rng.range_i64(-1_000_000, 1_000_000);
        let tasks = rng.range_usize(2, 24);
        let partial_sums = pool
            .parallelize_loop_with(start, end, tasks, |block_start, block_end| {
                (block_start..block_end).sum::<i64>()
            })
            .get();
        let total = partial_sums
            .map(|sums| sums.iter().map(|&s| s as i128).sum::<i128>())
            .unwrap_or(i128::MIN);
        let (low, high) = if start <= end { (start, end) } else { (end, start) };
        let count = high as i128 - low as i128;
        let expected = (low as i128 + high as i128 - 1) * count / 2;
        suite.check(
            total == expected,
            &format!(
                "Verifying that a loop from {start} to {end} split into {tasks} tasks \
                 sums every index correctly"
            ),
        );
    }
}

/// Tasks gated in groups: each task reports in at its group latch and then
/// blocks until the group's gate opens. Because a worker only dequeues its
/// next task after finishing the previous one, seeing a whole group arrive
/// proves the earlier group has completed, which makes the task counts at
/// each step exact rather than timing-dependent.
struct GatedBatch {
    arrived: Vec<Arc<Latch>>,
    release: Vec<Arc<Gate>>,
    group_size: usize,
}

impl GatedBatch {
    fn submit(
        pool: &ThreadPool,
        log: &Arc<Logger>,
        groups: usize,
        group_size: usize,
        announce: bool,
    ) -> Self {
        let arrived: Vec<Arc<Latch>> = (0..groups)
            .map(|_| Arc::new(Latch::new(group_size)))
            .collect();
        let release: Vec<Arc<Gate>> = (0..groups).map(|_| Arc::new(Gate::new())).collect();
        for index in 0..groups * group_size {
            let group = index / group_size;
            let arrived = Arc::clone(&arrived[group]);
            let release = Arc::clone(&release[group]);
            let log = announce.then(|| Arc::clone(log));
            pool.push_task(move || {
                arrived.count_down();
                release.wait();
                if let Some(log) = log {
                    logln!(log, "Task {index} done.");
                }
            });
        }
        GatedBatch {
            arrived,
            release,
            group_size,
        }
    }

    #[must_use]
    fn wait_arrived(&self, group: usize) -> bool {
        self.arrived[group].wait_timeout(WAIT_LIMIT)
    }

    fn release_group(&self, log: &Arc<Logger>, group: usize) {
        let first = group * self.group_size;
        let last = first + self.group_size - 1;
        logln!(log, "Releasing tasks {first} to {last}.");
        self.release[group].open();
    }

    fn release_all(&self) {
        for gate in &self.release {
            gate.open();
        }
    }
}

fn counts_line(counts: TaskCounts) -> String {
    format!(
        "{} tasks total, {} tasks running, {} tasks queued",
        counts.total, counts.running, counts.queued
    )
}

/// Prints the current counts and checks them against `expected`, given as
/// `(total, running, queued)`. `arrived` folds in whether the gated tasks
/// reached their checkpoints; a timeout fails the check rather than
/// hanging the suite.
fn expect_counts(
    suite: &mut Suite,
    pool: &ThreadPool,
    expected: (usize, usize, usize),
    arrived: bool,
    description: &str,
) {
    let (total, running, queued) = expected;
    let expected = TaskCounts {
        queued,
        running,
        total,
    };
    let actual = pool.task_counts();
    logln!(suite.log, "{}", counts_line(actual));
    suite.check(arrived && actual == expected, description);
}

fn check_monitoring(suite: &mut Suite, pool: &ThreadPool, log: &Arc<Logger>, base: usize) {
    suite.section("Checking task monitoring:");
    logln!(log, "Resetting the pool to 4 threads.");
    pool.reset(4);

    logln!(log, "Submitting 12 tasks gated in groups of 4.");
    let batch = GatedBatch::submit(pool, log, 3, 4, false);
    let arrived = batch.wait_arrived(0);
    expect_counts(
        suite,
        pool,
        (12, 4, 8),
        arrived,
        "Checking that the counts are 12 total, 4 running, 8 queued after submission",
    );

    batch.release_group(log, 0);
    let arrived = batch.wait_arrived(1);
    expect_counts(
        suite,
        pool,
        (8, 4, 4),
        arrived,
        "Checking that the counts are 8 total, 4 running, 4 queued after releasing 4 tasks",
    );

    batch.release_group(log, 1);
    let arrived = batch.wait_arrived(2);
    expect_counts(
        suite,
        pool,
        (4, 4, 0),
        arrived,
        "Checking that the counts are 4 total, 4 running, 0 queued after releasing 4 more",
    );

    batch.release_group(log, 2);
    pool.wait_for_tasks();
    expect_counts(
        suite,
        pool,
        (0, 0, 0),
        true,
        "Checking that the counts are 0 total, 0 running, 0 queued after the wait",
    );

    logln!(log, "Resetting the pool back to {base} threads.");
    pool.reset(base);
}

fn check_pausing(suite: &mut Suite, pool: &ThreadPool, log: &Arc<Logger>, base: usize) {
    suite.section("Checking pausing:");
    logln!(log, "Resetting the pool to 4 threads.");
    pool.reset(4);
    logln!(log, "Pausing the pool.");
    pool.set_paused(true);

    logln!(log, "Submitting 12 tasks gated in groups of 4.");
    let batch = GatedBatch::submit(pool, log, 3, 4, true);
    expect_counts(
        suite,
        pool,
        (12, 0, 12),
        true,
        "Checking that no task runs while the pool is paused",
    );

    logln!(log, "Waiting 300 ms to verify that nothing gets dequeued.");
    thread::sleep(Duration::from_millis(300));
    expect_counts(
        suite,
        pool,
        (12, 0, 12),
        true,
        "Checking that the counts are unchanged after the wait",
    );

    logln!(log, "Unpausing the pool.");
    pool.set_paused(false);
    let first_running = batch.wait_arrived(0);
    batch.release_group(log, 0);
    let arrived = batch.wait_arrived(1);
    expect_counts(
        suite,
        pool,
        (8, 4, 4),
        first_running && arrived,
        "Checking that the counts are 8 total, 4 running, 4 queued after 4 tasks finished",
    );

    logln!(log, "Pausing the pool again.");
    pool.set_paused(true);
    batch.release_group(log, 1);
    logln!(log, "Waiting for the running tasks to finish.");
    pool.wait_for_tasks();
    expect_counts(
        suite,
        pool,
        (4, 0, 4),
        true,
        "Checking that only the queued tasks remain after the paused wait",
    );

    logln!(log, "Waiting 200 ms to verify that the queued tasks stay queued.");
    thread::sleep(Duration::from_millis(200));
    expect_counts(
        suite,
        pool,
        (4, 0, 4),
        true,
        "Checking that the queued tasks were not dequeued while paused",
    );

    logln!(log, "Unpausing the pool.");
    pool.set_paused(false);
    let arrived = batch.wait_arrived(2);
    batch.release_group(log, 2);
    pool.wait_for_tasks();
    expect_counts(
        suite,
        pool,
        (0, 0, 0),
        arrived,
        "Checking that all tasks finished after the unpaused wait",
    );

    batch.release_all();
    logln!(log, "Resetting the pool back to {base} threads.");
    pool.reset(base);
}

fn check_failure_handling(suite: &mut Suite, pool: &ThreadPool, log: &Arc<Logger>) {
    suite.section("Checking failure handling:");
    logln!(log, "Submitting a task that divides by zero.");
    let future = pool.submit(|| inverse(0.0));
    let forwarded = match future.get() {
        Ok(value) => {
            logln!(log, "The task unexpectedly returned {value}.");
            false
        }
        Err(error) => {
            logln!(log, "Caught failure: {}", error.message());
            error.message() == "Division by zero!"
        }
    };
    suite.check(
        forwarded,
        "Checking that the failure was forwarded to the future",
    );
}

fn check_vector_addition(suite: &mut Suite, pool: &ThreadPool, rng: &mut SplitMix64) {
    suite.section("Checking parallelized vector addition:");
    for _ in 0..10 {
        let length = rng.range_usize(10_000, 1_000_000);
        let tasks = rng.range_usize(2, 24);
        let mut first = Vec::with_capacity(length);
        let mut second = Vec::with_capacity(length);
        for _ in 0..length {
            first.push(rng.range_i64(-1_000_000, 1_000_000));
            second.push(rng.range_i64(-1_000_000, 1_000_000));
        }
        let expected: Vec<i64> = first
            .iter()
            .zip(&second)
            .map(|(&a, &b)| a + b)
            .collect();

        let first = Arc::new(first);
        let second = Arc::new(second);
        let sums = Arc::new(SlotArena::from_vec(vec![0_i64; length]));
        {
            let sums = Arc::clone(&sums);
            pool.parallelize_loop_with(0, length as i64, tasks, move |block_start, block_end| {
                for i in block_start..block_end {
                    let i = i as usize;
                    unsafe {
                        *sums.slot_mut(i) = first[i] + second[i];
                    }
                }
            })
            .wait();
        }
        let sums = Arc::try_unwrap(sums)
            .unwrap_or_else(|_| panic!("loop tasks still hold the result"))
            .into_vec();
        suite.check(
            sums == expected,
            &format!(
                "Checking that two vectors with {length} elements are added correctly \
                 using {tasks} tasks"
            ),
        );
    }
}
