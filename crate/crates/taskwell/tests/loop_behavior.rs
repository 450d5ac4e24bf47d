mod common;

use std::sync::atomic::{AtomicI64, AtomicU32, Ordering};
use std::sync::Arc;
use std::thread;
use std::time::Duration;

use common::silence_worker_panics;
use proptest::prelude::*;
use taskwell::{compute_blocks, BlockPartition, MultiFuture, ThreadPool};

/// Closed-form sum of the integers in `[start, end)`.
fn range_sum(start: i64, end: i64) -> i128 {
    let (low, high) = if start <= end { (start, end) } else { (end, start) };
    let count = high as i128 - low as i128;
    (low as i128 + high as i128 - 1) * count / 2
}

/// Checks every partition invariant against the normalized input range.
fn assert_partition_invariants(start: i64, end: i64, num_blocks: usize, partition: &BlockPartition) {
    let (low, high) = if start <= end { (start, end) } else { (end, start) };
    let total = (high as i128 - low as i128) as u64;
    let expected_count = (num_blocks.max(1) as u64).min(total);
    assert_eq!(partition.len() as u64, expected_count);

    if partition.is_empty() {
        assert_eq!(total, 0);
        return;
    }

    let blocks = partition.blocks();
    assert_eq!(blocks[0].start, low);
    assert_eq!(blocks[blocks.len() - 1].end, high);
    let base = blocks[0].len();
    for (i, block) in blocks.iter().enumerate() {
        assert!(!block.is_empty());
        if i + 1 < blocks.len() {
            assert_eq!(block.end, blocks[i + 1].start, "blocks must be contiguous");
            assert_eq!(block.len(), base, "only the last block may differ");
        } else {
            assert!(block.len() >= base, "last block absorbs the remainder");
        }
    }
}

proptest! {
    #[test]
    fn partition_invariants_hold(
        start in -2_000_000_i64..2_000_000,
        end in -2_000_000_i64..2_000_000,
        num_blocks in 1_usize..64,
    ) {
        let partition = compute_blocks(start, end, num_blocks);
        assert_partition_invariants(start, end, num_blocks, &partition);
    }

    #[test]
    fn partition_of_extreme_bounds_holds(
        start in proptest::num::i64::ANY,
        end in proptest::num::i64::ANY,
        num_blocks in 1_usize..64,
    ) {
        let partition = compute_blocks(start, end, num_blocks);
        assert_partition_invariants(start, end, num_blocks, &partition);
    }
}

#[test]
fn loop_touches_every_index_exactly_once() {
    let pool = ThreadPool::with_threads(4);
    for &(start, end, tasks) in &[(-613_i64, 4295_i64, 11_usize), (0, 1, 2), (100, -100, 3)] {
        let low = start.min(end);
        let len = (start - end).unsigned_abs() as usize;
        let touched: Arc<Vec<AtomicU32>> =
            Arc::new((0..len).map(|_| AtomicU32::new(0)).collect());
        let touched2 = Arc::clone(&touched);
        pool.parallelize_loop_with(start, end, tasks, move |block_start, block_end| {
            for i in block_start..block_end {
                touched2[(i - low) as usize].fetch_add(1, Ordering::Relaxed);
            }
        })
        .wait();
        for (i, counter) in touched.iter().enumerate() {
            assert_eq!(
                counter.load(Ordering::Relaxed),
                1,
                "index {i} of range [{start}, {end}) with {tasks} tasks"
            );
        }
    }
}

#[test]
fn loop_partial_sums_match_closed_form() {
    let pool = ThreadPool::with_threads(4);
    for &(start, end, tasks) in &[
        (1_i64, 101_i64, 4_usize),
        (-5000, 12000, 7),
        (831_772, -444_777, 19),
    ] {
        let partial_sums = pool
            .parallelize_loop_with(start, end, tasks, |block_start, block_end| {
                (block_start..block_end).map(|i| i as i128).sum::<i128>()
            })
            .get()
            .unwrap();
        let total: i128 = partial_sums.iter().sum();
        assert_eq!(total, range_sum(start, end));
    }
}

#[test]
fn loop_sum_one_to_hundred() {
    let pool = ThreadPool::with_threads(4);
    let partial_sums = pool
        .parallelize_loop(1, 101, |block_start, block_end| {
            (block_start..block_end).sum::<i64>()
        })
        .get()
        .unwrap();
    assert_eq!(partial_sums.iter().sum::<i64>(), 5050);
}

#[test]
fn default_block_count_is_thread_count() {
    let pool = ThreadPool::with_threads(5);
    let futures = pool.parallelize_loop(0, 1000, |_, _| {});
    assert_eq!(futures.len(), 5);
    futures.wait();

    // Short ranges produce fewer blocks, never empty ones.
    let futures = pool.parallelize_loop(0, 3, |_, _| {});
    assert_eq!(futures.len(), 3);
    futures.wait();
}

#[test]
fn empty_range_queues_nothing() {
    let pool = ThreadPool::with_threads(2);
    let futures = pool.parallelize_loop_with(7, 7, 4, |_, _| 1);
    assert!(futures.is_empty());
    futures.wait();
    assert_eq!(futures.get().unwrap(), Vec::<i32>::new());
    assert_eq!(pool.tasks_total(), 0);
}

#[test]
fn squares_written_by_fire_and_forget_tasks() {
    let pool = ThreadPool::with_threads(4);
    let squares: Arc<Vec<AtomicI64>> = Arc::new((0..100).map(|_| AtomicI64::new(0)).collect());
    for i in 0..100_i64 {
        let squares = Arc::clone(&squares);
        pool.push_task(move || squares[i as usize].store(i * i, Ordering::Relaxed));
    }
    pool.wait_for_tasks();
    for i in 0..100 {
        assert_eq!(squares[i].load(Ordering::Relaxed), (i * i) as i64);
    }
    assert_eq!(squares[50].load(Ordering::Relaxed), 2500);
}

#[test]
fn multi_future_values_stay_in_storage_order() {
    let pool = ThreadPool::with_threads(4);
    let mut futures = MultiFuture::new();
    // Earlier tasks sleep longer, so completion order is inverted.
    for i in 0..8_u64 {
        futures.push(pool.submit(move || {
            thread::sleep(Duration::from_millis((8 - i) * 20));
            i * i
        }));
    }
    let values = futures.get().unwrap();
    assert_eq!(values, vec![0, 1, 4, 9, 16, 25, 36, 49]);
}

#[test]
fn multi_future_failure_is_first_in_storage_order() {
    silence_worker_panics();
    let pool = ThreadPool::with_threads(2);
    let mut futures = MultiFuture::new();
    futures.push(pool.submit(|| {
        thread::sleep(Duration::from_millis(100));
        panic!("first failure");
    }));
    futures.push(pool.submit(|| panic!("second failure")));
    let error = futures.get().unwrap_err();
    assert_eq!(error.message(), "first failure");
}

#[test]
fn two_batches_of_squares() {
    let pool = ThreadPool::with_threads(4);
    let mut batches = Vec::new();
    for batch in 0..2_i64 {
        let mut futures = MultiFuture::new();
        for i in 0..100_i64 {
            let value = batch * 100 + i;
            futures.push(pool.submit(move || value * value));
        }
        batches.push(futures);
    }
    for (batch, futures) in batches.into_iter().enumerate() {
        let values = futures.get().unwrap();
        for (i, value) in values.into_iter().enumerate() {
            let expected = (batch as i64 * 100 + i as i64).pow(2);
            assert_eq!(value, expected);
        }
    }
}
