//! Splitting an index range into contiguous blocks for loop parallelization.

/// Half-open index range `[start, end)` covered by one loop task.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockRange {
    pub start: i64,
    pub end: i64,
}

impl BlockRange {
    /// Number of indices in the block.
    pub fn len(&self) -> u64 {
        (self.end as i128 - self.start as i128) as u64
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

/// Result of splitting a range with [`compute_blocks`]: zero or more
/// contiguous, non-empty blocks that exactly cover the input range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPartition {
    blocks: Vec<BlockRange>,
    requested_blocks: usize,
}

impl BlockPartition {
    pub fn blocks(&self) -> &[BlockRange] {
        &self.blocks
    }

    /// Number of blocks actually produced.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// The block count that was asked for, before capping.
    pub fn requested_blocks(&self) -> usize {
        self.requested_blocks
    }

    pub fn iter(&self) -> std::slice::Iter<'_, BlockRange> {
        self.blocks.iter()
    }
}

impl<'a> IntoIterator for &'a BlockPartition {
    type Item = &'a BlockRange;
    type IntoIter = std::slice::Iter<'a, BlockRange>;

    fn into_iter(self) -> Self::IntoIter {
        self.blocks.iter()
    }
}

impl IntoIterator for BlockPartition {
    type Item = BlockRange;
    type IntoIter = std::vec::IntoIter<BlockRange>;

    fn into_iter(self) -> Self::IntoIter {
        self.blocks.into_iter()
    }
}

/// Splits the index range `[start, end)` into at most `num_blocks`
/// contiguous blocks.
///
/// A descending range is normalized first, so `start > end` covers
/// `[end, start)`. All blocks have the same size except possibly the last,
/// which absorbs the remainder and may be longer. The block count is capped
/// at the range length so no block is ever empty; an empty range yields an
/// empty partition. A `num_blocks` of 0 is treated as 1. The split is
/// deterministic: equal inputs produce equal partitions.
///
/// # Examples
///
/// ```
/// use taskwell::compute_blocks;
///
/// let partition = compute_blocks(0, 9, 3);
/// let bounds: Vec<(i64, i64)> = partition.iter().map(|b| (b.start, b.end)).collect();
/// assert_eq!(bounds, vec![(0, 3), (3, 6), (6, 9)]);
/// ```
pub fn compute_blocks(start: i64, end: i64, num_blocks: usize) -> BlockPartition {
    let requested_blocks = num_blocks.max(1);
    let (low, high) = if start <= end { (start, end) } else { (end, start) };
    // i64 differences can exceed i64::MAX, so size arithmetic runs in i128.
    let total = high as i128 - low as i128;
    let count = (requested_blocks as i128).min(total);
    let mut blocks = Vec::new();
    if count > 0 {
        let base = total / count;
        blocks.reserve(count as usize);
        for k in 0..count {
            let block_start = low as i128 + k * base;
            let block_end = if k == count - 1 {
                high as i128
            } else {
                block_start + base
            };
            blocks.push(BlockRange {
                start: block_start as i64,
                end: block_end as i64,
            });
        }
    }
    BlockPartition {
        blocks,
        requested_blocks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bounds(partition: &BlockPartition) -> Vec<(i64, i64)> {
        partition.iter().map(|b| (b.start, b.end)).collect()
    }

    #[test]
    fn splits_evenly_when_divisible() {
        let partition = compute_blocks(0, 9, 3);
        assert_eq!(bounds(&partition), vec![(0, 3), (3, 6), (6, 9)]);
    }

    #[test]
    fn last_block_absorbs_remainder() {
        let partition = compute_blocks(0, 10, 3);
        assert_eq!(bounds(&partition), vec![(0, 3), (3, 6), (6, 10)]);
    }

    #[test]
    fn empty_range_yields_no_blocks() {
        let partition = compute_blocks(0, 0, 5);
        assert!(partition.is_empty());
        assert_eq!(partition.requested_blocks(), 5);
    }

    #[test]
    fn descending_range_is_normalized() {
        let partition = compute_blocks(9, 0, 3);
        assert_eq!(bounds(&partition), vec![(0, 3), (3, 6), (6, 9)]);
    }

    #[test]
    fn block_count_capped_at_range_length() {
        let partition = compute_blocks(0, 3, 10);
        assert_eq!(bounds(&partition), vec![(0, 1), (1, 2), (2, 3)]);
    }

    #[test]
    fn zero_blocks_treated_as_one() {
        let partition = compute_blocks(2, 7, 0);
        assert_eq!(bounds(&partition), vec![(2, 7)]);
    }

    #[test]
    fn single_index_range() {
        let partition = compute_blocks(5, 6, 4);
        assert_eq!(bounds(&partition), vec![(5, 6)]);
    }

    #[test]
    fn negative_bounds() {
        let partition = compute_blocks(-6, 6, 4);
        assert_eq!(bounds(&partition), vec![(-6, -3), (-3, 0), (0, 3), (3, 6)]);
    }

    #[test]
    fn full_i64_domain_does_not_overflow() {
        let partition = compute_blocks(i64::MIN, i64::MAX, 7);
        assert_eq!(partition.len(), 7);
        assert_eq!(partition.blocks()[0].start, i64::MIN);
        assert_eq!(partition.blocks()[6].end, i64::MAX);
        let mut previous_end = i64::MIN;
        let mut covered: u128 = 0;
        for block in &partition {
            assert_eq!(block.start, previous_end);
            assert!(block.end > block.start);
            covered += block.len() as u128;
            previous_end = block.end;
        }
        assert_eq!(covered, u64::MAX as u128);
    }

    #[test]
    fn deterministic_for_equal_inputs() {
        assert_eq!(compute_blocks(-37, 2041, 13), compute_blocks(-37, 2041, 13));
    }
}
