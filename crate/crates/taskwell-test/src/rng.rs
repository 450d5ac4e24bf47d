//! Deterministic pseudo-random numbers for checks and benchmark data.
//!
//! The generator is splitmix64: a 64-bit shift/multiply scrambler with a
//! constant-stride state. It is seedable, fast enough to be the benchmark
//! workload itself, and supports one independent stream per vector index,
//! so generated data depends only on `(seed, index)` and never on which
//! thread produced it.

/// splitmix64 generator.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform value in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1_u64 << 53) as f64)
    }

    /// Uniform value in `[0, bound)` via 128-bit widening multiply.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "bound must be positive");
        ((self.next_u64() as u128 * bound as u128) >> 64) as u64
    }

    /// Uniform value in `[low, high]`, both bounds included.
    pub fn range_i64(&mut self, low: i64, high: i64) -> i64 {
        assert!(low <= high, "empty range");
        let span = (high as i128 - low as i128 + 1) as u64;
        (low as i128 + self.below(span) as i128) as i64
    }

    /// Uniform value in `[low, high]`, both bounds included.
    pub fn range_usize(&mut self, low: usize, high: usize) -> usize {
        self.range_i64(low as i64, high as i64) as usize
    }
}

/// Seed for the independent stream belonging to `index`.
///
/// Streams are the outputs of a splitmix64 sequence over the base seed, so
/// nearby indices get unrelated seeds.
pub fn stream_seed(seed: u64, index: u64) -> u64 {
    let mut mixer = SplitMix64::new(seed.wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15)));
    mixer.next_u64()
}
