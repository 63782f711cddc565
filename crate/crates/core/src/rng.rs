//! Small deterministic PRNG.
//!
//! Everything random in this crate (irreducible-modulus search, equal-degree
//! splitting) flows through an explicit seed, so results are reproducible
//! across runs and platforms. SplitMix64 is more than enough for that; it is
//! not a cryptographic generator.

/// SplitMix64 stream (Steele, Lea, Flood 2014).
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Derive an independent stream, so sub-tasks can be reseeded without
    /// coupling their consumption order.
    pub fn fork(&mut self, tag: u64) -> Self {
        Self::new(self.next_u64() ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    pub fn next_u128(&mut self) -> u128 {
        ((self.next_u64() as u128) << 64) | self.next_u64() as u128
    }

    /// Uniform-ish value in `0..bound`. The slight modulo bias is irrelevant
    /// here: callers only need every value to be reachable.
    pub fn below(&mut self, bound: u128) -> u128 {
        assert!(bound > 0);
        self.next_u128() % bound
    }
}
