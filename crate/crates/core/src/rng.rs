//! Deterministic pseudo-randomness for chaos games.
//!
//! SplitMix64 (Steele, Lea, Flood 2014; public domain reference code in the
//! Java 8 `SplittableRandom`). Chosen over an external RNG crate because the
//! orbit streams are part of the output contract: chaos-game rasters must be
//! reproducible bit for bit across platforms and crate upgrades, so the
//! generator is pinned here in eleven lines rather than behind a dependency.

#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw in `[0, 1)` with 53 mantissa bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Draws an index from the cumulative distribution `cumulative`
    /// (nondecreasing, last entry 1). Linear scan: symbol counts are tiny.
    #[inline]
    pub fn pick(&mut self, cumulative: &[f64]) -> usize {
        let u = self.next_f64();
        for (i, &c) in cumulative.iter().enumerate() {
            if u < c {
                return i;
            }
        }
        cumulative.len() - 1
    }
}
