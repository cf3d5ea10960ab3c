//! Portable pseudo-random generator used for dataset splits.
//!
//! The generator is xorshift64* (Vigna, 2016):
//!
//! ```text
//! x ^= x >> 12;
//! x ^= x << 25;
//! x ^= x >> 27;
//! out = x * 0x2545_F491_4F6C_DD1D   (wrapping)
//! ```
//!
//! The 64-bit user seed is first passed through one SplitMix64 step
//! (increment `0x9E37_79B9_7F4A_7C15`, multipliers `0xBF58_476D_1CE4_E5B9`
//! and `0x94D0_49BB_1331_11EB`) so that small or zero seeds still give a
//! non-zero, well-mixed state. Bounded integers use rejection sampling on
//! the top bits, so a shuffle is bit-identical on every platform.

#[derive(Debug, Clone)]
pub struct XorShift64Star {
    state: u64,
}

fn splitmix64(seed: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl XorShift64Star {
    pub fn new(seed: u64) -> Self {
        let mut state = splitmix64(seed);
        if state == 0 {
            state = 0x9E37_79B9_7F4A_7C15;
        }
        Self { state }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    /// Uniform integer in `0..bound`. `bound` must be non-zero.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "bound must be positive");
        if bound == 1 {
            return 0;
        }
        let bits = 64 - (bound - 1).leading_zeros();
        loop {
            let candidate = self.next_u64() >> (64 - bits);
            if candidate < bound {
                return candidate;
            }
        }
    }

    /// Uniform real in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Fisher-Yates shuffle, walking from the back of the slice.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}
