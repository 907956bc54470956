//! SplitMix64, written out so any implementation reproduces the same sets.
//!
//! ```text
//! state  <- state + 0x9E3779B97F4A7C15            (wrapping)
//! z      <- state
//! z      <- (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9   (wrapping)
//! z      <- (z ^ (z >> 27)) * 0x94D049BB133111EB   (wrapping)
//! output <- z ^ (z >> 31)
//! ```
//!
//! A value below `m` is drawn by rejection: draw `x` until
//! `x < (u64::MAX / m) * m`, then
//! return `x mod m`.
//!
//! The generator for trial `t` at set size `s` starts from
//! `mix(mix(mix(seed) ^ s) ^ t)`, where `mix(v)` is the first output of a
//! generator started at state `v`.

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `0..m`; `m` must be positive.
    pub fn below(&mut self, m: u64) -> u64 {
        assert!(m > 0, "empty range");
        let limit = (u64::MAX / m) * m;
        loop {
            let x = self.next_u64();
            if x < limit {
                return x % m;
            }
        }
    }
}

pub fn mix(v: u64) -> u64 {
    SplitMix64::new(v).next_u64()
}

pub fn trial_seed(seed: u64, size: usize, trial: u32) -> u64 {
    mix(mix(mix(seed) ^ size as u64) ^ trial as u64)
}
