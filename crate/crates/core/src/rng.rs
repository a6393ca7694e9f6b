//! Seeded random source.
//!
//! The generator is xoshiro256++ with its state expanded from the 64-bit
//! seed by SplitMix64, exactly as recommended by the xoshiro authors. Both
//! algorithms are fixed here rather than taken from a platform library so
//! that the same seed yields the same draw sequence on every platform,
//! which in turn keeps whole trace files byte-identical across reruns.

/// Errors from the random source.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RngError {
    /// `uniform(lo, hi)` was called with `lo > hi`.
    InvalidRange,
}

impl core::fmt::Display for RngError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            RngError::InvalidRange => write!(f, "uniform bounds out of order"),
        }
    }
}

/// Deterministic 64-bit generator (xoshiro256++).
#[derive(Clone, Debug)]
pub struct RandomSource {
    state: [u64; 4],
}

impl RandomSource {
    pub fn new(seed: u64) -> RandomSource {
        // SplitMix64 stream seeds the four state words; this also maps the
        // all-zero seed onto a valid non-zero state.
        let mut sm = seed;
        let mut next = || {
            sm = sm.wrapping_add(0x9e3779b97f4a7c15);
            let mut z = sm;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
            z ^ (z >> 31)
        };
        RandomSource {
            state: [next(), next(), next(), next()],
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.state;
        let result = s[0]
            .wrapping_add(s[3])
            .rotate_left(23)
            .wrapping_add(s[0]);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// A draw in `[0, 1)` with 53 bits of precision.
    pub fn uniform01(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// A draw in `[lo, hi]`. The degenerate interval returns `lo` exactly.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> Result<f64, RngError> {
        if lo > hi {
            return Err(RngError::InvalidRange);
        }
        Ok(lo + (hi - lo) * self.uniform01())
    }
}
