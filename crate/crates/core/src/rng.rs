//! Counter-based random streams.
//!
//! Every random word is a pure function of `(seed, stream_id, sample_index,
//! vertex_index, attempt)`, built from the SplitMix64 finalizer. There is no
//! generator state to advance, so samples can be produced in any order, on
//! any number of threads, and always come out the same.

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;
const STREAM_SALT: u64 = 0xd1b5_4a32_d192_ed03;
const VERTEX_SALT: u64 = 0x8cb9_2ba7_2f3d_8dd7;

/// SplitMix64 output function.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Keyed family of per-sample streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CounterRng {
    key: u64,
}

impl CounterRng {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let key = mix64(mix64(seed ^ GOLDEN) ^ stream_id.wrapping_mul(STREAM_SALT));
        CounterRng { key }
    }

    /// Stream for one Monte Carlo sample.
    #[inline]
    pub fn sample(&self, sample_index: u64) -> SampleStream {
        SampleStream {
            key: mix64(self.key.wrapping_add(GOLDEN.wrapping_mul(sample_index.wrapping_add(1)))),
        }
    }
}

/// Random words for the vertices of a single sample.
#[derive(Debug, Clone, Copy)]
pub struct SampleStream {
    key: u64,
}

impl SampleStream {
    #[inline]
    pub fn word(&self, vertex: u64, attempt: u32) -> u64 {
        let counter = (vertex << 8) ^ u64::from(attempt);
        mix64(self.key ^ mix64(counter.wrapping_mul(VERTEX_SALT).wrapping_add(GOLDEN)))
    }

    /// Uniform integer in `[0, bound)` for `vertex`, by Lemire's
    /// multiply-and-reject method. Exact: rejected words are replaced by the
    /// next attempt counter.
    #[inline]
    pub fn below(&self, vertex: u64, bound: u32) -> u32 {
        debug_assert!(bound > 0);
        let bound64 = u64::from(bound);
        let threshold = bound64.wrapping_neg() % bound64;
        let mut attempt = 0u32;
        loop {
            let m = u128::from(self.word(vertex, attempt)) * u128::from(bound64);
            if (m as u64) >= threshold {
                return (m >> 64) as u32;
            }
            attempt += 1;
        }
    }
}
