//! Deterministic, splittable random streams.
//!
//! Every piece of randomness in the crate flows from a single 64-bit seed
//! through named substreams. A substream is derived from (seed, label, index)
//! alone, never from how much of the parent stream was consumed, so parallel
//! trial execution is schedule-independent: trial k sees the same bits whether
//! it runs first, last, or concurrently.

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 finalizer; full-avalanche mix of a 64-bit word.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn label_hash(label: &str) -> u64 {
    // FNV-1a, 64-bit. Stable across platforms and rustc versions.
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for b in label.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// A counter-based random stream with deterministic splitting.
#[derive(Debug, Clone)]
pub struct RngStream {
    key: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn from_seed(seed: u64) -> Self {
        let key = mix(seed);
        RngStream {
            key,
            inner: ChaCha8Rng::seed_from_u64(key),
        }
    }

    /// Derive an independent child stream from (this stream's key, label, index).
    /// The derivation ignores the parent's consumption state.
    pub fn substream(&self, label: &str, index: u64) -> Self {
        let key = mix(self.key ^ mix(label_hash(label).wrapping_add(mix(index))));
        RngStream {
            key,
            inner: ChaCha8Rng::seed_from_u64(key),
        }
    }

    /// One Bernoulli(p) draw.
    pub fn bernoulli(&mut self, p: f64) -> bool {
        debug_assert!((0.0..=1.0).contains(&p));
        // Compare a uniform [0,1) double against p; endpoints behave exactly.
        if p >= 1.0 {
            return true;
        }
        if p <= 0.0 {
            return false;
        }
        self.uniform() < p
    }

    /// Uniform f64 in [0, 1) with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in [0, bound). `bound` must be nonzero.
    pub fn below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        // Rejection sampling on the top of the range keeps the draw unbiased.
        let zone = u64::MAX - (u64::MAX - bound + 1) % bound;
        loop {
            let v = self.inner.next_u64();
            if v <= zone {
                return v % bound;
            }
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }
}
