//! Counter-based splittable random streams.
//!
//! A stream is a 64-bit key derived from a root seed and a path of labels
//! (component, replica, time, ...). Draw `n` of a stream is a pure hash of
//! `(key, n)`, so any stream can be re-created from its path and replayed
//! without consuming draws from sibling streams. Not cryptographic.

use serde::{Deserialize, Serialize};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const LABEL_SALT: u64 = 0xD6E8_FEB8_6659_FD93;

#[inline(always)]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// FNV-1a over a label string.
fn hash_label(label: &str) -> u64 {
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for b in label.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

/// A keyed random stream. Cloning a stream clones its position.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    seed: u64,
    key: u64,
    counter: u64,
}

impl RngStream {
    pub fn root(seed: u64) -> Self {
        Self {
            seed,
            key: mix64(seed ^ GOLDEN),
            counter: 0,
        }
    }

    /// Sub-stream for an integer label (replica index, time step, uid, ...).
    pub fn child(&self, label: u64) -> Self {
        let salted = mix64(label.wrapping_add(LABEL_SALT));
        Self {
            seed: self.seed,
            key: mix64(self.key.rotate_left(23) ^ salted),
            counter: 0,
        }
    }

    /// Sub-stream for a named component.
    pub fn named(&self, name: &str) -> Self {
        self.child(hash_label(name))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn key(&self) -> u64 {
        self.key
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let n = self.counter;
        self.counter = self.counter.wrapping_add(1);
        mix64(mix64(self.key ^ n.wrapping_mul(GOLDEN)) ^ self.key.rotate_left(32))
    }

    /// Uniform in `[0, 1)` with 53 bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in the open interval `(0, 1)`.
    #[inline]
    pub fn open01(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// Uniform integer in `[0, n)`; `n` must be positive.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        // rejection sampling removes modulo bias
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % n;
            }
        }
    }

    /// Index drawn from a probability vector by inverse CDF. Ties resolve to
    /// the lowest index; trailing rounding mass goes to the last positive entry.
    pub fn categorical(&mut self, probs: &[f64]) -> usize {
        let u = self.next_f64();
        let mut acc = 0.0;
        let mut last_positive = 0;
        for (i, &p) in probs.iter().enumerate() {
            if p > 0.0 {
                last_positive = i;
            }
            acc += p;
            if u < acc {
                return i;
            }
        }
        last_positive
    }
}
