//! Seeding helpers shared by everything that consumes randomness.
//!
//! All randomness in the crate comes from `ChaCha8Rng`, which produces the
//! same stream on every platform.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream ids. Sub-tasks of one run draw from distinct ChaCha streams of the
/// same seed so that adding draws to one never shifts another.
pub mod stream {
    pub const INIT: u64 = 0;
    pub const TRAIN: u64 = 1;
    pub const SYNTH: u64 = 2;
    pub const FOLDS: u64 = 3;
    pub const COUPLING: u64 = 4;
    pub const PRIOR: u64 = 5;
    pub const BLOBS: u64 = 6;
}

pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Mixes a child index into a seed (splitmix64 finalizer).
pub fn derive_seed(seed: u64, child: u64) -> u64 {
    let mut z = seed ^ child.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Full ChaCha position, enough to resume a generator exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RngState {
    pub seed: [u8; 32],
    pub stream: u64,
    pub word_pos_hi: u64,
    pub word_pos_lo: u64,
}

impl RngState {
    pub fn capture(rng: &ChaCha8Rng) -> Self {
        let pos = rng.get_word_pos();
        RngState {
            seed: rng.get_seed(),
            stream: rng.get_stream(),
            word_pos_hi: (pos >> 64) as u64,
            word_pos_lo: pos as u64,
        }
    }

    pub fn restore(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::from_seed(self.seed);
        rng.set_stream(self.stream);
        rng.set_word_pos(((self.word_pos_hi as u128) << 64) | self.word_pos_lo as u128);
        rng
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn capture_restore_resumes_stream() {
        let mut rng = rng_for(7, stream::TRAIN);
        for _ in 0..13 {
            rng.next_u32();
        }
        let state = RngState::capture(&rng);
        let mut resumed = state.restore();
        for _ in 0..50 {
            assert_eq!(rng.next_u64(), resumed.next_u64());
        }
    }

    #[test]
    fn streams_differ() {
        let mut a = rng_for(1, stream::INIT);
        let mut b = rng_for(1, stream::TRAIN);
        assert_ne!(a.next_u64(), b.next_u64());
    }
}
