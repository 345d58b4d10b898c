//! Deterministic, replayable uniform-variate streams.
//!
//! All randomness in the crate flows through [`ReplayStream`]. Every stream is
//! keyed by a 64-bit seed plus a stream id, so any consumer can be re-created
//! from its key alone and will replay bit-identical variates. Backward-coupling
//! records use the record's time index as the stream id; id 0 is reserved for
//! free-standing streams (probes, demos).

use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Backward time index: `t` names the transition from time `-t` to `-t+1`.
pub type TimeIndex = u64;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer (Stafford's Mix13 variant).
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for draw `draw_index` of a run keyed by `master_seed`.
///
/// This is the `(draw_index + 1)`-th output of a SplitMix64 sequence started
/// at `master_seed`, i.e. `mix64(master_seed + (draw_index + 1) * GAMMA)` with
/// `GAMMA = 0x9E3779B97F4A7C15`. Draws are therefore independent of worker
/// count and of the order in which they are scheduled.
#[inline]
pub fn derive_draw_seed(master_seed: u64, draw_index: u64) -> u64 {
    mix64(master_seed.wrapping_add(draw_index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// A keyed uniform-variate stream.
///
/// Wraps a ChaCha8 generator; the 64-bit key selects the cipher key and the
/// stream id selects one of 2^64 independent streams under that key.
#[derive(Debug, Clone)]
pub struct ReplayStream {
    rng: ChaCha8Rng,
}

impl ReplayStream {
    /// Stream dedicated to the deviate record at backward time `t` (`t >= 1`).
    pub fn for_record(seed: u64, t: TimeIndex) -> Self {
        debug_assert!(t >= 1, "record streams start at t = 1");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(t);
        Self { rng }
    }

    /// Free-standing stream (id 0); never collides with record streams.
    pub fn from_seed(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(0);
        Self { rng }
    }

    /// Uniform variate on `[0, 1)` with 53-bit resolution.
    #[inline]
    pub fn uniform01(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        (self.rng.next_u64() >> 11) as f64 * SCALE
    }
}

impl RngCore for ReplayStream {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }
}
