//! Replica random streams.
//!
//! Every replica owns one ChaCha8 stream selected by its seed, so replicas with
//! seeds `base + i` never overlap and results do not depend on scheduling.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

const KEY: [u8; 32] = *b"riccati-spectra replica streams.";

/// Offset (in 32-bit words) of the secondary lane inside a stream.
const LANE_STRIDE: u128 = 1 << 66;

/// The primary generator for `seed`.
pub fn stream(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::from_seed(KEY);
    rng.set_stream(seed);
    rng
}

/// An independent lane of the stream for `seed`, far from the primary lane.
pub fn lane(seed: u64, lane: u32) -> ChaCha8Rng {
    let mut rng = stream(seed);
    rng.set_word_pos(LANE_STRIDE * lane as u128);
    rng
}
