//! Counter-based random streams.
//!
//! Every random draw in the crate comes from a ChaCha8 stream keyed by a
//! `(seed, stream)` pair. Streams with different ids are independent, so work
//! that is split across threads stays reproducible as long as each unit of
//! work is given its own id.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Returns the generator for `stream` under the master `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Packs two small indices into one stream id (`major` in the high half).
pub fn stream_id(major: u64, minor: u64) -> u64 {
    (major << 32) ^ (minor & 0xffff_ffff)
}
