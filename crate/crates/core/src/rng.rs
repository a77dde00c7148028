//! Seed derivation.
//!
//! Every random stream is a ChaCha8 generator keyed by a root seed and
//! selected by a 64-bit stream id. Stream ids are packed counters:
//!
//! ```text
//! bits 56..64  purpose tag (see the STREAM_* constants)
//! bits 28..56  outer index (instance position in a corpus)
//! bits  0..28  inner index (start number, shard number, ...)
//! ```
//!
//! Two streams with different ids never overlap, so results do not depend on
//! how tasks are scheduled across worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const STREAM_GENERATOR: u64 = 1;
pub const STREAM_ATTACK: u64 = 2;
pub const STREAM_SAMPLING: u64 = 3;
pub const STREAM_CORPUS: u64 = 4;

pub fn stream_id(tag: u64, outer: u64, inner: u64) -> u64 {
    debug_assert!(tag < (1 << 8) && outer < (1 << 28) && inner < (1 << 28));
    (tag << 56) | (outer << 28) | inner
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Child seed for a nested task; deterministic in `(seed, stream)`.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    use rand::RngCore;
    stream_rng(seed, stream).next_u64()
}
