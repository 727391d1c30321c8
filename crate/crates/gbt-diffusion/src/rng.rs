//! Reproducible, splittable random number streams.
//!
//! Every stochastic routine in this crate draws from a [`ChaCha8Rng`]
//! addressed by `(seed, stream)`. The seed identifies a run; the stream
//! identifies an independent substream within it (one per trial, per cell,
//! per embedding, ...). Because streams are counter-based rather than
//! sequentially split, any trial can be reproduced in isolation and trials
//! can run on worker threads in any order without affecting results.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Returns the generator for substream `stream` of run `seed`.
pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Packs a two-level trial address into a single stream id.
///
/// Useful when an experiment has a grid dimension and a per-cell trial index;
/// `group` occupies the high 32 bits so up to `2^32` trials per group never
/// collide with neighboring groups.
pub fn stream_id(group: u64, trial: u64) -> u64 {
    debug_assert!(group < (1 << 32), "group index too large");
    debug_assert!(trial < (1 << 32), "trial index too large");
    (group << 32) | trial
}
