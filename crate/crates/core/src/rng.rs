//! Seeded random streams.
//!
//! All randomness flows through ChaCha20 (`rand_chacha::ChaCha20Rng`) seeded
//! with `seed_from_u64`. Independent work items (Monte-Carlo trials, random
//! comparison cases) each get their own stream number on top of the master
//! seed, so results do not depend on execution order or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Identifier printed in reports so runs can be reproduced elsewhere.
pub const RNG_ALGORITHM: &str = "chacha20/seed_from_u64/stream=index";

pub type RngStream = ChaCha20Rng;

pub fn master_stream(seed: u64) -> RngStream {
    ChaCha20Rng::seed_from_u64(seed)
}

/// The stream used for work item `index` under `seed`.
pub fn substream(seed: u64, index: u64) -> RngStream {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
