//! Seeded random streams.
//!
//! Every consumer gets its own ChaCha stream derived from the run seed, so
//! adding draws in one place never shifts the sequence seen by another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub mod stream {
    pub const PRECODER_INIT: u64 = 1;
    pub const RECEIVER_INIT: u64 = 2;
    pub const TRAINING: u64 = 3;
    pub const CHANNEL: u64 = 4;
    pub const VALIDATION: u64 = 5;
    pub const EVALUATION: u64 = 6;
}

pub fn seeded(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
