//! Seeding rules shared by every simulation unit.
//!
//! A repetition seed is `master ^ repetition`. Each repetition draws from
//! separate ChaCha streams of that seed: one for model construction and
//! sampling, one for draining, one for evaluation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const MODEL_STREAM: u64 = 0;
pub const DRAIN_STREAM: u64 = 1;
pub const EVAL_STREAM: u64 = 2;

pub fn repetition_seed(master: u64, repetition: u64) -> u64 {
    master ^ repetition
}

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
