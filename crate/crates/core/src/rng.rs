//! Seeded random streams.
//!
//! Every run derives its generators from one master seed: trial `n` uses a
//! ChaCha20 generator keyed by the master seed with its stream id set to `n`.
//! Streams never overlap, so trials can run in any order or in parallel and
//! still see identical random numbers.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub type TrialRng = ChaCha20Rng;

/// Generator for trial number `trial` under `master_seed`.
pub fn trial_rng(master_seed: u64, trial: u64) -> TrialRng {
    let mut rng = ChaCha20Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}
