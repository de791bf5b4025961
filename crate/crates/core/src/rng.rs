//! Counter-based random streams: every task draws from its own ChaCha
//! stream keyed by `(seed, task index)`, so results do not depend on how
//! tasks are scheduled across workers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::torus::TorusPoint;

pub fn stream(seed: u64, task: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(task);
    rng
}

/// Uniform phase on `T²` for task `task`.
pub fn phase(seed: u64, task: u64) -> TorusPoint {
    let mut rng = stream(seed, task);
    random_point(&mut rng)
}

pub fn random_point<R: Rng>(rng: &mut R) -> TorusPoint {
    TorusPoint::new(rng.random::<f64>(), rng.random::<f64>())
}

/// Derives an independent seed for a named sub-experiment.
pub fn subseed(seed: u64, label: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ label.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
