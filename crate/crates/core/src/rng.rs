//! Reproducible random streams.
//!
//! One root seed keys a ChaCha12 generator; each replication gets its own
//! counter-indexed stream, so adding replications or changing the worker
//! count never perturbs the draws of an existing path.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::Real;

/// The generator used throughout the crate.
pub type PathRng = ChaCha12Rng;

/// Derives the independent substream for replication `index` from `seed`.
pub fn substream(seed: u64, index: u64) -> PathRng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A uniform draw on [0,1) in the working scalar type.
pub fn uniform_draw<T: Real, R: Rng>(rng: &mut R) -> T {
    crate::real(rng.random::<f64>())
}

/// A Bernoulli draw with success probability `p`.
pub fn bernoulli<T: Real, R: Rng>(rng: &mut R, p: T) -> bool {
    uniform_draw::<T, R>(rng) < p
}
