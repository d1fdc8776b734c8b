//! Counter-based random substreams.
//!
//! Every random draw in a campaign is taken from a generator keyed by
//! `(master seed, counter, purpose)`, so results do not depend on how work
//! is split across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Distinguishes independent streams that share a master seed and counter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Purpose {
    Matrix = 1,
    Support = 2,
    Noise = 3,
    Index = 4,
    Oracle = 5,
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes the three keys into one 64-bit seed.
pub fn derive_seed(master: u64, counter: u64, purpose: Purpose) -> u64 {
    let a = splitmix64(master);
    let b = splitmix64(a ^ counter.wrapping_mul(GOLDEN));
    splitmix64(b ^ (purpose as u64).rotate_left(32))
}

pub fn substream(master: u64, counter: u64, purpose: Purpose) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, counter, purpose))
}
