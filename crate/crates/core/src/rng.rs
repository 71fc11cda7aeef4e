//! Seeded randomness. Every stochastic step takes an explicit RNG derived
//! from the run seed, so generations are reproducible across platforms.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type GameRng = ChaCha8Rng;

/// An RNG for one named pipeline stage, independent of how much randomness
/// other stages consumed.
pub fn stage_rng(seed: u64, stage: &str) -> GameRng {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in stage.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    ChaCha8Rng::seed_from_u64(splitmix(seed ^ h))
}

pub fn seeded(seed: u64) -> GameRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}
