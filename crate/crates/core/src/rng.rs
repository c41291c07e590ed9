//! Deterministic random streams.
//!
//! Every consumer of randomness gets its own ChaCha stream derived from the
//! run seed, the aircraft id and a purpose tag, so adding aircraft or
//! toggling the channel model never shifts another consumer's draws.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::traffic::PacketKind;

pub type SimRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    Placement,
    Address,
    Channel,
    Emission(PacketKind),
}

impl Purpose {
    fn tag(self) -> u64 {
        match self {
            Purpose::Placement => 0,
            Purpose::Address => 1,
            Purpose::Channel => 2,
            Purpose::Emission(kind) => 8 + kind.index() as u64,
        }
    }
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn combine(a: u64, b: u64) -> u64 {
    mix64(a ^ mix64(b))
}

/// Seed for replication `k` of a run seeded with `seed`; replication 0 keeps the seed.
pub fn replication_seed(seed: u64, k: u64) -> u64 {
    if k == 0 {
        seed
    } else {
        combine(seed, k)
    }
}

pub fn stream(seed: u64, aircraft: u32, purpose: Purpose) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((aircraft as u64) << 16) | purpose.tag());
    rng
}

/// Fleet-level stream (not tied to one aircraft).
pub fn fleet_stream(seed: u64, purpose: Purpose) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::MAX - purpose.tag());
    rng
}
