//! Deterministic random-stream derivation.
//!
//! Every Monte Carlo run owns a ChaCha8 stream seeded from a 64-bit mix of
//! `(master_seed, cell_id, run_index)`. Streams are never shared, so results
//! do not depend on how runs are scheduled across threads.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// The concrete generator handed to every simulation routine.
pub type Stream = ChaCha8Rng;

/// Identifier written into result metadata so a file names the exact
/// derivation and generator that produced it.
pub const GENERATOR_ID: &str = "chacha8(rand_chacha 0.9)/splitmix64-mix(master,cell,run)/v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngPolicy {
    pub master_seed: u64,
}

impl RngPolicy {
    pub fn new(master_seed: u64) -> Self {
        Self { master_seed }
    }

    pub fn stream(&self, cell_id: u64, run_index: u64) -> Stream {
        derive_stream(self.master_seed, cell_id, run_index)
    }
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes the three coordinates into a single 64-bit seed.
pub fn mix_seed(master_seed: u64, cell_id: u64, run_index: u64) -> u64 {
    let h = splitmix64(master_seed);
    let h = splitmix64(h ^ cell_id.rotate_left(21));
    splitmix64(h ^ run_index.rotate_left(42))
}

pub fn derive_stream(master_seed: u64, cell_id: u64, run_index: u64) -> Stream {
    Stream::seed_from_u64(mix_seed(master_seed, cell_id, run_index))
}

/// Fair coin: the top bit of the next 64-bit output.
#[inline]
pub fn fair_bit<R: RngCore + ?Sized>(rng: &mut R) -> u8 {
    (rng.next_u64() >> 63) as u8
}

/// Bernoulli trial with success probability exactly `num / den`.
#[inline]
pub(crate) fn bernoulli_ratio<R: RngCore + ?Sized>(rng: &mut R, num: u64, den: u64) -> u8 {
    debug_assert!(den > 0 && num <= den);
    if num == 0 {
        return 0;
    }
    if num == den {
        return 1;
    }
    u8::from(rng.random_range(0..den) < num)
}
