//! Seeded random streams.
//!
//! All randomness goes through ChaCha8 (`rand_chacha`). A master seed is
//! expanded with `ChaCha8Rng::seed_from_u64` and each consumer reads its own
//! ChaCha stream (`set_stream`), so the signal, the sampling matrix and the
//! noise are independent and adding draws to one never shifts another.
//!
//! Per-trial seeds for Monte Carlo runs come from [`mix_seed`], the SplitMix64
//! finalizer applied to the master seed and the trial coordinates.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream identifiers under one master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Signal = 1,
    Sampling = 2,
    Noise = 3,
    Spectral = 4,
    Diagnostics = 5,
    Holdout = 6,
}

/// The generator for `stream` under `seed`.
pub fn stream(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from `master` and an ordered list of coordinates,
/// e.g. `mix_seed(master, &[n, trial])`.
pub fn mix_seed(master: u64, coords: &[u64]) -> u64 {
    coords
        .iter()
        .fold(splitmix64(master), |acc, &c| splitmix64(acc ^ splitmix64(c)))
}
