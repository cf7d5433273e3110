//! Avalanche measurement: Hamming distance between the ciphertexts of inputs
//! that differ in one plaintext or key bit.
//!
//! Sampling uses ChaCha8 (`rand_chacha`) seeded with `seed_from_u64`, which is
//! portable and stable across platforms. Each trial draws, in order: a 64-bit
//! plaintext, a 128-bit key, and the index of the bit to flip.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::block::{Block64, Key128};
use crate::cipher::{Cipher, ROUNDS};
use crate::error::Error;
use crate::profile::ConventionProfile;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlipTarget {
    PlaintextBit,
    KeyBit,
}

impl FlipTarget {
    pub fn width(self) -> usize {
        match self {
            FlipTarget::PlaintextBit => 64,
            FlipTarget::KeyBit => 128,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AvalancheReport {
    pub trials: u64,
    pub flip_target: FlipTarget,
    pub seed: u64,
    pub rounds: usize,
    pub profile: ConventionProfile,
    /// Mean number of ciphertext bits flipped.
    pub mean_flips: f64,
    /// `histogram[d]` counts trials with Hamming distance `d` (0..=64).
    pub histogram: Vec<u64>,
    /// Mean distance per flipped input bit; `None` for bits never drawn.
    pub per_bit_means: Vec<Option<f64>>,
}

pub fn avalanche_test(
    trials: u64,
    flip_target: FlipTarget,
    seed: u64,
    profile: &ConventionProfile,
    rounds: usize,
) -> Result<AvalancheReport, Error> {
    if trials == 0 {
        return Err(Error::NoTrials);
    }
    let rounds = rounds.min(ROUNDS);
    let width = flip_target.width();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut histogram = vec![0u64; 65];
    let mut bit_sum = vec![0u64; width];
    let mut bit_count = vec![0u64; width];

    for _ in 0..trials {
        let p: u64 = rng.gen();
        let k: u128 = rng.gen();
        let bit = rng.gen_range(0..width);
        let base = Cipher::new(Key128(k), *profile).encrypt_rounds(Block64(p), rounds);
        let flipped = match flip_target {
            FlipTarget::PlaintextBit => {
                Cipher::new(Key128(k), *profile).encrypt_rounds(Block64(p ^ (1 << bit)), rounds)
            }
            FlipTarget::KeyBit => {
                Cipher::new(Key128(k ^ (1 << bit)), *profile).encrypt_rounds(Block64(p), rounds)
            }
        };
        let d = (base.0 ^ flipped.0).count_ones() as usize;
        histogram[d] += 1;
        bit_sum[bit] += d as u64;
        bit_count[bit] += 1;
    }

    let weighted: u64 = histogram
        .iter()
        .enumerate()
        .map(|(d, &c)| d as u64 * c)
        .sum();
    let per_bit_means = bit_sum
        .iter()
        .zip(&bit_count)
        .map(|(&s, &c)| (c > 0).then(|| s as f64 / c as f64))
        .collect();
    Ok(AvalancheReport {
        trials,
        flip_target,
        seed,
        rounds,
        profile: *profile,
        mean_flips: weighted as f64 / trials as f64,
        histogram,
        per_bit_means,
    })
}
