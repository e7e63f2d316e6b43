//! Seeded multiplicative Gaussian noise `(1 + level * n)`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::FarFieldDataset;
use crate::error::{Error, Result};

/// SplitMix64 finalizer applied to `seed + stream`; fixed splitting of one
/// seed into independent sub-seeds.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed.wrapping_add(stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn check_level(level: f64) -> Result<()> {
    if !(level.is_finite() && level >= 0.0) {
        return Err(Error::domain(format!("noise level must be nonnegative, got {level}")));
    }
    Ok(())
}

fn multiply_noise(values: &mut [Complex64], level: f64, rng: &mut ChaCha8Rng) {
    for v in values {
        let n: f64 = rng.sample(StandardNormal);
        *v *= 1.0 + level * n;
    }
}

/// Multiplies every dataset entry by `1 + level * n_j`, with the `n_j` drawn
/// in storage order from a generator seeded with `seed`.
pub fn add_noise(dataset: &FarFieldDataset, level: f64, seed: u64) -> Result<FarFieldDataset> {
    check_level(level)?;
    let mut values = dataset.values().to_vec();
    if level > 0.0 {
        multiply_noise(&mut values, level, &mut ChaCha8Rng::seed_from_u64(seed));
    }
    let mut out = dataset.with_values(values)?;
    out.set_noise(level, Some(seed), false);
    Ok(out)
}

/// Noise on the nodal scattered field of each experiment, before the
/// far-field quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldNoise {
    pub level: f64,
    pub seed: u64,
}

impl FieldNoise {
    pub fn new(level: f64, seed: u64) -> Result<Self> {
        check_level(level)?;
        Ok(FieldNoise { level, seed })
    }

    /// Perturbs the scattered field belonging to the frequency at storage
    /// position `pos`; the stream depends only on `(seed, pos)`.
    pub(crate) fn apply(&self, pos: usize, u_s: &mut [Complex64]) {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(self.seed, pos as u64));
        multiply_noise(u_s, self.level, &mut rng);
    }
}
