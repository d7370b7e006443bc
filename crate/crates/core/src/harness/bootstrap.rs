use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{FixError, Result};

pub const DEFAULT_ITERS: usize = 1000;

/// Standard deviation (population form) of the means of `iters` resamples of
/// `scores` drawn with replacement.
pub fn bootstrap_std(scores: &[f64], iters: usize, seed: u64) -> Result<f64> {
    if scores.is_empty() {
        return Err(FixError::arg("bootstrap of an empty score list"));
    }
    if iters == 0 {
        return Err(FixError::param("iters", "must be at least 1"));
    }
    let n = scores.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Welford keeps identical resample means at exactly zero spread.
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for k in 1..=iters {
        let resample_mean = (0..n).map(|_| scores[rng.gen_range(0..n)]).sum::<f64>() / n as f64;
        let delta = resample_mean - mean;
        mean += delta / k as f64;
        m2 += delta * (resample_mean - mean);
    }
    Ok((m2 / iters as f64).sqrt())
}
