use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::matrix::CMatrix;
use crate::config::ChannelConfig;
use crate::error::{Error, Result};
use crate::summation::compensated_sum;

/// Draws of `X = ||H_n ... H_1||_F^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub config: ChannelConfig,
    pub seed: u64,
    pub values: Vec<f64>,
}

/// Generator for channel realization `index` under `seed`.
pub(crate) fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn draw(dims: &[usize], rng: &mut ChaCha8Rng) -> f64 {
    let mut product = CMatrix::gaussian(dims[1], dims[0], rng);
    for w in dims[1..].windows(2) {
        let layer = CMatrix::gaussian(w[1], w[0], rng);
        product = layer.mul(&product);
    }
    product.frobenius_sq()
}

/// Simulates `count` independent realizations of `X`.
pub fn sample_frobenius(config: &ChannelConfig, count: usize, seed: u64) -> Result<SampleSet> {
    if count == 0 {
        return Err(Error::Parameter("sample count must be at least 1".into()));
    }
    let dims: Vec<usize> = config.dims().iter().map(|&k| k as usize).collect();
    let values = (0..count as u64)
        .into_par_iter()
        .map(|i| draw(&dims, &mut stream_rng(seed, i)))
        .collect();
    Ok(SampleSet {
        config: config.clone(),
        seed,
        values,
    })
}

impl SampleSet {
    pub fn count(&self) -> usize {
        self.values.len()
    }

    /// Sample mean of `X^m`.
    pub fn moment(&self, m: i32) -> f64 {
        let mut terms: Vec<f64> = self.values.iter().map(|x| x.powi(m)).collect();
        compensated_sum(&mut terms) / self.count() as f64
    }

    /// Standard error of [`SampleSet::moment`].
    pub fn moment_std_error(&self, m: i32) -> f64 {
        let n = self.count() as f64;
        let mean = self.moment(m);
        let mut terms: Vec<f64> = self.values.iter().map(|x| (x.powi(m) - mean).powi(2)).collect();
        let var = compensated_sum(&mut terms) / (n - 1.0).max(1.0);
        (var / n).sqrt()
    }

    /// Empirical quantile: the smallest sample with at least `p` of the mass at or below it.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Parameter(format!(
                "quantile level must lie in [0, 1], got {p}"
            )));
        }
        let mut sorted = self.values.clone();
        sorted.sort_by(f64::total_cmp);
        let idx = ((p * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len()) - 1;
        Ok(sorted[idx])
    }
}
