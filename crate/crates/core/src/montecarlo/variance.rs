//! Mean and variance of the normalized energy `Y_n = X / (K_0 prod_{i>=1} K_i)`
//! as scatterer layers are added.

use crate::config::ChannelConfig;
use crate::error::Result;
use crate::moments::closed_form_moment;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceStep {
    /// Number of matrices in the prefix.
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
    /// `V[Y_n] - V[Y_{n-1}]`, with `V[Y_0] = 0`.
    pub increment: f64,
}

/// Analytic mean and variance of `Y_k` for every prefix `k = 1..=n` of `config`.
///
/// Adding layer `k` raises the variance by
/// `(prod_{i<k} (1 + 1/K_i) - prod_{i<k} (1 - 1/K_i)) / (2 K_k)`.
pub fn variance_recursion(config: &ChannelConfig) -> Result<Vec<VarianceStep>> {
    let dims = config.dims();
    let mut steps = Vec::with_capacity(config.n());
    let mut variance = 0.0;
    let mut plus = 1.0;
    let mut minus = 1.0;
    for k in 1..=config.n() {
        let prev = f64::from(dims[k - 1]);
        plus *= 1.0 + 1.0 / prev;
        minus *= 1.0 - 1.0 / prev;
        let increment = (plus - minus) / (2.0 * f64::from(dims[k]));
        variance += increment;
        let prefix = config.prefix(k)?;
        let mean = closed_form_moment(&prefix, 1)? / prefix.dim_product();
        steps.push(VarianceStep {
            n: k,
            mean,
            variance,
            increment,
        });
    }
    Ok(steps)
}

/// `V[Y_n] = E[X^2] / (prod_i K_i)^2 - 1` from the closed-form second moment.
pub fn closed_form_variance(config: &ChannelConfig) -> Result<f64> {
    let scale = config.dim_product();
    Ok(closed_form_moment(config, 2)? / (scale * scale) - 1.0)
}
