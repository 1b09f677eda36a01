//! Distance of the normalized product channel `P_n / sqrt(K_1 ... K_{n-1})`
//! from an i.i.d. complex Gaussian matrix, as scatterer counts grow.

use rayon::prelude::*;

use super::ecdf::Ecdf;
use super::matrix::CMatrix;
use super::sampler::stream_rng;
use crate::config::ChannelConfig;
use crate::error::{Error, Result};
use crate::special::normal_cdf;

/// How the entry distribution is estimated from the simulated channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KsEstimator {
    /// Given `P_{n-1}`, each entry of column `b` of `P_n` is complex Gaussian
    /// with variance `||col_b P_{n-1}||^2`. The entry law is estimated as the
    /// average of these conditional normal laws, which removes the sampling
    /// noise of the last layer entirely.
    #[default]
    Conditional,
    /// Pools the real and imaginary parts of all entries of every simulated
    /// `H`, scaled by `sqrt(2)`, and takes the one-sample KS statistic.
    Empirical,
}

/// `[tx, ceil(r_1 K'), ..., ceil(r_m K'), rx]`.
pub fn cluster_family(tx: u32, rx: u32, scatterers: u32, ratios: &[f64]) -> Result<ChannelConfig> {
    if scatterers == 0 {
        return Err(Error::Parameter("scatterer count must be at least 1".into()));
    }
    let mut dims = vec![tx];
    for &r in ratios {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Parameter(format!(
                "scatterer ratio must be positive, got {r}"
            )));
        }
        // ceil with slack so that e.g. 4/3 * 3 stays 4
        let k = (r * f64::from(scatterers) - 1e-9).ceil();
        if k > f64::from(u32::MAX) {
            return Err(Error::Parameter(format!("scatterer count {k} too large")));
        }
        dims.push((k as u32).max(1));
    }
    dims.push(rx);
    ChannelConfig::new(dims)
}

/// Product of the first `config.n() - 1` layers, compressed to at most
/// `K_0` rows after every layer.
fn inner_product(dims: &[usize], rng: &mut rand_chacha::ChaCha8Rng) -> CMatrix {
    let k0 = dims[0];
    let mut p = CMatrix::zeros(k0, k0);
    for i in 0..k0 {
        p.data[i * k0 + i] = num_complex::Complex64::new(1.0, 0.0);
    }
    for &k in &dims[1..dims.len() - 1] {
        let layer = CMatrix::gaussian(k, p.rows, rng);
        p = layer.mul(&p).gram_factor();
    }
    p
}

/// Kolmogorov-Smirnov distance between the law of the scaled real and
/// imaginary parts of the entries of `H = P_n / sqrt(K_1 ... K_{n-1})` and the
/// standard normal law, estimated from `count` channel draws.
pub fn rayleigh_limit_distance(
    config: &ChannelConfig,
    count: usize,
    seed: u64,
    estimator: KsEstimator,
) -> Result<f64> {
    if count == 0 {
        return Err(Error::Parameter("draw count must be at least 1".into()));
    }
    let dims: Vec<usize> = config.dims().iter().map(|&k| k as usize).collect();
    let n = config.n();
    let scale: f64 = dims[1..n].iter().map(|&k| k as f64).product();
    match estimator {
        KsEstimator::Conditional => {
            let variances: Vec<f64> = (0..count as u64)
                .into_par_iter()
                .flat_map_iter(|i| {
                    let p = inner_product(&dims, &mut stream_rng(seed, i));
                    p.column_norms_sq().into_iter().map(move |v| v / scale)
                })
                .collect();
            Ok(mixture_distance(&variances))
        }
        KsEstimator::Empirical => {
            let norm = (2.0 / scale).sqrt();
            let parts: Vec<f64> = (0..count as u64)
                .into_par_iter()
                .flat_map_iter(|i| {
                    let mut rng = stream_rng(seed, i);
                    let p = inner_product(&dims, &mut rng);
                    let h = CMatrix::gaussian(dims[n], p.rows, &mut rng).mul(&p);
                    h.data.into_iter().flat_map(move |z| [z.re * norm, z.im * norm])
                })
                .collect();
            Ecdf::new(&parts)?.ks_distance(|x| Ok(normal_cdf(x)))
        }
    }
}

/// `sup_x |mean_b Phi(x / sqrt(v_b)) - Phi(x)|`. Both laws are symmetric, so
/// only `x > 0` is scanned.
fn mixture_distance(variances: &[f64]) -> f64 {
    let inv_sd: Vec<f64> = variances.iter().map(|v| 1.0 / v.sqrt()).collect();
    let diff = |x: f64| {
        let mixture: f64 = inv_sd.iter().map(|s| normal_cdf(x * s)).sum::<f64>() / inv_sd.len() as f64;
        (mixture - normal_cdf(x)).abs()
    };
    const STEP: f64 = 0.01;
    let (mut best_x, mut best) = (STEP, diff(STEP));
    for k in 2..=800 {
        let x = STEP * k as f64;
        let d = diff(x);
        if d > best {
            best = d;
            best_x = x;
        }
    }
    // golden-section refinement around the best grid point
    let (mut a, mut b) = ((best_x - STEP).max(1e-9), best_x + STEP);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..40 {
        let c = b - ratio * (b - a);
        let d = a + ratio * (b - a);
        if diff(c) > diff(d) {
            b = d;
        } else {
            a = c;
        }
    }
    best.max(diff(0.5 * (a + b)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_dims() {
        let c = cluster_family(2, 4, 10, &[1.0, 4.0 / 3.0]).unwrap();
        assert_eq!(c.dims(), &[2, 10, 14, 4]);
        let c = cluster_family(2, 4, 3, &[1.0, 4.0 / 3.0]).unwrap();
        assert_eq!(c.dims(), &[2, 3, 4, 4]);
        assert_eq!(
            cluster_family(2, 4, 1000, &[1.0, 4.0 / 3.0]).unwrap().dims()[2],
            1334
        );
        assert!(cluster_family(2, 4, 0, &[1.0]).is_err());
    }

    #[test]
    fn single_layer_is_exactly_gaussian() {
        let c = ChannelConfig::new(vec![2, 4]).unwrap();
        assert!(rayleigh_limit_distance(&c, 100, 0, KsEstimator::Conditional).unwrap() < 1e-14);
        let count = 20_000;
        let d = rayleigh_limit_distance(&c, count, 0, KsEstimator::Empirical).unwrap();
        assert!(d <= 1.63 / ((2 * 8 * count) as f64).sqrt(), "{d}");
    }

    #[test]
    fn mixture_distance_of_point_mass_is_zero() {
        assert!(mixture_distance(&[1.0; 10]) < 1e-15);
        // N(0, 4) vs N(0, 1): sup at x = sqrt(8 ln 2 / 3)
        let x = (8.0 * 2f64.ln() / 3.0).sqrt();
        let want = normal_cdf(x) - normal_cdf(x / 2.0);
        assert!((mixture_distance(&[4.0]) - want).abs() < 1e-10);
    }

    #[test]
    fn estimators_agree_for_few_scatterers() {
        let c = ChannelConfig::new(vec![2, 2, 4]).unwrap();
        let cond = rayleigh_limit_distance(&c, 20_000, 1, KsEstimator::Conditional).unwrap();
        let emp = rayleigh_limit_distance(&c, 20_000, 1, KsEstimator::Empirical).unwrap();
        assert!(cond > 0.02 && (cond - emp).abs() < 0.01, "{cond} vs {emp}");
    }
}
