//! Gamma-Laguerre approximation of the distribution of `X`.
//!
//! The base law is the Gamma distribution with the first two moments of `X`;
//! a Laguerre series corrects it so that the first `q` moments match.
//! Writing `mu_l = E[X^l] / (beta^l (alpha)_l)` and `D_i` for the `i`-th
//! forward difference of `mu` at zero, the approximation reads
//!
//! ```text
//! F(x) = P(alpha, y) + p(alpha, y) * sum_{i=3}^{q} (alpha D_i / i) L_{i-1}^{(alpha)}(y),  y = x / beta
//! f(x) = g_alpha(y) / beta * (1 + sum_{i=3}^{q} D_i L_i^{(alpha-1)}(y))
//! ```
//!
//! where `p(a, y) = y^a e^{-y} / Gamma(a + 1)` and `g_alpha` is the Gamma
//! density. The textbook weights are `w_i = D_i / Gamma(alpha)`; `D_1` and
//! `D_2` vanish by construction. When `X` itself is Gamma distributed, as for
//! a single Rayleigh matrix, every `D_i` with `i >= 1` vanishes.

use serde::{Deserialize, Serialize};

use crate::config::ChannelConfig;
use crate::error::{Error, Result};
use crate::moments::MomentSet;
use crate::special::{log_poisson_weight, reg_lower_gamma};
use crate::summation::compensated_sum;

/// Number of matched moments used unless stated otherwise.
pub const DEFAULT_Q: usize = 6;

const ENVELOPE_GRID: usize = 4096;
const INVERSE_MAX_DOUBLINGS: usize = 60;

/// One evaluation of the approximate CDF.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdfValue {
    /// The truncated series as is; may leave `[0, 1]` or decrease locally.
    pub raw: f64,
    /// Running maximum of the clamped series.
    pub regularized: f64,
}

/// A fitted Gamma-Laguerre model.
#[derive(Debug, Clone)]
pub struct GammaLaguerreModel {
    config: ChannelConfig,
    moments: Vec<f64>,
    alpha: f64,
    beta: f64,
    differences: Vec<f64>,
    weights: Vec<f64>,
    /// Local maxima `(y, running max of raw)` of the series, ascending in `y`.
    envelope: Vec<(f64, f64)>,
    diagnostics: Vec<String>,
}

/// On-disk form of a fitted model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub dims: ChannelConfig,
    pub q: usize,
    pub alpha: f64,
    pub beta: f64,
    /// `w_0, ..., w_q`.
    pub weights: Vec<f64>,
    /// `D_0, ..., D_q`; unlike the weights these never underflow.
    pub laguerre_coefficients: Vec<f64>,
    /// `E[X^1], ..., E[X^q]`.
    pub moments: Vec<f64>,
}

impl GammaLaguerreModel {
    /// Matches the first `moments.q()` moments.
    pub fn fit(moments: &MomentSet) -> Result<Self> {
        let q = moments.q();
        if q < 2 {
            return Err(Error::Parameter(format!(
                "a Gamma-Laguerre fit needs at least two moments, got {q}"
            )));
        }
        let mean = moments.moment(1);
        let second = moments.moment(2);
        let variance = second - mean * mean;
        if !(mean > 0.0) || !(variance > 0.0) || !variance.is_finite() {
            return Err(Error::Fit(format!(
                "mean {mean} and variance {variance} cannot be matched by a Gamma law"
            )));
        }
        let alpha = mean * mean / variance;
        let beta = variance / mean;

        let mut normalized = Vec::with_capacity(q + 1);
        let mut scale = 1.0;
        for l in 0..=q {
            normalized.push(moments.moment(l) / scale);
            scale *= beta * (alpha + l as f64);
        }
        let differences = forward_differences(&normalized);
        Self::assemble(
            moments.config.clone(),
            moments.values.clone(),
            alpha,
            beta,
            differences,
        )
    }

    fn assemble(
        config: ChannelConfig,
        moments: Vec<f64>,
        alpha: f64,
        beta: f64,
        differences: Vec<f64>,
    ) -> Result<Self> {
        let log_gamma_alpha = libm::lgamma(alpha);
        let weights = differences
            .iter()
            .map(|&d| {
                if d == 0.0 {
                    0.0
                } else {
                    d.signum() * (d.abs().ln() - log_gamma_alpha).exp()
                }
            })
            .collect();
        let mut model = GammaLaguerreModel {
            config,
            moments,
            alpha,
            beta,
            differences,
            weights,
            envelope: Vec::new(),
            diagnostics: Vec::new(),
        };
        model.build_envelope()?;
        Ok(model)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Number of matched moments.
    pub fn q(&self) -> usize {
        self.differences.len() - 1
    }

    pub fn config(&self) -> &ChannelConfig {
        &self.config
    }

    /// Series weights `w_0, ..., w_q`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Laguerre coefficients `D_0, ..., D_q` of the density expansion.
    pub fn laguerre_coefficients(&self) -> &[f64] {
        &self.differences
    }

    pub fn mean(&self) -> f64 {
        self.alpha * self.beta
    }

    pub fn std_dev(&self) -> f64 {
        self.alpha.sqrt() * self.beta
    }

    /// Warnings raised while fitting, e.g. large correction coefficients or
    /// regions where the series density is negative.
    pub fn diagnostics(&self) -> &[String] {
        &self.diagnostics
    }

    /// Series part of the CDF in the scaled variable `y = x / beta`.
    fn raw_scaled(&self, y: f64) -> Result<f64> {
        let base = reg_lower_gamma(self.alpha, y)?;
        if self.q() < 3 || y == 0.0 {
            return Ok(base);
        }
        let weight = log_poisson_weight(self.alpha, y).exp();
        if weight == 0.0 {
            return Ok(base);
        }
        // L_k^{(alpha)}(y) by the three-term recurrence; term i uses L_{i-1}.
        let a = self.alpha;
        let mut prev = 1.0;
        let mut cur = 1.0 + a - y;
        let mut correction = 0.0;
        for k in 1..self.q() {
            if k >= 2 {
                let i = k + 1;
                correction += a * self.differences[i] / i as f64 * cur;
            }
            let kf = k as f64;
            let next = ((2.0 * kf + 1.0 + a - y) * cur - (kf + a) * prev) / (kf + 1.0);
            prev = cur;
            cur = next;
        }
        Ok(base + weight * correction)
    }

    /// Polynomial factor of the series density; `raw` decreases where it is negative.
    fn density_factor(&self, y: f64) -> f64 {
        let a = self.alpha - 1.0;
        let mut prev = 1.0;
        let mut cur = 1.0 + a - y;
        let mut total = 1.0;
        for k in 1..self.q() {
            let kf = k as f64;
            let next = ((2.0 * kf + 1.0 + a - y) * cur - (kf + a) * prev) / (kf + 1.0);
            prev = cur;
            cur = next;
            if k + 1 >= 3 {
                total += self.differences[k + 1] * cur;
            }
        }
        total
    }

    /// Series density `f(x)`.
    pub fn density(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let y = x / self.beta;
        let log_gamma_density = (self.alpha - 1.0) * y.ln() - y - libm::lgamma(self.alpha);
        log_gamma_density.exp() / self.beta * self.density_factor(y)
    }

    fn upper_scaled_limit(&self) -> f64 {
        self.alpha + 30.0 * self.alpha.sqrt() + 10.0
    }

    fn build_envelope(&mut self) -> Result<()> {
        let max_coeff = self.differences[3..].iter().fold(0.0_f64, |m, d| m.max(d.abs()));
        if max_coeff > 1.0 {
            self.diagnostics.push(format!(
                "large Laguerre correction coefficient {max_coeff:.3e}; the series may oscillate"
            ));
        }
        if self.q() < 3 || self.differences[3..].iter().all(|&d| d == 0.0) {
            return Ok(());
        }
        let upper = self.upper_scaled_limit();
        let step = upper / ENVELOPE_GRID as f64;
        let mut running = 0.0_f64;
        let mut prev_y = 0.0;
        let mut prev_q = self.density_factor(0.0);
        let mut negative_region = prev_q < 0.0;
        for k in 1..=ENVELOPE_GRID {
            let y = step * k as f64;
            let q = self.density_factor(y);
            negative_region |= q < 0.0;
            if prev_q > 0.0 && q <= 0.0 {
                let peak = self.bisect_density_root(prev_y, y);
                running = running.max(self.raw_scaled(peak)?);
                self.envelope.push((peak, running));
            }
            prev_y = y;
            prev_q = q;
        }
        if negative_region {
            self.diagnostics.push(
                "series density is negative on part of the support; CDF monotonized by running maximum"
                    .to_string(),
            );
        }
        Ok(())
    }

    fn bisect_density_root(&self, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.density_factor(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Raw and regularized CDF at `x`.
    pub fn cdf(&self, x: f64) -> Result<CdfValue> {
        if !(x >= 0.0) {
            return Err(Error::Domain(format!(
                "CDF argument must be nonnegative, got {x}"
            )));
        }
        if x.is_infinite() {
            return Ok(CdfValue {
                raw: 1.0,
                regularized: 1.0,
            });
        }
        let y = x / self.beta;
        let raw = self.raw_scaled(y)?;
        let idx = self.envelope.partition_point(|&(peak, _)| peak <= y);
        let floor = if idx == 0 { 0.0 } else { self.envelope[idx - 1].1 };
        Ok(CdfValue {
            raw,
            regularized: raw.max(floor).clamp(0.0, 1.0),
        })
    }

    /// Regularized CDF only.
    pub fn cdf_regularized(&self, x: f64) -> Result<f64> {
        Ok(self.cdf(x)?.regularized)
    }

    /// Generalized inverse of the regularized CDF.
    pub fn cdf_inverse(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Parameter(format!(
                "probability must lie in (0, 1), got {p}"
            )));
        }
        let mut lo = 0.0;
        let mut hi = self.mean() + 10.0 * self.std_dev();
        let mut doublings = 0;
        while self.cdf_regularized(hi)? < p {
            lo = hi;
            hi *= 2.0;
            doublings += 1;
            if doublings > INVERSE_MAX_DOUBLINGS || !hi.is_finite() {
                return Err(Error::Numeric(format!(
                    "could not bracket the {p} quantile after {INVERSE_MAX_DOUBLINGS} doublings"
                )));
            }
        }
        for _ in 0..400 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let value = self.cdf_regularized(mid)?;
            if value < p {
                lo = mid;
            } else {
                hi = mid;
                if value - p <= 1e-13 {
                    break;
                }
            }
        }
        Ok(hi)
    }

    pub fn to_file(&self) -> ModelFile {
        ModelFile {
            dims: self.config.clone(),
            q: self.q(),
            alpha: self.alpha,
            beta: self.beta,
            weights: self.weights.clone(),
            laguerre_coefficients: self.differences.clone(),
            moments: self.moments.clone(),
        }
    }

    pub fn from_file(file: ModelFile) -> Result<Self> {
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        if file.q < 2 {
            return Err(Error::Format(format!(
                "model q must be at least 2, got {}",
                file.q
            )));
        }
        if !(file.alpha > 0.0 && file.alpha.is_finite() && file.beta > 0.0 && file.beta.is_finite()) {
            return Err(Error::Format(
                "model alpha and beta must be positive and finite".into(),
            ));
        }
        if file.laguerre_coefficients.len() != file.q + 1
            || file.weights.len() != file.q + 1
            || file.moments.len() != file.q
        {
            return Err(Error::Format("model coefficient lengths do not match q".into()));
        }
        if !finite(&file.laguerre_coefficients) || !finite(&file.moments) || !finite(&file.weights) {
            return Err(Error::Format("model contains non-finite values".into()));
        }
        let model = Self::assemble(
            file.dims,
            file.moments,
            file.alpha,
            file.beta,
            file.laguerre_coefficients,
        )?;
        // Weights are derived data; a file whose weights disagree was edited or corrupted.
        let consistent = file
            .weights
            .iter()
            .zip(&model.weights)
            .all(|(&a, &b)| (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(f64::MIN_POSITIVE));
        if !consistent {
            return Err(Error::Format(
                "model weights disagree with its Laguerre coefficients".into(),
            ));
        }
        Ok(model)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile =
            serde_json::from_str(text).map_err(|e| Error::Format(format!("model JSON: {e}")))?;
        Self::from_file(file)
    }
}

/// `D_i = sum_l (-1)^l C(i, l) mu_l` for `i = 0..len`.
fn forward_differences(values: &[f64]) -> Vec<f64> {
    (0..values.len())
        .map(|i| {
            let mut binom = 1.0;
            let mut terms: Vec<f64> = Vec::with_capacity(i + 1);
            for (l, &v) in values.iter().enumerate().take(i + 1) {
                let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
                terms.push(sign * binom * v);
                binom = binom * (i - l) as f64 / (l + 1) as f64;
            }
            compensated_sum(&mut terms)
        })
        .collect()
}
