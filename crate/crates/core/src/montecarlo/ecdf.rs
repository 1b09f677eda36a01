use crate::error::{Error, Result};

/// Right-continuous empirical distribution function.
#[derive(Debug, Clone)]
pub struct Ecdf {
    sorted: Vec<f64>,
}

impl Ecdf {
    pub fn new(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Parameter("empirical CDF of an empty sample".into()));
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::Parameter("sample contains NaN".into()));
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(Ecdf { sorted })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    /// Fraction of samples `<= x`.
    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.len() as f64
    }

    /// `sup_x |F_n(x) - cdf(x)|` for a continuous `cdf`, attained next to a
    /// sample point.
    pub fn ks_distance<F>(&self, mut cdf: F) -> Result<f64>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let n = self.len() as f64;
        let mut sup = 0.0_f64;
        let mut i = 0;
        while i < self.sorted.len() {
            let x = self.sorted[i];
            let mut j = i;
            while j + 1 < self.sorted.len() && self.sorted[j + 1] == x {
                j += 1;
            }
            let f = cdf(x)?;
            sup = sup.max(i as f64 / n - f).max(f - i as f64 / n);
            sup = sup.max((j + 1) as f64 / n - f).max(f - (j + 1) as f64 / n);
            i = j + 1;
        }
        Ok(sup)
    }

    /// `sup |F_n - G_m|` over the pooled sample points.
    pub fn ks_two_sample(&self, other: &Ecdf) -> f64 {
        self.sorted
            .iter()
            .chain(&other.sorted)
            .map(|&x| (self.eval(x) - other.eval(x)).abs())
            .fold(0.0, f64::max)
    }
}

/// Asymptotic p-value of a one-sample KS statistic `d` at sample size `n`,
/// with the usual finite-size correction of the argument.
pub fn kolmogorov_p_value(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}
