//! Integer moments of `X = ||P_n||_F^2`.
//!
//! Three independent exact routes are provided and cross-checked in tests:
//! the signed sum over weak compositions of `m`, the closed forms for
//! `m <= 3`, and coefficient extraction from the determinant form of the
//! moment-generating function. A leading-order approximation covers orders
//! where the exact sum is too large to enumerate.

use serde::{Deserialize, Serialize};

use crate::config::ChannelConfig;
use crate::error::{Error, Result};
use crate::series::{det_series, Series};
use crate::special::{factorial, pochhammer};
use crate::summation::compensated_sum;

/// Highest order accepted by [`exact_moment`].
pub const MAX_EXACT_ORDER: u32 = 12;
/// Largest number of compositions [`exact_moment`] will enumerate.
pub const MAX_COMPOSITIONS: u128 = 10_000_000;
/// Highest order accepted by [`mgf_moment`].
pub const MAX_MGF_ORDER: u32 = 8;
/// Largest `K_min` accepted by [`mgf_moment`].
pub const MAX_MGF_DIM: u32 = 8;

/// How a moment value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentMethod {
    ExactPartition,
    ClosedForm,
    MgfSeries,
    LeadingOrder,
}

/// Which routes [`moment_set`] may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MomentPolicy {
    /// Exact composition sum; closed forms or the leading-order term when
    /// the enumeration guard trips.
    #[default]
    ExactPreferred,
    /// Exact composition sum only; guard violations are errors.
    ExactOnly,
    /// Leading-order term for every order above 3.
    LeadingOrder,
}

/// Moments `E[X^1], ..., E[X^q]` of one channel configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentSet {
    pub config: ChannelConfig,
    pub values: Vec<f64>,
    pub methods: Vec<MomentMethod>,
}

impl MomentSet {
    pub fn q(&self) -> usize {
        self.values.len()
    }

    /// `E[X^m]`, with `E[X^0] = 1`.
    pub fn moment(&self, m: usize) -> f64 {
        if m == 0 {
            1.0
        } else {
            self.values[m - 1]
        }
    }

    pub fn is_exact(&self) -> bool {
        self.methods.iter().all(|&m| m != MomentMethod::LeadingOrder)
    }
}

/// Weak compositions `a_1 + ... + a_k = m` in lexicographic order.
#[derive(Debug, Clone)]
pub struct Compositions {
    current: Vec<u32>,
    total: u32,
    done: bool,
}

impl Compositions {
    pub fn new(parts: usize, total: u32) -> Self {
        assert!(parts >= 1, "at least one part");
        let mut current = vec![0; parts];
        current[parts - 1] = total;
        Compositions {
            current,
            total,
            done: false,
        }
    }
}

impl Iterator for Compositions {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        let k = self.current.len();
        // The last part absorbs the remainder. Advance the rightmost earlier
        // part that still has room, zeroing everything after it.
        let mut advanced = false;
        for i in (0..k.saturating_sub(1)).rev() {
            let used: u32 = self.current[..=i].iter().sum();
            if used < self.total {
                self.current[i] += 1;
                for v in &mut self.current[i + 1..k - 1] {
                    *v = 0;
                }
                let prefix: u32 = self.current[..k - 1].iter().sum();
                self.current[k - 1] = self.total - prefix;
                advanced = true;
                break;
            }
        }
        if !advanced {
            self.done = true;
        }
        Some(out)
    }
}

/// `C(m + k - 1, k - 1)`, the number of weak compositions of `m` into `k` parts.
pub fn composition_count(parts: u32, m: u32) -> u128 {
    let n = u128::from(m) + u128::from(parts) - 1;
    let r = u128::from(parts - 1).min(u128::from(m));
    let mut c: u128 = 1;
    for i in 0..r {
        c = c * (n - i) / (i + 1);
        if c > u128::MAX / 1024 {
            return u128::MAX;
        }
    }
    c
}

/// `mantissa * 2^exponent`, used to multiply many moderate factors without
/// overflow or the rounding amplification of `exp(log(..))`.
#[derive(Debug, Clone, Copy)]
struct Scaled {
    mantissa: f64,
    exponent: i32,
}

impl Scaled {
    const ONE: Scaled = Scaled {
        mantissa: 1.0,
        exponent: 0,
    };

    fn times(self, factor: f64) -> Scaled {
        let (mantissa, e) = libm::frexp(self.mantissa * factor);
        Scaled {
            mantissa,
            exponent: self.exponent + e,
        }
    }
}

/// Exact `E[X^m]` by the signed composition sum.
///
/// With the dimensions rotated so that `K_0 = K_min` and `x_j = a_j + j`,
///
/// `E[X^m] = m! sum_a prod_{i<j} (x_j - x_i)/(j - i) prod_j prod_{l=1}^{n} (j + nu_l)_{a_j} / a_j!`
///
/// Terms with coinciding `x_i = x_j` vanish and are skipped before any
/// floating-point work.
pub fn exact_moment(config: &ChannelConfig, m: u32) -> Result<f64> {
    if m == 0 {
        return Ok(1.0);
    }
    if m > MAX_EXACT_ORDER {
        return Err(Error::Resource(format!(
            "exact moments are limited to m <= {MAX_EXACT_ORDER} (got {m}); use leading_order_moment"
        )));
    }
    let canon = config.canonical();
    let k = canon.k0 as usize;
    let count = composition_count(canon.k0, m);
    if count > MAX_COMPOSITIONS {
        return Err(Error::Resource(format!(
            "{count} compositions exceed the limit of {MAX_COMPOSITIONS}; use leading_order_moment"
        )));
    }

    let mut terms: Vec<(f64, Scaled)> = Vec::new();
    for a in Compositions::new(k, m) {
        let x: Vec<i64> = a
            .iter()
            .enumerate()
            .map(|(j, &aj)| i64::from(aj) + j as i64 + 1)
            .collect();
        let mut negative = false;
        let mut zero = false;
        'pairs: for i in 0..k {
            for j in i + 1..k {
                let d = x[j] - x[i];
                if d == 0 {
                    zero = true;
                    break 'pairs;
                }
                negative ^= d < 0;
            }
        }
        if zero {
            continue;
        }
        let mut magnitude = Scaled::ONE;
        for i in 0..k {
            for j in i + 1..k {
                magnitude = magnitude.times(((x[j] - x[i]).abs() as f64) / ((j - i) as f64));
            }
        }
        for (j0, &aj) in a.iter().enumerate() {
            let j = (j0 + 1) as f64;
            for t in 0..aj {
                let t = f64::from(t);
                let rising: f64 = canon.nu.iter().map(|&nu| j + f64::from(nu) + t).product();
                magnitude = magnitude.times(rising / (t + 1.0));
            }
        }
        terms.push((if negative { -1.0 } else { 1.0 }, magnitude));
    }

    let max_exp = terms.iter().map(|(_, s)| s.exponent).max().unwrap_or(0);
    let mut scaled: Vec<f64> = terms
        .iter()
        .map(|(sign, s)| sign * libm::ldexp(s.mantissa, s.exponent - max_exp))
        .collect();
    let sum = compensated_sum(&mut scaled);
    let value = libm::ldexp(sum, max_exp) * factorial(m);
    if !(value.is_finite() && value > 0.0) {
        return Err(Error::Numeric(format!(
            "composition sum for {config}, m={m} gave {value}"
        )));
    }
    Ok(value)
}

/// Closed forms for the first three moments.
pub fn closed_form_moment(config: &ChannelConfig, m: u32) -> Result<f64> {
    let ks: Vec<f64> = config.dims().iter().map(|&k| f64::from(k)).collect();
    let prod = |f: &dyn Fn(f64) -> f64| ks.iter().map(|&k| f(k)).product::<f64>();
    let base = prod(&|k| k);
    match m {
        1 => Ok(base),
        2 => Ok(base / 2.0 * (prod(&|k| k + 1.0) + prod(&|k| k - 1.0))),
        3 => Ok(base / 6.0
            * (prod(&|k| (k + 2.0) * (k + 1.0))
                + 4.0 * prod(&|k| (k + 1.0) * (k - 1.0))
                + prod(&|k| (k - 1.0) * (k - 2.0)))),
        _ => Err(Error::Parameter(format!(
            "closed-form moments exist for m in 1..=3, got {m}"
        ))),
    }
}

/// `E[X^m]` as `m!` times the `s^m` coefficient of the moment-generating
/// function, evaluated as a determinant of truncated power series.
///
/// The generating-function matrix has entries
/// `sum_t Gamma(i+j+nu_1+t-1) prod_{q>=2} (j+nu_q)_t s^t / t!`. Row `i`
/// depends on `i` only through the monic degree-`(i-1)` polynomial
/// `(j+nu_1+t)_{i-1}` in `j+t`, so unimodular row operations may replace it by
/// the falling factorial `(j+t-1)!/(j+t-i)!`. After dividing column `j` by
/// `Gamma(j) Gamma(j+nu_1)` the constant-term matrix is unit upper
/// triangular and the series determinant equals the generating function
/// itself.
pub fn mgf_moment(config: &ChannelConfig, m: u32) -> Result<f64> {
    if m == 0 {
        return Ok(1.0);
    }
    let canon = config.canonical();
    if m > MAX_MGF_ORDER || canon.k0 > MAX_MGF_DIM {
        return Err(Error::Resource(format!(
            "generating-function route limited to m <= {MAX_MGF_ORDER} and K_min <= {MAX_MGF_DIM} \
             (got m={m}, K_min={}); use exact_moment",
            canon.k0
        )));
    }
    let k = canon.k0;
    let degree = m as usize;
    let nu1 = f64::from(canon.nu[0]);
    let rest = &canon.nu[1..];
    let matrix: Vec<Vec<Series>> = (1..=k)
        .map(|i| {
            (1..=k)
                .map(|j| {
                    let jf = f64::from(j);
                    let coeffs = (0..=m)
                        .map(|t| {
                            if j + t < i {
                                return 0.0;
                            }
                            let others: f64 =
                                rest.iter().map(|&nu| pochhammer(jf + f64::from(nu), t)).product();
                            pochhammer(jf + nu1, t) * pochhammer(jf, t) * others
                                / (factorial(j + t - i) * factorial(t))
                        })
                        .collect();
                    Series::from_coeffs(coeffs)
                })
                .collect()
        })
        .collect();
    let det = det_series(matrix, degree)?;
    let value = det.coeff(degree) * factorial(m);
    if !(value.is_finite() && value > 0.0) {
        return Err(Error::Numeric(format!(
            "generating-function route for {config}, m={m} gave {value}"
        )));
    }
    Ok(value)
}

/// Leading-order term `prod_i (K_i)_m / m!`, exact in the limit of many
/// clusters.
pub fn leading_order_moment(config: &ChannelConfig, m: u32) -> f64 {
    let direct: f64 = config
        .dims()
        .iter()
        .map(|&k| pochhammer(f64::from(k), m))
        .product::<f64>()
        / factorial(m);
    if direct.is_finite() {
        return direct;
    }
    let log: f64 = config
        .dims()
        .iter()
        .map(|&k| libm::lgamma(f64::from(k + m)) - libm::lgamma(f64::from(k)))
        .sum::<f64>()
        - libm::lgamma(f64::from(m) + 1.0);
    log.exp()
}

/// Moments of orders `1..=q` under the given policy.
pub fn moment_set(config: &ChannelConfig, q: usize, policy: MomentPolicy) -> Result<MomentSet> {
    if q == 0 {
        return Err(Error::Parameter("at least one moment is required".into()));
    }
    let mut values = Vec::with_capacity(q);
    let mut methods = Vec::with_capacity(q);
    for m in 1..=q as u32 {
        let (value, method) = match policy {
            MomentPolicy::ExactOnly => (exact_moment(config, m)?, MomentMethod::ExactPartition),
            MomentPolicy::LeadingOrder if m > 3 => {
                (leading_order_moment(config, m), MomentMethod::LeadingOrder)
            }
            MomentPolicy::LeadingOrder => (closed_form_moment(config, m)?, MomentMethod::ClosedForm),
            MomentPolicy::ExactPreferred => match exact_moment(config, m) {
                Ok(v) => (v, MomentMethod::ExactPartition),
                Err(Error::Resource(_)) if m <= 3 => {
                    (closed_form_moment(config, m)?, MomentMethod::ClosedForm)
                }
                Err(Error::Resource(_)) => (leading_order_moment(config, m), MomentMethod::LeadingOrder),
                Err(e) => return Err(e),
            },
        };
        values.push(value);
        methods.push(method);
    }
    Ok(MomentSet {
        config: config.clone(),
        values,
        methods,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(d: &[u32]) -> ChannelConfig {
        ChannelConfig::new(d.to_vec()).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn compositions_enumerate_lexicographically() {
        let all: Vec<Vec<u32>> = Compositions::new(3, 2).collect();
        assert_eq!(
            all,
            vec![
                vec![0, 0, 2],
                vec![0, 1, 1],
                vec![0, 2, 0],
                vec![1, 0, 1],
                vec![1, 1, 0],
                vec![2, 0, 0]
            ]
        );
        assert_eq!(Compositions::new(1, 5).collect::<Vec<_>>(), vec![vec![5]]);
        assert_eq!(Compositions::new(4, 0).count(), 1);
    }

    #[test]
    fn composition_count_matches_enumeration() {
        for parts in 1..=6 {
            for m in 0..=8 {
                assert_eq!(
                    Compositions::new(parts, m).count() as u128,
                    composition_count(parts as u32, m),
                    "parts={parts} m={m}"
                );
            }
        }
    }

    #[test]
    fn exact_moment_examples() {
        assert!(rel(exact_moment(&cfg(&[2, 3]), 2).unwrap(), 42.0) < 1e-13);
        assert!(rel(exact_moment(&cfg(&[1, 1, 1]), 1).unwrap(), 1.0) < 1e-15);
        assert!(rel(exact_moment(&cfg(&[2, 3, 4]), 2).unwrap(), 792.0) < 1e-13);
    }

    #[test]
    fn exact_moment_guards() {
        assert!(matches!(exact_moment(&cfg(&[2, 3]), 13), Err(Error::Resource(_))));
        // K_min = 40 with m = 12 gives C(51, 39) ~ 1.6e11 compositions
        let wide = cfg(&[40, 40]);
        assert!(matches!(exact_moment(&wide, 12), Err(Error::Resource(_))));
        assert_eq!(exact_moment(&wide, 0).unwrap(), 1.0);
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(closed_form_moment(&cfg(&[2, 3, 4]), 1).unwrap(), 24.0);
        assert_eq!(closed_form_moment(&cfg(&[1, 1]), 2).unwrap(), 2.0);
        assert_eq!(closed_form_moment(&cfg(&[2, 3, 4]), 3).unwrap(), 34560.0);
        assert!(matches!(
            closed_form_moment(&cfg(&[2, 3]), 4),
            Err(Error::Parameter(_))
        ));
        assert!(closed_form_moment(&cfg(&[2, 3]), 0).is_err());
    }

    #[test]
    fn mgf_examples() {
        assert!(rel(mgf_moment(&cfg(&[2, 3]), 3).unwrap(), 336.0) < 1e-12);
        assert_eq!(mgf_moment(&cfg(&[5, 7, 2]), 0).unwrap(), 1.0);
        assert!(rel(mgf_moment(&cfg(&[2, 3, 4]), 2).unwrap(), 792.0) < 1e-12);
        assert!(matches!(mgf_moment(&cfg(&[2, 3]), 9), Err(Error::Resource(_))));
        assert!(matches!(mgf_moment(&cfg(&[9, 9]), 2), Err(Error::Resource(_))));
    }

    #[test]
    fn leading_order_examples() {
        assert!(rel(leading_order_moment(&cfg(&[1, 1]), 5), 120.0) < 1e-14);
        assert!(rel(leading_order_moment(&cfg(&[2, 2]), 2), 18.0) < 1e-14);
    }

    #[test]
    fn leading_order_ratio_approaches_one_with_more_clusters() {
        let ratio = |d: &[u32]| exact_moment(&cfg(d), 4).unwrap() / leading_order_moment(&cfg(d), 4);
        // exact/leading ratios from rational arithmetic on the composition sum
        let frozen = [
            (vec![2, 8, 8], 1.832_595_041_322_314),
            (vec![2, 8, 8, 8, 8, 8], 1.201_523_288_299_979_6),
            (vec![2, 8, 8, 8, 8, 8, 8, 8, 8, 8], 1.031_723_757_344_054_7),
        ];
        let mut previous = f64::INFINITY;
        for (dims, want) in frozen {
            let got = ratio(&dims);
            assert!(rel(got, want) < 1e-12, "{dims:?}: {got} vs {want}");
            let via_mgf = mgf_moment(&cfg(&dims), 4).unwrap() / leading_order_moment(&cfg(&dims), 4);
            assert!(rel(via_mgf, want) < 1e-10);
            assert!((got - 1.0).abs() < (previous - 1.0).abs());
            previous = got;
        }
    }

    #[test]
    fn n1_moments_are_rising_factorials() {
        for k0 in 1..=5u32 {
            for k1 in k0..=7u32 {
                for m in 1..=8u32 {
                    let want = pochhammer(f64::from(k0 * k1), m);
                    let got = exact_moment(&cfg(&[k0, k1]), m).unwrap();
                    assert!(rel(got, want) <= 1e-10, "[{k0},{k1}] m={m}: {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn moment_set_examples() {
        let s = moment_set(&cfg(&[2, 3]), 3, MomentPolicy::default()).unwrap();
        for (got, want) in s.values.iter().zip([6.0, 42.0, 336.0]) {
            assert!(rel(*got, want) < 1e-12);
        }
        assert!(s.methods.iter().all(|&m| m == MomentMethod::ExactPartition));
        let s = moment_set(&cfg(&[4, 4]), 1, MomentPolicy::default()).unwrap();
        assert_eq!(s.values, vec![16.0]);
        assert!(moment_set(&cfg(&[4, 4]), 0, MomentPolicy::default()).is_err());
    }

    #[test]
    fn moment_set_falls_back_past_the_guard() {
        let s = moment_set(&cfg(&[40, 40]), 13, MomentPolicy::ExactPreferred).unwrap();
        assert_eq!(s.methods[12], MomentMethod::LeadingOrder);
        assert!(!s.is_exact());
        assert!(moment_set(&cfg(&[40, 40]), 13, MomentPolicy::ExactOnly).is_err());
        let lo = moment_set(&cfg(&[2, 3, 4]), 5, MomentPolicy::LeadingOrder).unwrap();
        assert_eq!(lo.methods[2], MomentMethod::ClosedForm);
        assert_eq!(lo.methods[4], MomentMethod::LeadingOrder);
    }

    #[test]
    fn moment_set_serializes_methods() {
        let s = moment_set(&cfg(&[2, 3]), 2, MomentPolicy::default()).unwrap();
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.contains("\"exact_partition\""));
        let back: MomentSet = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }
}
