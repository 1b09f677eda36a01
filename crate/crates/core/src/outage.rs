//! Outage probability and outage capacity of OSTBC transmission over the
//! product channel. Capacities are in nats/s/Hz.

use crate::cdf::GammaLaguerreModel;
use crate::config::ChannelConfig;
use crate::error::{Error, Result};

/// An orthogonal space-time block code: `symbols` complex symbols sent over
/// `block_length` channel uses from `tx_antennas` antennas.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OstbcScheme {
    pub symbols: u32,
    pub block_length: u32,
    pub tx_antennas: u32,
}

impl OstbcScheme {
    pub fn new(symbols: u32, block_length: u32, tx_antennas: u32) -> Result<Self> {
        if symbols == 0 || block_length == 0 || tx_antennas == 0 {
            return Err(Error::Parameter(
                "code symbols, block length and antenna count must be positive".into(),
            ));
        }
        if symbols > block_length {
            return Err(Error::Parameter(format!(
                "code rate {symbols}/{block_length} exceeds 1"
            )));
        }
        Ok(OstbcScheme {
            symbols,
            block_length,
            tx_antennas,
        })
    }

    /// `R = S / T`.
    pub fn rate(&self) -> f64 {
        f64::from(self.symbols) / f64::from(self.block_length)
    }
}

/// Built-in complex-constellation codes: Alamouti for two antennas, rate
/// 3/4 codes for three and four, rate 1/2 codes beyond.
pub fn ostbc_catalog(tx_antennas: u32) -> Result<OstbcScheme> {
    let (s, t) = match tx_antennas {
        0 => return Err(Error::Parameter("at least one transmit antenna is needed".into())),
        1 | 2 => (tx_antennas, tx_antennas),
        3 | 4 => (3, 4),
        5..=8 => (4, 8),
        k => (k, 2 * k),
    };
    OstbcScheme::new(s, t, tx_antennas)
}

/// Converts an SNR in dB to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(gamma: f64) -> f64 {
    10.0 * gamma.log10()
}

/// A channel together with the space-time code used on it.
#[derive(Debug, Clone)]
pub struct Link {
    config: ChannelConfig,
    scheme: OstbcScheme,
}

impl Link {
    pub fn new(config: ChannelConfig, scheme: OstbcScheme) -> Result<Self> {
        if scheme.tx_antennas != config.tx_antennas() {
            return Err(Error::Parameter(format!(
                "code is built for {} transmit antennas but the channel has {}",
                scheme.tx_antennas,
                config.tx_antennas()
            )));
        }
        Ok(Link { config, scheme })
    }

    /// Uses the catalog code for the channel's transmit antenna count.
    pub fn with_catalog_code(config: ChannelConfig) -> Result<Self> {
        let scheme = ostbc_catalog(config.tx_antennas())?;
        Link::new(config, scheme)
    }

    pub fn config(&self) -> &ChannelConfig {
        &self.config
    }

    pub fn scheme(&self) -> &OstbcScheme {
        &self.scheme
    }

    /// `R K_0 prod_{i>=1} K_i`, the divisor between `gamma X` and the per-symbol SNR.
    fn snr_scale(&self) -> f64 {
        self.scheme.rate() * f64::from(self.config.tx_antennas()) * self.config.normalization()
    }

    /// Per-symbol SNR of the decoupled scalar channels for a channel realization `x`.
    pub fn effective_snr(&self, gamma: f64, x: f64) -> Result<f64> {
        check_gamma(gamma)?;
        if !(x >= 0.0) {
            return Err(Error::Domain(format!(
                "channel energy must be nonnegative, got {x}"
            )));
        }
        Ok(gamma * x / self.snr_scale())
    }

    /// Probability that the instantaneous capacity falls below `z`.
    pub fn outage_probability(&self, model: &GammaLaguerreModel, gamma: f64, z: f64) -> Result<f64> {
        check_gamma(gamma)?;
        if !(z >= 0.0) {
            return Err(Error::Parameter(format!("rate must be nonnegative, got {z}")));
        }
        let threshold = self.snr_scale() / gamma * (z / self.scheme.rate()).exp_m1();
        model.cdf_regularized(threshold)
    }

    /// Largest rate whose outage probability is at most `p`.
    pub fn outage_capacity(&self, model: &GammaLaguerreModel, gamma: f64, p: f64) -> Result<f64> {
        check_gamma(gamma)?;
        let x = model.cdf_inverse(p)?;
        Ok(self.scheme.rate() * (gamma / self.snr_scale() * x).ln_1p())
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "SNR must be positive and finite, got {gamma}"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{moment_set, MomentPolicy};

    fn model_for(d: &[u32]) -> (ChannelConfig, GammaLaguerreModel) {
        let c = ChannelConfig::new(d.to_vec()).unwrap();
        let m = GammaLaguerreModel::fit(&moment_set(&c, 6, MomentPolicy::default()).unwrap()).unwrap();
        (c, m)
    }

    #[test]
    fn catalog() {
        assert_eq!(ostbc_catalog(1).unwrap().rate(), 1.0);
        assert_eq!(ostbc_catalog(2).unwrap().rate(), 1.0);
        assert_eq!(ostbc_catalog(3).unwrap().rate(), 0.75);
        assert_eq!(ostbc_catalog(4).unwrap().rate(), 0.75);
        for k in 5..=20 {
            assert_eq!(ostbc_catalog(k).unwrap().rate(), 0.5);
        }
        assert!(ostbc_catalog(0).is_err());
        assert!(OstbcScheme::new(5, 4, 4).is_err());
    }

    #[test]
    fn effective_snr_examples() {
        let link = Link::new(
            ChannelConfig::new(vec![2, 3, 4]).unwrap(),
            OstbcScheme::new(2, 2, 2).unwrap(),
        )
        .unwrap();
        assert!((link.effective_snr(24.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(link.effective_snr(5.0, 0.0).unwrap(), 0.0);
        assert!((link.effective_snr(3.0, 24.0 / 3.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(link.effective_snr(0.0, 1.0).is_err());
        assert!(Link::new(ChannelConfig::new(vec![4, 4]).unwrap(), ostbc_catalog(2).unwrap()).is_err());
    }

    #[test]
    fn siso_exponential_examples() {
        let (c, model) = model_for(&[1, 1]);
        let link = Link::with_catalog_code(c).unwrap();
        let p = link.outage_probability(&model, 1.0, 2f64.ln()).unwrap();
        assert!((p - (1.0 - (-1.0f64).exp())).abs() < 1e-12);
        assert_eq!(link.outage_probability(&model, 1.0, 0.0).unwrap(), 0.0);
        let z = link.outage_capacity(&model, 1.0, 1.0 - (-1.0f64).exp()).unwrap();
        assert!((z - 2f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn capacity_and_probability_are_inverse() {
        let (c, model) = model_for(&[4, 8, 8, 4]);
        let link = Link::with_catalog_code(c).unwrap();
        for db in [0.0, 5.0, 20.0] {
            let gamma = db_to_linear(db);
            for p in [0.01, 0.05, 0.5] {
                let z = link.outage_capacity(&model, gamma, p).unwrap();
                let back = link.outage_probability(&model, gamma, z).unwrap();
                assert!((back - p).abs() <= 1e-8, "{db} dB p={p}: {back}");
            }
        }
    }

    #[test]
    fn monotone_in_rate_snr_and_target() {
        let (c, model) = model_for(&[2, 6, 8, 4]);
        let link = Link::with_catalog_code(c).unwrap();
        let mut prev = 0.0;
        for k in 0..50 {
            let p = link.outage_probability(&model, 1.0, 0.1 * k as f64).unwrap();
            assert!(p >= prev);
            prev = p;
        }
        let mut prev_p = 1.0;
        let mut prev_c = 0.0;
        for db in 0..30 {
            let gamma = db_to_linear(db as f64);
            let p = link.outage_probability(&model, gamma, 1.0).unwrap();
            let c = link.outage_capacity(&model, gamma, 0.05).unwrap();
            assert!(p <= prev_p && c >= prev_c);
            prev_p = p;
            prev_c = c;
        }
        let lo = link.outage_capacity(&model, 1.0, 0.01).unwrap();
        let hi = link.outage_capacity(&model, 1.0, 0.1).unwrap();
        assert!(hi > lo);
    }

    #[test]
    fn high_snr_slope_is_rate_times_ln10_over_10() {
        let (c, model) = model_for(&[4, 7, 8, 4]);
        let link = Link::with_catalog_code(c).unwrap();
        let c30 = link.outage_capacity(&model, db_to_linear(30.0), 0.05).unwrap();
        let c40 = link.outage_capacity(&model, db_to_linear(40.0), 0.05).unwrap();
        let slope = (c40 - c30) / 10.0;
        let want = 0.75 * 10f64.ln() / 10.0;
        assert!((slope / want - 1.0).abs() < 0.05, "{slope} vs {want}");
    }

    #[test]
    fn db_conversion() {
        assert_eq!(db_to_linear(0.0), 1.0);
        assert!((db_to_linear(30.0) - 1000.0).abs() < 1e-9);
        assert!((linear_to_db(100.0) - 20.0).abs() < 1e-12);
    }
}
