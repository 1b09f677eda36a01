use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dimensions `K_0, K_1, ..., K_n` of the channel product `H_n ... H_1`,
/// where `H_i` is `K_i x K_{i-1}`. `K_0` is the transmit antenna count and
/// `K_n` the receive antenna count; the middle entries are scatterer counts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct ChannelConfig {
    dims: Vec<u32>,
}

/// Dimensions rotated so that a minimal one comes first, as required by the
/// moment formulas. The nonzero eigenvalue law of `P P^H` does not depend on
/// the order of the dimensions, so this loses nothing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalDims {
    /// `K_min`.
    pub k0: u32,
    /// Offsets `nu_1, ..., nu_n` of the remaining dimensions above `K_min`.
    pub nu: Vec<u32>,
}

impl ChannelConfig {
    pub fn new(dims: Vec<u32>) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::Parameter(format!(
                "a channel needs at least two dimensions (K0, K1), got {}",
                dims.len()
            )));
        }
        if dims.contains(&0) {
            return Err(Error::Parameter("all dimensions must be at least 1".into()));
        }
        Ok(ChannelConfig { dims })
    }

    pub fn dims(&self) -> &[u32] {
        &self.dims
    }

    /// Number of matrices in the product.
    pub fn n(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn tx_antennas(&self) -> u32 {
        self.dims[0]
    }

    pub fn rx_antennas(&self) -> u32 {
        self.dims[self.n()]
    }

    pub fn k_min(&self) -> u32 {
        *self.dims.iter().min().expect("non-empty dims")
    }

    /// `prod_{i=1}^{n} K_i`, the power normalization of the channel.
    pub fn normalization(&self) -> f64 {
        self.dims[1..].iter().map(|&k| f64::from(k)).product()
    }

    /// `prod_i K_i`, which equals `E[X]`.
    pub fn dim_product(&self) -> f64 {
        self.dims.iter().map(|&k| f64::from(k)).product()
    }

    /// Cyclic rotation placing the first minimal dimension at the front.
    pub fn canonical(&self) -> CanonicalDims {
        let k0 = self.k_min();
        let start = self.dims.iter().position(|&k| k == k0).expect("minimum exists");
        let len = self.dims.len();
        let nu = (1..len).map(|off| self.dims[(start + off) % len] - k0).collect();
        CanonicalDims { k0, nu }
    }

    /// The configuration truncated to its first `n + 1` dimensions.
    pub fn prefix(&self, n: usize) -> Result<ChannelConfig> {
        if n == 0 || n > self.n() {
            return Err(Error::Parameter(format!(
                "prefix length {n} outside 1..={}",
                self.n()
            )));
        }
        ChannelConfig::new(self.dims[..=n].to_vec())
    }
}

impl TryFrom<Vec<u32>> for ChannelConfig {
    type Error = Error;

    fn try_from(dims: Vec<u32>) -> Result<Self> {
        ChannelConfig::new(dims)
    }
}

impl From<ChannelConfig> for Vec<u32> {
    fn from(c: ChannelConfig) -> Self {
        c.dims
    }
}

impl std::fmt::Display for ChannelConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(u32::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}
